#pragma once

#include <string>

#include "kge/model.hpp"

namespace kge {

/// Write a checkpoint directory:
///   meta.json    - format_version, model_kind, dim, num_entities,
///                  num_relations, tie_table
///   head.bin, tail.bin, rel_fwd.bin, rel_inv.bin
///                - raw little-endian float64, row-major, no header
///                  (tail.bin repeats head.bin when entity storage is shared)
///   checksum.txt - `file<TAB>crc32hex` per array file
void save_params(const ModelParams& params, const std::string& dir);

/// Read a checkpoint back. Throws FormatError on version mismatch,
/// truncated array files, or checksum failure. The round trip is lossless:
/// every matrix is restored bit for bit.
ModelParams load_params(const std::string& dir);

}  // namespace kge
