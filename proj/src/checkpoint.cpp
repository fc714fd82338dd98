#include "kge/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "json.hpp"
#include "kge/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint arrays are little-endian; byte swapping not implemented");

namespace kge {

namespace {

constexpr int kFormatVersion = 1;

std::uint32_t crc32_of(const void* data, std::size_t len) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, static_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

std::string hex32(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

std::uint32_t write_array(const std::filesystem::path& path, const double* data,
                          std::size_t count) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data), count * sizeof(double));
    if (!out) throw FormatError("short write to " + path.string());
    return crc32_of(data, count * sizeof(double));
}

std::uint32_t read_array(const std::filesystem::path& path, double* data, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("missing checkpoint file: " + path.string());
    in.seekg(0, std::ios::end);
    auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != count * sizeof(double)) {
        throw FormatError(path.string() + " holds " + std::to_string(bytes) + " bytes, expected " +
                          std::to_string(count * sizeof(double)));
    }
    in.seekg(0);
    in.read(reinterpret_cast<char*>(data), count * sizeof(double));
    if (!in) throw FormatError("short read from " + path.string());
    return crc32_of(data, count * sizeof(double));
}

std::string slot_name(RelSlot s) { return s == RelSlot::Forward ? "fwd" : "inv"; }

RelSlot slot_from_name(const std::string& s) {
    if (s == "fwd") return RelSlot::Forward;
    if (s == "inv") return RelSlot::Inverse;
    throw FormatError("bad tie slot: " + s);
}

}  // namespace

void save_params(const ModelParams& params, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path base(dir);

    nlohmann::json meta;
    meta["format_version"] = kFormatVersion;
    meta["model_kind"] = to_string(params.kind);
    meta["dim"] = params.dim;
    meta["num_entities"] = params.num_entities();
    meta["num_relations"] = params.num_relations();
    auto ties = nlohmann::json::array();
    for (const TieEntry& e : params.ties.spec()) {
        ties.push_back({{"relation", e.relation},
                        {"target", slot_name(e.target)},
                        {"canonical_relation", e.canonical_relation},
                        {"canonical_slot", slot_name(e.canonical_slot)},
                        {"sign", static_cast<int>(e.sign)}});
    }
    meta["tie_table"] = ties;
    {
        std::ofstream out(base / "meta.json");
        if (!out) throw FormatError("cannot write " + (base / "meta.json").string());
        out << meta.dump(2) << '\n';
    }

    const std::size_t ne = params.num_entities();
    const std::size_t nr = params.num_relations();
    const std::size_t d = params.dim;

    std::map<std::string, std::uint32_t> crcs;
    crcs["head.bin"] = write_array(base / "head.bin", params.head_emb.data(), ne * d);
    if (params.shared_entity_storage()) {
        // One vector per entity: tail.bin repeats the shared storage.
        crcs["tail.bin"] = write_array(base / "tail.bin", params.head_emb.data(), ne * d);
    } else {
        crcs["tail.bin"] = write_array(base / "tail.bin", params.tail_emb.data(), ne * d);
    }
    crcs["rel_fwd.bin"] = write_array(base / "rel_fwd.bin", params.rel_fwd.data(), nr * d);
    crcs["rel_inv.bin"] = write_array(base / "rel_inv.bin", params.rel_inv.data(), nr * d);

    std::ofstream sums(base / "checksum.txt");
    if (!sums) throw FormatError("cannot write " + (base / "checksum.txt").string());
    for (const auto& [name, crc] : crcs) sums << name << '\t' << hex32(crc) << '\n';
}

ModelParams load_params(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path base(dir);

    nlohmann::json meta;
    {
        std::ifstream in(base / "meta.json");
        if (!in) throw FormatError("missing checkpoint meta: " + (base / "meta.json").string());
        try {
            in >> meta;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("unparseable meta.json: " + std::string(e.what()));
        }
    }
    if (!meta.contains("format_version") || !meta["format_version"].is_number_integer()) {
        throw FormatError("meta.json has no format_version");
    }
    if (meta["format_version"].get<int>() != kFormatVersion) {
        throw FormatError("unsupported checkpoint format_version " +
                          meta["format_version"].dump());
    }

    ModelKind kind;
    int dim, ne, nr;
    TieSpec spec;
    try {
        kind = model_kind_from_string(meta.at("model_kind").get<std::string>());
        dim = meta.at("dim").get<int>();
        ne = meta.at("num_entities").get<int>();
        nr = meta.at("num_relations").get<int>();
        for (const auto& e : meta.at("tie_table")) {
            spec.push_back({e.at("relation").get<int>(), slot_from_name(e.at("target")),
                            e.at("canonical_relation").get<int>(),
                            slot_from_name(e.at("canonical_slot")),
                            static_cast<double>(e.at("sign").get<int>())});
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad meta.json: " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
        throw FormatError("bad meta.json: " + std::string(e.what()));
    }

    ModelParams params = ModelParams::zeros(kind, dim, ne, nr, spec);

    std::map<std::string, std::uint32_t> expected;
    {
        std::ifstream sums(base / "checksum.txt");
        if (!sums) throw FormatError("missing checksum.txt in " + dir);
        std::string name, hex;
        while (sums >> name >> hex) {
            try {
                expected[name] = static_cast<std::uint32_t>(std::stoul(hex, nullptr, 16));
            } catch (const std::exception&) {
                throw FormatError("unreadable checksum entry for " + name);
            }
        }
    }

    const std::size_t ed = static_cast<std::size_t>(ne) * dim;
    const std::size_t rd = static_cast<std::size_t>(nr) * dim;
    std::map<std::string, std::uint32_t> actual;
    actual["head.bin"] = read_array(base / "head.bin", params.head_emb.data(), ed);
    if (params.shared_entity_storage()) {
        std::vector<double> scratch(ed);
        actual["tail.bin"] = read_array(base / "tail.bin", scratch.data(), ed);
    } else {
        actual["tail.bin"] = read_array(base / "tail.bin", params.tail_emb.data(), ed);
    }
    actual["rel_fwd.bin"] = read_array(base / "rel_fwd.bin", params.rel_fwd.data(), rd);
    actual["rel_inv.bin"] = read_array(base / "rel_inv.bin", params.rel_inv.data(), rd);

    for (const auto& [name, crc] : actual) {
        auto it = expected.find(name);
        if (it == expected.end()) throw FormatError("checksum.txt lacks entry for " + name);
        if (it->second != crc) {
            throw FormatError("checksum mismatch for " + name + ": recorded " + hex32(it->second) +
                              ", computed " + hex32(crc));
        }
    }
    return params;
}

}  // namespace kge
