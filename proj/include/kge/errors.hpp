#pragma once

#include <stdexcept>
#include <string>

namespace kge {

/// Malformed input file (triple TSV, rule file, ground-truth file).
/// Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Name not present in a fixed vocabulary.
class VocabError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rule references an unknown relation or conflicts with another rule.
class RuleError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes disagree.
class DimensionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Entity or relation id out of range for the parameter storage.
class IndexError : public std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Checkpoint is unreadable: bad meta, version mismatch, truncated
/// array file, or checksum failure.
class FormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Checkpoint and dataset disagree (entity/relation counts differ).
class CompatibilityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int epoch, std::size_t batch_index)
        : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batch_index)),
          epoch_(epoch),
          batch_index_(batch_index) {}
    int epoch() const { return epoch_; }
    std::size_t batch_index() const { return batch_index_; }

private:
    int epoch_;
    std::size_t batch_index_;
};

}  // namespace kge
