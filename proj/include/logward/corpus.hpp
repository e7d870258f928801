#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "logward/errors.hpp"

namespace logward {

enum class Label { normal, anomalous };

inline const char* to_string(Label l) { return l == Label::normal ? "normal" : "anomalous"; }
Label label_from_string(const std::string& s);
inline Label flipped(Label l) { return l == Label::normal ? Label::anomalous : Label::normal; }

// One parsed log line. `message` is always a substring-style transform of
// `raw` (header removal only). `truth_label` is evaluation-only and absent
// for unlabeled corpora.
struct LogRecord {
    std::uint64_t id = 0;
    std::string raw;
    std::string message;
    std::optional<Label> truth_label;
};

struct LabelCounts {
    std::size_t benign = 0;
    std::size_t anomalous = 0;
    std::size_t unlabeled = 0;
    std::size_t total() const { return benign + anomalous + unlabeled; }
};

struct Corpus {
    std::string name;
    std::vector<LogRecord> records;

    LabelCounts counts() const;
    std::size_t size() const { return records.size(); }
};

// Header handling for raw log lines. `header_pattern` is a regex anchored at
// the start of the line; whatever it matches is stripped and the remainder is
// the message. `label_group` names the capture group holding the label column
// (0 = the format carries no label). The label token equal to `normal_token`
// maps to normal, anything else to anomalous, mirroring alert-category
// columns in supercomputer logs.
struct LineFormat {
    std::string header_pattern;
    int label_group = 0;
    std::string normal_token = "-";
};

enum class CorpusFileFormat { jsonl, labeled_lines };

LogRecord parse_log_line(const std::string& raw, const LineFormat& format, std::uint64_t id = 0);

// Loads a corpus. For labeled_lines, malformed lines are quarantined to
// `<path>.quarantine` (one "lineno<TAB>line" per row) instead of aborting;
// jsonl input is the canonical interchange format and must be clean.
Corpus load_corpus(const std::filesystem::path& path, CorpusFileFormat format,
                   const LineFormat& line_format = {});

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Reads a key-value corpus config file declaring the header pattern and
// label column (keys: header_pattern, label_group, normal_token).
LineFormat load_line_format(const std::filesystem::path& path);

struct TestSetSpec {
    std::size_t size = 0;
    double anomaly_rate = 0.0;
};

// Split request: test sets are drawn first at their exact anomaly rates
// (rounded to the nearest record), the training set takes `train_size`
// records from the remainder. A negative train_anomaly_rate means "take
// whatever is left" in original corpus order.
struct SplitSpec {
    std::size_t train_size = 0;
    double train_anomaly_rate = -1.0;
    std::vector<TestSetSpec> tests;
};

struct SplitResult {
    Corpus train;
    std::vector<Corpus> tests;
};

SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec, std::uint64_t seed);

} // namespace logward
