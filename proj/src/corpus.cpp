#include "logward/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "logward/rng.hpp"

namespace logward {

using nlohmann::json;

Label label_from_string(const std::string& s) {
    if (s == "normal") return Label::normal;
    if (s == "anomalous") return Label::anomalous;
    throw FormatError("unknown label: '" + s + "'");
}

LabelCounts Corpus::counts() const {
    LabelCounts c;
    for (const auto& r : records) {
        if (!r.truth_label)
            ++c.unlabeled;
        else if (*r.truth_label == Label::normal)
            ++c.benign;
        else
            ++c.anomalous;
    }
    return c;
}

LogRecord parse_log_line(const std::string& raw, const LineFormat& format, std::uint64_t id) {
    if (raw.empty()) throw MalformedLine("empty log line");

    LogRecord rec;
    rec.id = id;
    rec.raw = raw;

    if (format.header_pattern.empty()) {
        rec.message = raw;
        return rec;
    }

    std::regex re;
    try {
        re.assign(format.header_pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
        throw FormatError(std::string("bad header pattern: ") + e.what());
    }

    std::smatch m;
    if (!std::regex_search(raw, m, re, std::regex_constants::match_continuous))
        throw MalformedLine("header pattern does not match: " + raw.substr(0, 80));

    rec.message = raw.substr(m.length(0));
    // Strip the single space that usually separates header from content.
    if (!rec.message.empty() && rec.message.front() == ' ') rec.message.erase(0, 1);

    if (format.label_group > 0) {
        if (format.label_group >= static_cast<int>(m.size()) || !m[format.label_group].matched)
            throw MalformedLine("label column missing: " + raw.substr(0, 80));
        rec.truth_label = (m[format.label_group].str() == format.normal_token)
                              ? Label::normal
                              : Label::anomalous;
    }
    return rec;
}

namespace {

LogRecord record_from_json(const std::string& line, std::size_t lineno) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("raw") || !j.contains("message"))
        throw FormatError("line " + std::to_string(lineno) + ": record needs id, raw, message");

    LogRecord rec;
    rec.id = j.at("id").get<std::uint64_t>();
    rec.raw = j.at("raw").get<std::string>();
    rec.message = j.at("message").get<std::string>();
    if (j.contains("truth_label") && !j.at("truth_label").is_null())
        rec.truth_label = label_from_string(j.at("truth_label").get<std::string>());
    if (rec.raw.empty())
        throw FormatError("line " + std::to_string(lineno) + ": empty raw field");
    return rec;
}

} // namespace

Corpus load_corpus(const std::filesystem::path& path, CorpusFileFormat format,
                   const LineFormat& line_format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    Corpus corpus;
    corpus.name = path.stem().string();

    std::ofstream quarantine; // opened lazily on first bad line
    std::string line;
    std::size_t lineno = 0;
    std::uint64_t next_id = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (format == CorpusFileFormat::jsonl) {
            LogRecord rec = record_from_json(line, lineno);
            // Ids must be unique and ascending; freshly ingested corpora are
            // dense from 0, split subsets keep their parent ids.
            if (!corpus.records.empty() && rec.id <= corpus.records.back().id)
                throw FormatError("line " + std::to_string(lineno) + ": ids must be strictly ascending, got " +
                                  std::to_string(rec.id) + " after " + std::to_string(corpus.records.back().id));
            corpus.records.push_back(std::move(rec));
        } else {
            try {
                corpus.records.push_back(parse_log_line(line, line_format, next_id));
                ++next_id;
            } catch (const MalformedLine&) {
                if (!quarantine.is_open()) {
                    quarantine.open(path.string() + ".quarantine");
                    if (!quarantine) throw IoError("cannot open quarantine sidecar for " + path.string());
                }
                quarantine << lineno << '\t' << line << '\n';
            }
        }
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& r : corpus.records) {
        json j{{"id", r.id}, {"raw", r.raw}, {"message", r.message}};
        if (r.truth_label) j["truth_label"] = to_string(*r.truth_label);
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

LineFormat load_line_format(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    LineFormat fmt;
    fmt.header_pattern.clear();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            auto end = s.find_last_not_of(" \t");
            s.erase(end == std::string::npos ? 0 : end + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "header_pattern")
            fmt.header_pattern = value;
        else if (key == "label_group")
            fmt.label_group = std::stoi(value);
        else if (key == "normal_token")
            fmt.normal_token = value;
        else
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return fmt;
}

namespace {

// Draws `n` ids from the front of `pool` (already shuffled), erasing them.
std::vector<std::size_t> take(std::vector<std::size_t>& pool, std::size_t n) {
    std::vector<std::size_t> out(pool.begin(), pool.begin() + static_cast<long>(n));
    pool.erase(pool.begin(), pool.begin() + static_cast<long>(n));
    return out;
}

// Split outputs keep their parent's record ids so the outputs stay a
// verifiable partition of the input.
Corpus subset(const Corpus& corpus, std::vector<std::size_t> idx, const std::string& name) {
    std::sort(idx.begin(), idx.end());
    Corpus out;
    out.name = name;
    out.records.reserve(idx.size());
    for (std::size_t i : idx) out.records.push_back(corpus.records[i]);
    return out;
}

} // namespace

SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec, std::uint64_t seed) {
    std::vector<std::size_t> benign, anomalous;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        const auto& r = corpus.records[i];
        if (!r.truth_label) continue;
        (*r.truth_label == Label::normal ? benign : anomalous).push_back(i);
    }

    Rng rng(mix_seed(seed, 11));
    shuffle(benign, rng);
    shuffle(anomalous, rng);

    SplitResult result;
    std::size_t test_no = 0;
    for (const auto& t : spec.tests) {
        std::size_t want_anomalous = static_cast<std::size_t>(std::llround(t.anomaly_rate * static_cast<double>(t.size)));
        std::size_t want_benign = t.size - want_anomalous;
        if (want_anomalous > anomalous.size() || want_benign > benign.size())
            throw InfeasibleSplit("test set " + std::to_string(test_no) + " needs " +
                                  std::to_string(want_anomalous) + " anomalous + " +
                                  std::to_string(want_benign) + " benign, have " +
                                  std::to_string(anomalous.size()) + "/" + std::to_string(benign.size()));
        auto idx = take(anomalous, want_anomalous);
        auto b = take(benign, want_benign);
        idx.insert(idx.end(), b.begin(), b.end());
        result.tests.push_back(subset(corpus, std::move(idx), corpus.name + ".test" + std::to_string(test_no)));
        ++test_no;
    }

    std::vector<std::size_t> train_idx;
    if (spec.train_anomaly_rate >= 0.0) {
        std::size_t want_anomalous =
            static_cast<std::size_t>(std::llround(spec.train_anomaly_rate * static_cast<double>(spec.train_size)));
        std::size_t want_benign = spec.train_size - want_anomalous;
        if (want_anomalous > anomalous.size() || want_benign > benign.size())
            throw InfeasibleSplit("train set needs " + std::to_string(want_anomalous) + " anomalous + " +
                                  std::to_string(want_benign) + " benign, have " +
                                  std::to_string(anomalous.size()) + "/" + std::to_string(benign.size()));
        train_idx = take(anomalous, want_anomalous);
        auto b = take(benign, want_benign);
        train_idx.insert(train_idx.end(), b.begin(), b.end());
    } else {
        std::vector<std::size_t> rest;
        rest.insert(rest.end(), benign.begin(), benign.end());
        rest.insert(rest.end(), anomalous.begin(), anomalous.end());
        // Unlabeled records are usable for unconstrained training sets.
        for (std::size_t i = 0; i < corpus.records.size(); ++i)
            if (!corpus.records[i].truth_label) rest.push_back(i);
        if (spec.train_size > rest.size())
            throw InfeasibleSplit("train set needs " + std::to_string(spec.train_size) + " records, " +
                                  std::to_string(rest.size()) + " remain");
        shuffle(rest, rng);
        train_idx.assign(rest.begin(), rest.begin() + static_cast<long>(spec.train_size));
    }
    result.train = subset(corpus, std::move(train_idx), corpus.name + ".train");
    return result;
}

} // namespace logward
