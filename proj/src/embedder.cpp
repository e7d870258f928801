#include "logward/embedder.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "logward/rng.hpp"

namespace logward {

using nlohmann::json;

std::vector<double> l2_normalize(std::vector<double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq == 0.0) return v;
    double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
}

EmbeddingVector hash_projection_embed(std::string_view message, std::size_t d, std::uint64_t seed) {
    EmbeddingVector out;
    out.source = EmbeddingSource::local_hash;
    out.values.assign(d, 0.0);

    std::size_t start = std::string_view::npos;
    auto flush_token = [&](std::size_t end) {
        if (start == std::string_view::npos) return;
        std::string_view tok = message.substr(start, end - start);
        std::uint64_t h = hash_string(tok, seed);
        std::size_t idx = static_cast<std::size_t>(h % d);
        double sign = (h >> 63) ? 1.0 : -1.0;
        out.values[idx] += sign;
        start = std::string_view::npos;
    };
    for (std::size_t i = 0; i < message.size(); ++i) {
        if (std::isalnum(static_cast<unsigned char>(message[i]))) {
            if (start == std::string_view::npos) start = i;
        } else {
            flush_token(i);
        }
    }
    flush_token(message.size());

    out.values = l2_normalize(std::move(out.values));
    return out;
}

// ---------------------------------------------------------------------------
// HTTP client

namespace {

struct ParsedEndpoint {
    std::string base;   // scheme://host[:port]
    std::string prefix; // path prefix without trailing slash
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw RemoteUnavailable("endpoint must include a scheme: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path_start), prefix};
}

std::string api_key_from_env(const std::string& var) {
    if (var.empty()) return "";
    const char* v = std::getenv(var.c_str());
    return v ? v : "";
}

// Runs `send` up to 1+max_retries times with exponential backoff. `send`
// returns the body on success, nullopt on a retryable failure.
std::string with_retries(int max_retries, int base_ms,
                         const std::function<std::optional<std::string>(std::string&)>& send) {
    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(base_ms << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        if (auto body = send(last_error)) return *body;
    }
    throw RemoteUnavailable("remote endpoint unavailable after " + std::to_string(max_retries) +
                            " retries: " + last_error);
}

} // namespace

HttpEmbeddingClient::HttpEmbeddingClient(const EmbedderConfig& config, CostLedger* ledger)
    : model_(config.model_name),
      api_key_(api_key_from_env(config.api_key_env)),
      max_retries_(config.max_retries),
      retry_base_ms_(config.retry_base_ms),
      ledger_(ledger) {
    auto parsed = parse_endpoint(config.endpoint);
    base_url_ = parsed.base;
    path_prefix_ = parsed.prefix;
}

std::vector<std::vector<double>> HttpEmbeddingClient::embed(const std::vector<std::string>& inputs) {
    json payload{{"model", model_}, {"input", inputs}};
    std::string body = payload.dump();

    std::string response_body = with_retries(max_retries_, retry_base_ms_, [&](std::string& err) -> std::optional<std::string> {
        httplib::Client cli(base_url_);
        cli.set_connection_timeout(10);
        cli.set_read_timeout(60);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        if (ledger_) ledger_->add_embedding_calls();
        auto res = cli.Post(path_prefix_ + "/embeddings", headers, body, "application/json");
        if (!res) {
            err = "transport error: " + httplib::to_string(res.error());
            return std::nullopt;
        }
        if (res->status == 429 || res->status >= 500) {
            err = "http status " + std::to_string(res->status);
            return std::nullopt;
        }
        if (res->status != 200)
            throw RemoteUnavailable("embeddings endpoint returned status " + std::to_string(res->status) +
                                    ": " + res->body.substr(0, 200));
        return res->body;
    });

    json parsed;
    try {
        parsed = json::parse(response_body);
    } catch (const json::exception& e) {
        throw RemoteUnavailable(std::string("bad embeddings response: ") + e.what());
    }
    if (!parsed.contains("data") || !parsed["data"].is_array() || parsed["data"].size() != inputs.size())
        throw RemoteUnavailable("embeddings response shape mismatch");

    std::vector<std::vector<double>> vectors(inputs.size());
    for (const auto& item : parsed["data"]) {
        std::size_t index = item.at("index").get<std::size_t>();
        if (index >= vectors.size()) throw RemoteUnavailable("embeddings response index out of range");
        vectors[index] = item.at("embedding").get<std::vector<double>>();
    }
    return vectors;
}

// ---------------------------------------------------------------------------
// Cache

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    if (!in) throw IoError("cannot open embedding cache " + path_.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key;
        std::size_t dim = 0;
        ss >> key >> dim;
        std::vector<double> values(dim);
        for (std::size_t i = 0; i < dim; ++i) ss >> values[i];
        if (!ss) throw FormatError("corrupt embedding cache line in " + path_.string());
        entries_[key] = std::move(values);
    }
}

std::string EmbeddingCache::key_for(std::string_view model, std::string_view message) {
    std::uint64_t h1 = hash_string(message, hash_string(model));
    std::uint64_t h2 = hash_string(message, h1);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(h1), static_cast<unsigned long long>(h2));
    return buf;
}

std::optional<std::vector<double>> EmbeddingCache::lookup(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::stage(const std::string& key, std::vector<double> values) {
    std::lock_guard lock(mutex_);
    staged_[key] = std::move(values);
}

void EmbeddingCache::commit() {
    std::lock_guard lock(mutex_);
    if (staged_.empty()) return;
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::app);
        if (!out) throw IoError("cannot append to embedding cache " + path_.string());
        out.precision(17);
        for (const auto& [key, values] : staged_) {
            out << key << ' ' << values.size();
            for (double v : values) out << ' ' << v;
            out << '\n';
        }
        if (!out) throw IoError("write failure on embedding cache " + path_.string());
    }
    for (auto& [key, values] : staged_) entries_[key] = std::move(values);
    staged_.clear();
}

void EmbeddingCache::discard() {
    std::lock_guard lock(mutex_);
    staged_.clear();
}

std::size_t EmbeddingCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

// ---------------------------------------------------------------------------
// Embedder

Embedder::Embedder(EmbedderConfig config, std::shared_ptr<EmbeddingClient> client,
                   std::shared_ptr<EmbeddingCache> cache, CostLedger* ledger)
    : config_(std::move(config)), client_(std::move(client)), cache_(std::move(cache)), ledger_(ledger) {
    if (config_.dimension == 0) throw DimensionMismatch("embedding dimension must be positive");
    if (config_.batch_size == 0) config_.batch_size = 1;
    if (!cache_) cache_ = std::make_shared<EmbeddingCache>(config_.cache_path);
    if (config_.mode == EmbedderMode::remote && !client_)
        client_ = std::make_shared<HttpEmbeddingClient>(config_, ledger_);
}

std::vector<EmbeddingVector> Embedder::embed_batch(const std::vector<std::string>& messages,
                                                   const std::vector<std::uint64_t>& record_ids) {
    if (!record_ids.empty() && record_ids.size() != messages.size())
        throw LengthMismatch("record_ids must parallel messages");

    std::vector<EmbeddingVector> out(messages.size());

    if (config_.mode == EmbedderMode::local_hash) {
        const long n = static_cast<long>(messages.size());
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) {
            auto idx = static_cast<std::size_t>(i);
            out[idx] = hash_projection_embed(messages[idx], config_.dimension, config_.seed);
            out[idx].record_id = record_ids.empty() ? idx : record_ids[idx];
        }
        return out;
    }

    // Remote: resolve cache hits, then fetch misses in bounded-parallel
    // batches. Nothing is committed to the cache unless every batch succeeds.
    std::vector<std::string> keys(messages.size());
    std::vector<std::size_t> misses;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        keys[i] = EmbeddingCache::key_for(config_.model_name, messages[i]);
        if (auto hit = cache_->lookup(keys[i])) {
            out[i].values = std::move(*hit);
            out[i].record_id = record_ids.empty() ? i : record_ids[i];
            out[i].source = EmbeddingSource::remote;
        } else {
            misses.push_back(i);
        }
    }

    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t at = 0; at < misses.size(); at += config_.batch_size) {
        auto end = std::min(misses.size(), at + config_.batch_size);
        batches.emplace_back(misses.begin() + static_cast<long>(at), misses.begin() + static_cast<long>(end));
    }

    try {
        for (std::size_t at = 0; at < batches.size(); at += config_.max_parallel) {
            std::size_t end = std::min(batches.size(), at + config_.max_parallel);
            std::vector<std::future<std::vector<std::vector<double>>>> inflight;
            for (std::size_t b = at; b < end; ++b) {
                inflight.push_back(std::async(std::launch::async, [this, &messages, &batches, b] {
                    std::vector<std::string> inputs;
                    inputs.reserve(batches[b].size());
                    for (std::size_t i : batches[b]) inputs.push_back(messages[i]);
                    return client_->embed(inputs);
                }));
            }
            for (std::size_t b = at; b < end; ++b) {
                auto vectors = inflight[b - at].get();
                const auto& batch = batches[b];
                for (std::size_t j = 0; j < batch.size(); ++j) {
                    if (vectors[j].size() != config_.dimension)
                        throw DimensionMismatch("endpoint returned dimension " + std::to_string(vectors[j].size()) +
                                                ", expected " + std::to_string(config_.dimension));
                    std::size_t i = batch[j];
                    std::vector<double> values = config_.normalize ? l2_normalize(std::move(vectors[j]))
                                                                   : std::move(vectors[j]);
                    cache_->stage(keys[i], values);
                    out[i].values = std::move(values);
                    out[i].record_id = record_ids.empty() ? i : record_ids[i];
                    out[i].source = EmbeddingSource::remote;
                }
            }
        }
    } catch (...) {
        cache_->discard();
        throw;
    }
    cache_->commit();
    return out;
}

std::vector<EmbeddingVector> Embedder::embed_corpus(const Corpus& corpus) {
    std::vector<std::string> messages;
    std::vector<std::uint64_t> ids;
    messages.reserve(corpus.size());
    ids.reserve(corpus.size());
    for (const auto& r : corpus.records) {
        messages.push_back(r.message);
        ids.push_back(r.id);
    }
    return embed_batch(messages, ids);
}

std::vector<double> embedding_matrix(const std::vector<EmbeddingVector>& embeddings, std::size_t* dim) {
    if (embeddings.empty()) {
        if (dim) *dim = 0;
        return {};
    }
    std::size_t d = embeddings.front().values.size();
    std::vector<double> m;
    m.reserve(embeddings.size() * d);
    for (const auto& e : embeddings) {
        if (e.values.size() != d)
            throw DimensionMismatch("embedding dimensions differ within one run: " +
                                    std::to_string(e.values.size()) + " vs " + std::to_string(d));
        m.insert(m.end(), e.values.begin(), e.values.end());
    }
    if (dim) *dim = d;
    return m;
}

void save_embeddings(const std::vector<EmbeddingVector>& embeddings, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.precision(17);
    for (const auto& e : embeddings) {
        out << e.record_id << ' ' << (e.source == EmbeddingSource::remote ? "remote" : "local-hash") << ' '
            << e.values.size();
        for (double v : e.values) out << ' ' << v;
        out << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

std::vector<EmbeddingVector> load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<EmbeddingVector> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        EmbeddingVector e;
        std::string source;
        std::size_t dim = 0;
        ss >> e.record_id >> source >> dim;
        e.source = source == "remote" ? EmbeddingSource::remote : EmbeddingSource::local_hash;
        e.values.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) ss >> e.values[i];
        if (!ss) throw FormatError("corrupt embeddings line in " + path.string());
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace logward
