#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logward/corpus.hpp"
#include "logward/errors.hpp"
#include "logward/ledger.hpp"

namespace logward {

enum class EmbeddingSource { remote, local_hash };

// Fixed-dimension semantic vector for one log message.
struct EmbeddingVector {
    std::vector<double> values;
    std::uint64_t record_id = 0;
    EmbeddingSource source = EmbeddingSource::local_hash;
};

enum class EmbedderMode { remote, local_hash };

struct EmbedderConfig {
    EmbedderMode mode = EmbedderMode::local_hash;
    std::string endpoint;                  // remote: base URL, e.g. http://host:port/v1
    std::string model_name = "local-hash";
    std::size_t dimension = 64;
    std::size_t batch_size = 64;
    std::size_t max_parallel = 4;          // bounded in-flight batch requests
    std::uint64_t seed = 0;                // local-hash only
    bool normalize = false;                // L2-normalize remote vectors (local are unit norm already)
    std::string api_key_env = "LOGWARD_API_KEY";
    std::filesystem::path cache_path;      // empty = in-memory only
    int max_retries = 3;
    int retry_base_ms = 200;
};

// L2-normalizes v; the zero vector passes through unchanged.
std::vector<double> l2_normalize(std::vector<double> v);

// Deterministic offline embedding: signed bag-of-words hashing into d
// buckets, L2-normalized. A message with no alphanumeric tokens maps to the
// zero vector.
EmbeddingVector hash_projection_embed(std::string_view message, std::size_t d, std::uint64_t seed);

// One embeddings request; throws RemoteUnavailable on transport failure.
class EmbeddingClient {
public:
    virtual ~EmbeddingClient() = default;
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs) = 0;
};

// OpenAI-style embeddings endpoint: POST {model, input:[...]} to
// <endpoint>/embeddings, bearer token from the configured environment
// variable, ordered vectors back under data[i].embedding.
class HttpEmbeddingClient : public EmbeddingClient {
public:
    explicit HttpEmbeddingClient(const EmbedderConfig& config, CostLedger* ledger = nullptr);
    std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs) override;

private:
    std::string base_url_;
    std::string path_prefix_;
    std::string model_;
    std::string api_key_;
    int max_retries_;
    int retry_base_ms_;
    CostLedger* ledger_;
};

// Disk-backed embedding cache, one "key dim v0 v1 ..." record per line.
// Concurrent readers, serialized writes. New entries are staged and only
// reach memory and disk on commit(), so a failed batch persists nothing.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::filesystem::path path = {});

    static std::string key_for(std::string_view model, std::string_view message);

    std::optional<std::vector<double>> lookup(const std::string& key) const;
    void stage(const std::string& key, std::vector<double> values);
    void commit();
    void discard();
    std::size_t size() const;

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::map<std::string, std::vector<double>> entries_;
    std::map<std::string, std::vector<double>> staged_;
};

class Embedder {
public:
    explicit Embedder(EmbedderConfig config,
                      std::shared_ptr<EmbeddingClient> client = nullptr,
                      std::shared_ptr<EmbeddingCache> cache = nullptr,
                      CostLedger* ledger = nullptr);

    // One vector per message, order-preserving. record_ids, when given, must
    // parallel messages.
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& messages,
                                             const std::vector<std::uint64_t>& record_ids = {});

    std::vector<EmbeddingVector> embed_corpus(const Corpus& corpus);

    const EmbedderConfig& config() const { return config_; }
    EmbeddingCache& cache() { return *cache_; }

private:
    EmbedderConfig config_;
    std::shared_ptr<EmbeddingClient> client_;
    std::shared_ptr<EmbeddingCache> cache_;
    CostLedger* ledger_;
};

// Flattens embeddings into a row-major matrix (all vectors must share one
// dimension; DimensionMismatch otherwise).
std::vector<double> embedding_matrix(const std::vector<EmbeddingVector>& embeddings, std::size_t* dim);

void save_embeddings(const std::vector<EmbeddingVector>& embeddings, const std::filesystem::path& path);
std::vector<EmbeddingVector> load_embeddings(const std::filesystem::path& path);

} // namespace logward
