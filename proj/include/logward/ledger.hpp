#pragma once

#include <cstdint>
#include <mutex>

namespace logward {

struct CostCounts {
    std::uint64_t llm_annotation_calls = 0;
    std::uint64_t llm_rca_calls = 0;
    std::uint64_t human_annotations = 0;
    std::uint64_t embedding_calls = 0;
    // The optional one-time human-labeled validation set is tracked apart
    // from human_annotations so pipeline-mode runs can assert the latter
    // stays zero.
    std::uint64_t validation_human_labels = 0;
};

// Audit counts of remote calls vs. human effort. Serialized appender:
// increments take a lock, reads snapshot under the same lock.
class CostLedger {
public:
    CostLedger() = default;

    void add_llm_annotation_calls(std::uint64_t n = 1) { bump(&CostCounts::llm_annotation_calls, n); }
    void add_llm_rca_calls(std::uint64_t n = 1) { bump(&CostCounts::llm_rca_calls, n); }
    void add_human_annotations(std::uint64_t n = 1) { bump(&CostCounts::human_annotations, n); }
    void add_embedding_calls(std::uint64_t n = 1) { bump(&CostCounts::embedding_calls, n); }
    void add_validation_human_labels(std::uint64_t n = 1) { bump(&CostCounts::validation_human_labels, n); }

    CostCounts snapshot() const {
        std::lock_guard lock(mutex_);
        return counts_;
    }

private:
    void bump(std::uint64_t CostCounts::* field, std::uint64_t n) {
        std::lock_guard lock(mutex_);
        counts_.*field += n;
    }

    mutable std::mutex mutex_;
    CostCounts counts_;
};

} // namespace logward
