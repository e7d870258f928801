#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "logward/embedder.hpp"

namespace logward {

// Fitted k-means model: k centroids in row-major layout plus fit metadata.
// wcss_history holds the objective after each (assign, update) pair and is
// non-increasing by construction.
struct ClusterModel {
    std::vector<double> centroids; // k * dim, row-major
    std::size_t k = 0;
    std::size_t dim = 0;
    std::size_t iterations_run = 0;
    bool converged = false;
    bool degenerate = false; // all inputs identical; centroids are k duplicates
    std::uint64_t seed = 0;
    std::vector<double> wcss_history;

    const double* centroid(std::size_t i) const { return centroids.data() + i * dim; }
};

struct Assignment {
    std::uint64_t record_id = 0;
    std::uint32_t cluster_id = 0;
    double distance = 0.0; // Euclidean distance to the assigned centroid
};

struct KMeansOptions {
    bool greedy_init = false;   // farthest-point spread instead of uniform sampling
    std::size_t n_restarts = 1; // best-of-WCSS over seeded restarts
};

struct KMeansResult {
    ClusterModel model;
    std::vector<Assignment> assignments;
};

KMeansResult kmeans_fit(const std::vector<EmbeddingVector>& embeddings, std::size_t k,
                        std::size_t max_iter, std::uint64_t seed, const KMeansOptions& options = {});

Assignment assign(const ClusterModel& model, const EmbeddingVector& e);

std::vector<Assignment> assign_all(const ClusterModel& model,
                                   const std::vector<EmbeddingVector>& embeddings);

double wcss(const ClusterModel& model, const std::vector<EmbeddingVector>& embeddings,
            const std::vector<Assignment>& assignments);

// Mean silhouette over all points; per-point scores optionally returned.
// Requires at least two non-empty clusters.
double silhouette_mean(const std::vector<EmbeddingVector>& embeddings,
                       const std::vector<Assignment>& assignments,
                       std::vector<double>* per_point = nullptr);

struct KSelectionRow {
    std::size_t k = 0;
    double wcss = 0.0;
    double mean_silhouette = 0.0;
};

struct KSelectionReport {
    std::vector<KSelectionRow> rows;
    std::size_t elbow_k = 0;
    std::size_t silhouette_k = 0;
    std::size_t chosen_k = 0;
};

struct SelectKOptions {
    std::size_t n_restarts = 3;
    std::size_t max_iter = 300;
    // Mean silhouette is O(n^2); above this many points it is evaluated on a
    // seeded uniform subsample. 0 disables subsampling.
    std::size_t silhouette_sample = 2000;
    bool greedy_init = false;
};

// Fits k-means for every k in [k_min, k_max], picks the elbow by maximal
// chord distance on the (k, WCSS) curve and the silhouette peak, and chooses
// between them: silhouette_k when the two agree to within 2, else elbow_k.
KSelectionReport select_k(const std::vector<EmbeddingVector>& embeddings, std::size_t k_min,
                          std::size_t k_max, std::uint64_t seed, const SelectKOptions& options = {});

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel load_cluster_model(const std::filesystem::path& path);

void save_assignments(const std::vector<Assignment>& assignments, const std::filesystem::path& path);
std::vector<Assignment> load_assignments(const std::filesystem::path& path);

void save_k_selection_report(const KSelectionReport& report, const std::filesystem::path& path);

} // namespace logward
