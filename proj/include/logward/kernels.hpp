#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace logward::kernels {

// Dense row-major matrix view used by the numeric kernels. `data` points at
// n*d doubles owned elsewhere.
struct MatrixView {
    const double* data = nullptr;
    std::size_t n = 0;
    std::size_t d = 0;
    const double* row(std::size_t i) const { return data + i * d; }
};

double squared_distance(const double* a, const double* b, std::size_t d);

// Nearest-centroid assignment under squared Euclidean distance, ties broken
// by lowest centroid index. Writes n cluster ids and n squared distances.
//
// The _omp variants produce bitwise-identical output to the serial ones for
// any thread count: every accumulation runs in a fixed order.
void assign_serial(const MatrixView& points, const MatrixView& centroids,
                   std::uint32_t* cluster_ids, double* sq_dists);
void assign_omp(const MatrixView& points, const MatrixView& centroids,
                std::uint32_t* cluster_ids, double* sq_dists);

// Mean update: centroid i becomes the mean of its members (accumulated in
// point order). Clusters with no members keep a zero vector; `counts`
// receives the member count per cluster. Parallel over clusters.
void centroid_update_serial(const MatrixView& points, const std::uint32_t* cluster_ids,
                            std::size_t k, double* centroids, std::size_t* counts);
void centroid_update_omp(const MatrixView& points, const std::uint32_t* cluster_ids,
                         std::size_t k, double* centroids, std::size_t* counts);

// Within-cluster sum of squares for a given assignment, accumulated per
// cluster in point order, then summed in cluster order.
double wcss_serial(const MatrixView& points, const MatrixView& centroids,
                   const std::uint32_t* cluster_ids);
double wcss_omp(const MatrixView& points, const MatrixView& centroids,
                const std::uint32_t* cluster_ids);

// Per-point silhouette scores under unsquared Euclidean distance:
// s = (b - a) / max(a, b), a = mean distance to same-cluster others,
// b = min over other clusters of the mean distance to that cluster.
// Points in singleton clusters score 0.
void silhouette_serial(const MatrixView& points, const std::uint32_t* cluster_ids,
                       std::size_t k, double* scores);
void silhouette_omp(const MatrixView& points, const std::uint32_t* cluster_ids,
                    std::size_t k, double* scores);

} // namespace logward::kernels
