#include "logward/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace logward::kernels {

double squared_distance(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

namespace {

inline void assign_point(const MatrixView& points, const MatrixView& centroids, std::size_t i,
                         std::uint32_t* cluster_ids, double* sq_dists) {
    const double* p = points.row(i);
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_c = 0;
    for (std::size_t c = 0; c < centroids.n; ++c) {
        double dist = squared_distance(p, centroids.row(c), points.d);
        if (dist < best) {
            best = dist;
            best_c = static_cast<std::uint32_t>(c);
        }
    }
    cluster_ids[i] = best_c;
    sq_dists[i] = best;
}

} // namespace

void assign_serial(const MatrixView& points, const MatrixView& centroids,
                   std::uint32_t* cluster_ids, double* sq_dists) {
    for (std::size_t i = 0; i < points.n; ++i)
        assign_point(points, centroids, i, cluster_ids, sq_dists);
}

void assign_omp(const MatrixView& points, const MatrixView& centroids,
                std::uint32_t* cluster_ids, double* sq_dists) {
    const long n = static_cast<long>(points.n);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        assign_point(points, centroids, static_cast<std::size_t>(i), cluster_ids, sq_dists);
}

namespace {

// Accumulates the mean for one cluster by scanning all points in index
// order. Parallelizing over clusters keeps the summation order fixed, so
// serial and omp results match bitwise.
inline void update_one_cluster(const MatrixView& points, const std::uint32_t* cluster_ids,
                               std::size_t c, double* centroid, std::size_t* count) {
    const std::size_t d = points.d;
    std::memset(centroid, 0, d * sizeof(double));
    std::size_t members = 0;
    for (std::size_t i = 0; i < points.n; ++i) {
        if (cluster_ids[i] != c) continue;
        const double* p = points.row(i);
        for (std::size_t j = 0; j < d; ++j) centroid[j] += p[j];
        ++members;
    }
    if (members > 0)
        for (std::size_t j = 0; j < d; ++j) centroid[j] /= static_cast<double>(members);
    *count = members;
}

} // namespace

void centroid_update_serial(const MatrixView& points, const std::uint32_t* cluster_ids,
                            std::size_t k, double* centroids, std::size_t* counts) {
    for (std::size_t c = 0; c < k; ++c)
        update_one_cluster(points, cluster_ids, c, centroids + c * points.d, counts + c);
}

void centroid_update_omp(const MatrixView& points, const std::uint32_t* cluster_ids,
                         std::size_t k, double* centroids, std::size_t* counts) {
    const long kk = static_cast<long>(k);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < kk; ++c)
        update_one_cluster(points, cluster_ids, static_cast<std::size_t>(c),
                           centroids + static_cast<std::size_t>(c) * points.d,
                           counts + static_cast<std::size_t>(c));
}

namespace {

inline double wcss_one_cluster(const MatrixView& points, const MatrixView& centroids,
                               const std::uint32_t* cluster_ids, std::size_t c) {
    const double* mu = centroids.row(c);
    double acc = 0.0;
    for (std::size_t i = 0; i < points.n; ++i)
        if (cluster_ids[i] == c) acc += squared_distance(points.row(i), mu, points.d);
    return acc;
}

} // namespace

double wcss_serial(const MatrixView& points, const MatrixView& centroids,
                   const std::uint32_t* cluster_ids) {
    double total = 0.0;
    for (std::size_t c = 0; c < centroids.n; ++c)
        total += wcss_one_cluster(points, centroids, cluster_ids, c);
    return total;
}

double wcss_omp(const MatrixView& points, const MatrixView& centroids,
                const std::uint32_t* cluster_ids) {
    std::vector<double> per_cluster(centroids.n, 0.0);
    const long kk = static_cast<long>(centroids.n);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < kk; ++c)
        per_cluster[static_cast<std::size_t>(c)] =
            wcss_one_cluster(points, centroids, cluster_ids, static_cast<std::size_t>(c));
    double total = 0.0;
    for (double v : per_cluster) total += v;
    return total;
}

namespace {

inline double silhouette_point(const MatrixView& points, const std::uint32_t* cluster_ids,
                               std::size_t k, std::size_t i,
                               std::vector<double>& dist_sum, std::vector<std::size_t>& counts) {
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    const double* p = points.row(i);
    for (std::size_t l = 0; l < points.n; ++l) {
        if (l == i) continue;
        std::uint32_t c = cluster_ids[l];
        dist_sum[c] += std::sqrt(squared_distance(p, points.row(l), points.d));
        ++counts[c];
    }
    const std::uint32_t own = cluster_ids[i];
    if (counts[own] == 0) return 0.0; // singleton cluster convention
    double a = dist_sum[own] / static_cast<double>(counts[own]);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        if (c == own || counts[c] == 0) continue;
        b = std::min(b, dist_sum[c] / static_cast<double>(counts[c]));
    }
    if (!std::isfinite(b)) return 0.0; // no other non-empty cluster
    double denom = std::max(a, b);
    return denom > 0.0 ? (b - a) / denom : 0.0;
}

} // namespace

void silhouette_serial(const MatrixView& points, const std::uint32_t* cluster_ids,
                       std::size_t k, double* scores) {
    std::vector<double> dist_sum(k);
    std::vector<std::size_t> counts(k);
    for (std::size_t i = 0; i < points.n; ++i)
        scores[i] = silhouette_point(points, cluster_ids, k, i, dist_sum, counts);
}

void silhouette_omp(const MatrixView& points, const std::uint32_t* cluster_ids,
                    std::size_t k, double* scores) {
    const long n = static_cast<long>(points.n);
#pragma omp parallel
    {
        std::vector<double> dist_sum(k);
        std::vector<std::size_t> counts(k);
#pragma omp for schedule(static)
        for (long i = 0; i < n; ++i)
            scores[i] = silhouette_point(points, cluster_ids, k, static_cast<std::size_t>(i),
                                         dist_sum, counts);
    }
}

} // namespace logward::kernels
