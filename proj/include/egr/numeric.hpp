#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace growth {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pairwise (tree) summation. The reduction order depends only on the
/// length, so results are bit-stable across runs.
template <class F>
double pairwise_sum(std::size_t first, std::size_t last, F&& term) {
    const std::size_t n = last - first;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = first; i < last; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = first + n / 2;
    return pairwise_sum(first, mid, term) + pairwise_sum(mid, last, term);
}

inline double pairwise_sum(std::span<const double> x) {
    return pairwise_sum(0, x.size(), [&](std::size_t i) { return x[i]; });
}

/// log(sum_i exp(x_i)) with max subtraction. Returns -inf for an empty input
/// or when every term is -inf.
inline double log_sum_exp(std::span<const double> x) {
    double m = -kInf;
    for (double v : x) m = std::max(m, v);
    if (m == -kInf) return -kInf;
    if (m == kInf) return kInf;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

/// log(sum_{w_i > 0} w_i exp(x_i)). Entries with zero weight are skipped, so
/// x_i = -inf off the support is harmless.
inline double weighted_log_sum_exp(std::span<const double> w, std::span<const double> x) {
    double m = -kInf;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0.0) m = std::max(m, x[i]);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0.0) s += w[i] * std::exp(x[i] - m);
    return m + std::log(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// sum_{w_i > 0} w_i x_i, skipping zero weights (so 0 * inf never appears).
inline double support_dot(std::span<const double> w, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0.0) s += w[i] * x[i];
    return s;
}

}  // namespace growth
