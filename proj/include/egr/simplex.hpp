#pragma once

// Points of the closed unit simplex and the closure / perturbation / powering
// operations that turn the open simplex into a vector space.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "egr/error.hpp"

namespace growth {

using Vector = std::vector<double>;
using IndexSet = std::vector<std::size_t>;

inline constexpr double kSimplexSumTol = 1e-12;

/// A point of the closed simplex. Entries are nonnegative and sum to one
/// within 1e-12; the support is the set of strictly positive entries.
class Weights {
public:
    explicit Weights(Vector w) : w_(std::move(w)) {
        detail::require(!w_.empty(), ErrorCode::InvalidArgument, "weights must have length >= 1");
        double s = 0.0;
        for (double v : w_) {
            detail::require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument,
                            "weights must be finite and nonnegative");
            s += v;
        }
        detail::require(std::abs(s - 1.0) <= kSimplexSumTol, ErrorCode::InvalidArgument,
                        "weights must sum to 1");
    }

    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    std::span<const double> values() const noexcept { return w_; }
    operator std::span<const double>() const noexcept { return w_; }
    const Vector& vec() const noexcept { return w_; }

    bool in_support(std::size_t i) const { return w_[i] > 0.0; }

    IndexSet support() const {
        IndexSet s;
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] > 0.0) s.push_back(i);
        return s;
    }

    /// True when every entry is strictly positive (open simplex).
    bool interior() const {
        for (double v : w_)
            if (!(v > 0.0)) return false;
        return true;
    }

    friend bool operator==(const Weights&, const Weights&) = default;

private:
    Vector w_;
};

inline IndexSet support(std::span<const double> x) {
    IndexSet s;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0) s.push_back(i);
    return s;
}

inline Weights barycenter(std::size_t n) {
    detail::require(n >= 1, ErrorCode::InvalidArgument, "barycenter needs n >= 1");
    return Weights(Vector(n, 1.0 / static_cast<double>(n)));
}

inline Vector hadamard(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size(), ErrorCode::DimensionMismatch, "hadamard: length mismatch");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
    return out;
}

inline Vector comp_inverse(std::span<const double> x) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        detail::require(x[i] > 0.0, ErrorCode::BoundaryPoint, "comp_inverse: entry is not positive");
        out[i] = 1.0 / x[i];
    }
    return out;
}

namespace detail {

// Normalizes x over the support of ref. The sum is taken in two passes so the
// output sums to one to within a few ulps.
inline Weights close_on(std::span<const double> x, std::span<const double> ref) {
    require(x.size() == ref.size(), ErrorCode::DimensionMismatch, "closure: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(ref[i] > 0.0)) continue;
        require(std::isfinite(x[i]) && x[i] >= 0.0, ErrorCode::DomainViolation,
                "closure: entries on the support must be finite and nonnegative");
        require(x[i] > 0.0, ErrorCode::ZeroOnSupport, "closure: zero entry on the support");
        s += x[i];
    }
    Vector out(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (ref[i] > 0.0) out[i] = x[i] / s;
    // Renormalize once more: x_i / s can drift by a few ulps in long vectors.
    double t = 0.0;
    for (double v : out) t += v;
    for (double& v : out) v /= t;
    return Weights(std::move(out));
}

}  // namespace detail

/// Closure with respect to the support of ref: zero off supp(ref), normalized
/// on it. Throws ZeroOnSupport if x vanishes somewhere on supp(ref).
inline Weights closure(std::span<const double> x, const Weights& ref) {
    return detail::close_on(x, ref.values());
}

/// Closure over all coordinates; every entry must be strictly positive.
inline Weights closure(std::span<const double> x) {
    const Vector full(x.size(), 1.0);
    return detail::close_on(x, full);
}

/// x (+)_ref y : closure of the componentwise product on supp(ref).
inline Weights perturb(std::span<const double> x, std::span<const double> y, const Weights& ref) {
    detail::require(x.size() == ref.size() && y.size() == ref.size(), ErrorCode::DimensionMismatch,
                    "perturb: length mismatch");
    return closure(hadamard(x, y), ref);
}

inline Weights perturb(std::span<const double> x, std::span<const double> y) {
    return closure(hadamard(x, y));
}

/// x (-)_ref y : closure of x / y on supp(ref).
inline Weights subtract(std::span<const double> x, std::span<const double> y, const Weights& ref) {
    detail::require(x.size() == ref.size() && y.size() == ref.size(), ErrorCode::DimensionMismatch,
                    "subtract: length mismatch");
    Vector ratio(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!ref.in_support(i)) continue;
        detail::require(y[i] > 0.0, ErrorCode::ZeroOnSupport, "subtract: zero divisor on the support");
        ratio[i] = x[i] / y[i];
    }
    return closure(ratio, ref);
}

inline Weights subtract(std::span<const double> x, std::span<const double> y) {
    return closure(hadamard(x, comp_inverse(y)));
}

/// alpha (x) x : closure of x_i^alpha. Defined on the open simplex only.
inline Weights power(double alpha, std::span<const double> x) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        detail::require(x[i] > 0.0, ErrorCode::BoundaryPoint, "power: point is on the boundary");
        out[i] = std::pow(x[i], alpha);
    }
    return closure(out);
}

/// Outer weights, one inner weight vector per outer coordinate, and an
/// optional per-block scale (a currency conversion factor in finance terms).
struct CompositeSpec {
    Weights outer;
    std::vector<Weights> blocks;
    std::optional<Vector> scale;

    void validate() const {
        detail::require(blocks.size() == outer.size(), ErrorCode::DimensionMismatch,
                        "composite: number of blocks must equal the outer length");
        if (scale) {
            detail::require(scale->size() == outer.size(), ErrorCode::DimensionMismatch,
                            "composite: scale length must equal the outer length");
            for (std::size_t i = 0; i < outer.size(); ++i) {
                detail::require(std::isfinite((*scale)[i]) && (*scale)[i] >= 0.0, ErrorCode::DomainViolation,
                                "composite: scale must be nonnegative");
                if (outer.in_support(i))
                    detail::require((*scale)[i] > 0.0, ErrorCode::DomainViolation,
                                    "composite: scale must be positive on the outer support");
            }
        }
    }

    std::size_t total_size() const {
        std::size_t k = 0;
        for (const auto& b : blocks) k += b.size();
        return k;
    }
};

/// The block product (outer_1 p^1, ..., outer_n p^n).
inline Weights composite(const CompositeSpec& spec) {
    spec.validate();
    Vector out;
    out.reserve(spec.total_size());
    for (std::size_t i = 0; i < spec.outer.size(); ++i)
        for (double p : spec.blocks[i].values()) out.push_back(spec.outer[i] * p);
    return Weights(std::move(out));
}

}  // namespace growth
