#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "egr/core.hpp"
#include "egr/error.hpp"
#include "egr/numeric.hpp"
#include "egr/random.hpp"
#include "egr/simplex.hpp"

namespace growth {

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b) {
    require(a == b, ErrorCode::DimensionMismatch, "length mismatch");
}

inline void require_interior(std::span<const double> p) {
    for (double v : p) require(v > 0.0, ErrorCode::BoundaryPoint, "point must lie in the open simplex");
}

// Dirichlet(1,...,1) point, used for construction-time checks.
inline Weights uniform_simplex_point(Stream& s, std::size_t n) {
    Vector e(n);
    for (double& v : e) v = -std::log(s.uniform());
    return closure(e);
}

}  // namespace detail

/// H(p || q). +inf when supp(p) is not contained in supp(q).
inline double relative_entropy(const Weights& p, const Weights& q) {
    detail::require_same_size(p.size(), q.size());
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p.in_support(i)) continue;
        if (!q.in_support(i)) return kInf;
        h += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(h, 0.0);
}

inline double cross_entropy(const Weights& p, const Weights& q) {
    detail::require_same_size(p.size(), q.size());
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p.in_support(i)) continue;
        detail::require(q.in_support(i), ErrorCode::DomainViolation, "cross entropy: q vanishes on supp(p)");
        h -= p[i] * std::log(q[i]);
    }
    return h;
}

inline double shannon_entropy(const Weights& p) {
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.in_support(i)) h -= p[i] * std::log(p[i]);
    return h;
}

/// Discrete Renyi divergence of order alpha (alpha > 0, alpha != 1).
inline double renyi_divergence(double alpha, const Weights& p, const Weights& q) {
    detail::require(alpha > 0.0 && alpha != 1.0 && std::isfinite(alpha), ErrorCode::InvalidArgument,
                    "renyi order must be positive and different from 1");
    detail::require_same_size(p.size(), q.size());
    const double a1 = alpha - 1.0;
    // log sum p_i exp((alpha-1) log(p_i/q_i)).
    Vector t(p.size(), -kInf);
    double tmax = -kInf;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p.in_support(i)) continue;
        detail::require(q.in_support(i), ErrorCode::DomainViolation, "renyi divergence: supp(p) not in supp(q)");
        t[i] = a1 * std::log(p[i] / q[i]);
        tmax = std::max(tmax, t[i]);
    }
    double lg;
    if (std::abs(tmax) <= 1.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p.in_support(i)) s += p[i] * std::expm1(t[i]);
        lg = std::log1p(s);
    } else {
        lg = weighted_log_sum_exp(p.values(), t);
    }
    return std::max(lg / a1, 0.0);
}

/// (Gamma(pi, r), H(pi || pi (+)_pi r)) for r positive on supp(pi).
inline std::pair<double, double> egr_identity(const Weights& pi, std::span<const double> r) {
    return {egr(pi, r), relative_entropy(pi, perturb(pi.values(), r, pi))};
}

/// (Gamma(pi, r (-)_pi pi), H(pi || C_pi[r])).
inline std::pair<double, double> egr_identity_ominus(const Weights& pi, std::span<const double> r) {
    const Weights d = subtract(r, pi.values(), pi);
    return {egr(pi, d), relative_entropy(pi, closure(r, pi))};
}

/// (Gamma_pi(q || p), H(pi || pi (+)_pi (q (-)_pi p))).
inline std::pair<double, double> egr_divergence_identity(const Weights& pi, std::span<const double> q,
                                                         std::span<const double> p) {
    const Weights d = subtract(q, p, pi);
    return {egr_div(pi, q, p), relative_entropy(pi, perturb(pi.values(), d, pi))};
}

// ---- logarithmic divergence ----

/// A function phi on the open simplex with e^phi concave. Both built-ins have
/// the property <grad phi(p), p> = 1.
class ExpConcaveGenerator {
public:
    enum class Kind { NegCrossEntropy, RenyiPotential };

    /// phi(p) = sum pi_i log p_i.
    static ExpConcaveGenerator neg_cross_entropy(Weights pi) {
        detail::require(pi.interior(), ErrorCode::InvalidArgument, "generator weights must be strictly positive");
        const std::size_t n = pi.size();
        ExpConcaveGenerator g(Kind::NegCrossEntropy, std::move(pi), 0.0, n);
        g.check_exp_concave();
        return g;
    }

    /// phi(p) = (1/lambda) log sum p_j^lambda.
    static ExpConcaveGenerator renyi_potential(double lambda, std::size_t n) {
        detail::require(std::isfinite(lambda) && lambda != 0.0, ErrorCode::InvalidArgument,
                        "renyi potential needs a nonzero finite lambda");
        ExpConcaveGenerator g(Kind::RenyiPotential, barycenter(n), lambda, n);
        g.check_exp_concave();
        return g;
    }

    Kind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return n_; }
    double lambda() const noexcept { return lambda_; }
    const Weights& weights() const noexcept { return pi_; }

    double evaluate(std::span<const double> p) const {
        detail::require_same_size(p.size(), n_);
        detail::require_interior(p);
        if (kind_ == Kind::NegCrossEntropy) {
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) s += pi_[i] * std::log(p[i]);
            return s;
        }
        Vector lp(n_);
        for (std::size_t i = 0; i < n_; ++i) lp[i] = lambda_ * std::log(p[i]);
        return log_sum_exp(lp) / lambda_;
    }

    Vector gradient(std::span<const double> p) const {
        detail::require_same_size(p.size(), n_);
        detail::require_interior(p);
        Vector g(n_);
        if (kind_ == Kind::NegCrossEntropy) {
            for (std::size_t i = 0; i < n_; ++i) g[i] = pi_[i] / p[i];
            return g;
        }
        Vector lp(n_);
        for (std::size_t i = 0; i < n_; ++i) lp[i] = lambda_ * std::log(p[i]);
        const double lse = log_sum_exp(lp);
        for (std::size_t i = 0; i < n_; ++i) g[i] = std::exp(lp[i] - lse) / p[i];
        return g;
    }

private:
    ExpConcaveGenerator(Kind k, Weights pi, double lambda, std::size_t n)
        : kind_(k), pi_(std::move(pi)), lambda_(lambda), n_(n) {}

    // Midpoint test of e^phi on 100 random (p, q, t) triples.
    void check_exp_concave() const {
        if (n_ == 1) return;
        Stream s(0x5eedull, n_);
        for (int k = 0; k < 100; ++k) {
            const Weights p = detail::uniform_simplex_point(s, n_);
            const Weights q = detail::uniform_simplex_point(s, n_);
            const double t = s.uniform();
            Vector m(n_);
            for (std::size_t i = 0; i < n_; ++i) m[i] = t * p[i] + (1.0 - t) * q[i];
            const double lhs = std::exp(evaluate(m));
            const double rhs = t * std::exp(evaluate(p)) + (1.0 - t) * std::exp(evaluate(q));
            detail::require(lhs >= rhs - 1e-12 * std::max(1.0, std::abs(rhs)), ErrorCode::GeneratorViolation,
                            "generator is not exponentially concave");
        }
    }

    Kind kind_;
    Weights pi_;
    double lambda_;
    std::size_t n_;
};

/// L_phi(q || p) = log(1 + <grad phi(p), q - p>) - (phi(q) - phi(p)).
inline double log_divergence(const ExpConcaveGenerator& phi, std::span<const double> q, std::span<const double> p) {
    const Vector g = phi.gradient(p);
    detail::require_interior(q);
    double dir = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dir += g[i] * (q[i] - p[i]);
    const double arg = 1.0 + dir;
    detail::require(arg > 0.0, ErrorCode::GeneratorViolation, "log divergence argument is not positive");
    return std::log(arg) - (phi.evaluate(q) - phi.evaluate(p));
}

/// |L_phi(q (+) h || p (+) h) - L_phi(q || p)|.
inline double perturbation_invariance_residual(const ExpConcaveGenerator& phi, const Weights& p, const Weights& q,
                                               const Weights& h) {
    const Weights ph = perturb(p.values(), h.values());
    const Weights qh = perturb(q.values(), h.values());
    return std::abs(log_divergence(phi, qh, ph) - log_divergence(phi, q, p));
}

// ---- Fisher-Rao ----

namespace detail {
inline void require_tangent(std::span<const double> v) {
    double s = 0.0;
    double scale = 0.0;
    for (double x : v) {
        s += x;
        scale = std::max(scale, std::abs(x));
    }
    require(std::abs(s) <= 1e-12 * std::max(1.0, scale), ErrorCode::TangencyViolation,
            "tangent vector must sum to zero");
}
}  // namespace detail

/// sum v_i^2 / p_i.
inline double fisher_rao_form(const Weights& p, std::span<const double> v) {
    detail::require_same_size(p.size(), v.size());
    detail::require_interior(p.values());
    detail::require_tangent(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * v[i] / p[i];
    return s;
}

/// sum_ij pi_i (delta_ij - pi_j) v_i v_j / (p_i p_j): the metric induced by
/// Gamma_pi at p. Reduces to the form above when pi = p.
inline double fisher_rao_form(const Weights& pi, const Weights& p, std::span<const double> v) {
    detail::require_same_size(p.size(), v.size());
    detail::require_same_size(pi.size(), v.size());
    detail::require_interior(p.values());
    detail::require_tangent(v);
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) m += pi[i] * v[i] / p[i];
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double u = v[i] / p[i] - m;
        s += pi[i] * u * u;
    }
    return s;
}

// ---- exponential coordinates ----

struct ExpCoordinates {
    Vector theta;
};

/// theta_i = log(p_i / p_n), i < n.
inline ExpCoordinates to_exp_coords(const Weights& p) {
    detail::require_interior(p.values());
    const std::size_t n = p.size();
    ExpCoordinates c{Vector(n - 1)};
    const double ln = std::log(p[n - 1]);
    for (std::size_t i = 0; i + 1 < n; ++i) c.theta[i] = std::log(p[i]) - ln;
    return c;
}

inline Weights from_exp_coords(const ExpCoordinates& c) {
    for (double t : c.theta)
        detail::require(std::isfinite(t), ErrorCode::InvalidArgument, "exponential coordinates must be finite");
    Vector x(c.theta);
    x.push_back(0.0);
    const double lse = log_sum_exp(x);
    for (double& v : x) v = std::exp(v - lse);
    return closure(x);
}

}  // namespace growth
