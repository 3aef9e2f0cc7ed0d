#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "egr/error.hpp"
#include "egr/numeric.hpp"
#include "egr/simplex.hpp"

namespace growth {

namespace detail {

inline void check_log_returns(const Weights& pi, std::span<const double> r) {
    require(r.size() == pi.size(), ErrorCode::DimensionMismatch, "weights and returns differ in length");
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i))
            require(std::isfinite(r[i]), ErrorCode::DomainViolation, "log return must be finite on the support");
}

inline Vector logs_on_support(const Weights& pi, std::span<const double> R) {
    require(R.size() == pi.size(), ErrorCode::DimensionMismatch, "weights and returns differ in length");
    Vector r(R.size(), -kInf);
    for (std::size_t i = 0; i < R.size(); ++i) {
        if (!pi.in_support(i)) continue;
        require(std::isfinite(R[i]) && R[i] > 0.0, ErrorCode::DomainViolation,
                "gross return must be positive and finite on the support");
        r[i] = std::log(R[i]);
    }
    return r;
}

}  // namespace detail

/// gamma(pi, r) = log sum pi_i e^{r_i} - sum pi_i r_i over supp(pi).
/// Log returns are centred at their weighted mean first; small spreads go
/// through expm1/log1p, large ones through the max shift.
inline double egr_log(const Weights& pi, std::span<const double> r) {
    detail::check_log_returns(pi, r);
    const double mean = support_dot(pi.values(), r);
    double smax = -kInf;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i)) smax = std::max(smax, r[i] - mean);
    double g;
    if (smax <= 1.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (pi.in_support(i)) s += pi[i] * std::expm1(r[i] - mean);
        g = std::log1p(s);
    } else {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (pi.in_support(i)) s += pi[i] * std::exp(r[i] - mean - smax);
        g = smax + std::log(s);
    }
    return std::max(g, 0.0);
}

/// Excess growth rate of gross returns R weighted by pi.
inline double egr(const Weights& pi, std::span<const double> R) {
    return egr_log(pi, detail::logs_on_support(pi, R));
}

/// Gamma_pi(Y || X) = Gamma(pi, Y / X).
inline double egr_div(const Weights& pi, std::span<const double> Y, std::span<const double> X) {
    const Vector ly = detail::logs_on_support(pi, Y);
    const Vector lx = detail::logs_on_support(pi, X);
    Vector d(pi.size(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (pi.in_support(i)) d[i] = ly[i] - lx[i];
    return egr_log(pi, d);
}

inline double weighted_variance(const Weights& pi, std::span<const double> r) {
    detail::check_log_returns(pi, r);
    const double mean = support_dot(pi.values(), r);
    double v = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i)) v += pi[i] * (r[i] - mean) * (r[i] - mean);
    return v;
}

struct ChainDecomposition {
    double total;
    double outer_term;
    Vector inner_terms;
};

/// Splits Gamma(pi o p, a o R) into the outer term Gamma(pi, a <<p, R>>) and
/// the per-block terms Gamma(p^i, R^i).
inline ChainDecomposition chain_decompose(const CompositeSpec& spec, const std::vector<Vector>& returns) {
    spec.validate();
    const std::size_t n = spec.outer.size();
    detail::require(returns.size() == n, ErrorCode::DimensionMismatch, "one return block per outer coordinate");
    for (std::size_t i = 0; i < n; ++i)
        detail::require(returns[i].size() == spec.blocks[i].size(), ErrorCode::DimensionMismatch,
                        "return block length must match its weight block");

    const Weights full = composite(spec);
    Vector aR;
    aR.reserve(full.size());
    Vector outer_R(n, 0.0);
    ChainDecomposition out{0.0, 0.0, Vector(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        const double a = spec.scale ? (*spec.scale)[i] : 1.0;
        for (double v : returns[i]) aR.push_back(a * v);
        if (spec.outer.in_support(i)) {
            out.inner_terms[i] = egr(spec.blocks[i], returns[i]);
            outer_R[i] = a * support_dot(spec.blocks[i].values(), returns[i]);
        } else {
            // Off the outer support the block term carries zero weight; it is
            // still reported when defined.
            try {
                out.inner_terms[i] = egr(spec.blocks[i], returns[i]);
            } catch (const Error&) {
                out.inner_terms[i] = std::nan("");
            }
        }
    }
    out.total = egr(full, aR);
    out.outer_term = egr(spec.outer, outer_R);
    return out;
}

// ---- statistical physics ----

struct EnergySpec {
    Vector E;
    double beta;
    Weights pi;

    void validate() const {
        detail::require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidArgument, "beta must be positive");
        detail::check_log_returns(pi, E);
    }
};

/// p_i proportional to pi_i e^{-beta E_i}.
inline Weights gibbs(const EnergySpec& s) {
    s.validate();
    const std::size_t n = s.pi.size();
    double m = -kInf;
    for (std::size_t i = 0; i < n; ++i)
        if (s.pi.in_support(i)) m = std::max(m, -s.beta * s.E[i]);
    Vector w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (s.pi.in_support(i)) w[i] = s.pi[i] * std::exp(-s.beta * s.E[i] - m);
    return closure(w, s.pi);
}

/// A = -(1/beta) log sum pi_j e^{-beta E_j}.
inline double free_energy(const EnergySpec& s) {
    s.validate();
    Vector x(s.E.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = -s.beta * s.E[i];
    return -weighted_log_sum_exp(s.pi.values(), x) / s.beta;
}

/// U = sum pi_j E_j.
inline double internal_energy(const EnergySpec& s) {
    s.validate();
    return support_dot(s.pi.values(), s.E);
}

// ---- coding ----

struct CodeSpec {
    std::vector<int> lengths;
    int D;
    double rho;
    Weights pi;

    void validate() const {
        detail::require(lengths.size() == pi.size(), ErrorCode::DimensionMismatch, "one code length per symbol");
        detail::require(D >= 2, ErrorCode::InvalidArgument, "alphabet size must be at least 2");
        detail::require(rho > 0.0 && std::isfinite(rho), ErrorCode::InvalidArgument, "rho must be positive");
        detail::require(pi.interior(), ErrorCode::InvalidArgument, "source distribution must be strictly positive");
        for (int l : lengths) detail::require(l >= 1, ErrorCode::InvalidArgument, "code lengths must be >= 1");
    }
};

/// L_rho = (1/rho) log_D sum pi_i D^{rho l_i}.
inline double campbell_length(const CodeSpec& s) {
    s.validate();
    const double lnD = std::log(static_cast<double>(s.D));
    Vector x(s.lengths.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.rho * s.lengths[i] * lnD;
    return weighted_log_sum_exp(s.pi.values(), x) / (s.rho * lnD);
}

inline double shannon_length(const CodeSpec& s) {
    s.validate();
    double l = 0.0;
    for (std::size_t i = 0; i < s.lengths.size(); ++i) l += s.pi[i] * s.lengths[i];
    return l;
}

}  // namespace growth
