#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "egr/core.hpp"
#include "egr/error.hpp"
#include "egr/info.hpp"
#include "egr/numeric.hpp"
#include "egr/quadrature.hpp"
#include "egr/random.hpp"
#include "egr/simplex.hpp"

namespace growth {

/// Closure of independent Gamma(alpha_i, rate beta_i) variables.
struct ScaledDirichletParams {
    Vector alpha;
    Vector beta;

    void validate() const {
        detail::require(!alpha.empty() && alpha.size() == beta.size(), ErrorCode::DimensionMismatch,
                        "alpha and beta must be nonempty and of equal length");
        for (std::size_t i = 0; i < alpha.size(); ++i)
            detail::require(alpha[i] > 0.0 && beta[i] > 0.0 && std::isfinite(alpha[i]) && std::isfinite(beta[i]),
                            ErrorCode::InvalidArgument, "alpha and beta must be positive");
    }
    std::size_t size() const noexcept { return alpha.size(); }
};

/// mu_{pi,x,sigma}: the scaled Dirichlet law with alpha = pi / sigma and
/// beta = pi / x, concentrating at x as sigma -> 0.
struct LocationParams {
    Weights pi;
    Weights x;
    double sigma;

    void validate() const {
        detail::require(pi.size() == x.size(), ErrorCode::DimensionMismatch, "pi and x differ in length");
        detail::require(pi.interior() && x.interior(), ErrorCode::BoundaryPoint, "pi and x must be strictly positive");
        detail::require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidArgument, "sigma must be positive");
    }

    ScaledDirichletParams to_params() const {
        validate();
        ScaledDirichletParams p{Vector(pi.size()), Vector(pi.size())};
        for (std::size_t i = 0; i < pi.size(); ++i) {
            p.alpha[i] = pi[i] / sigma;
            p.beta[i] = pi[i] / x[i];
        }
        return p;
    }
};

/// One draw; index selects the random stream, so draw k is the same whatever
/// else was sampled.
inline Weights sample_one(const ScaledDirichletParams& params, std::uint64_t seed, std::uint64_t index) {
    const std::size_t n = params.size();
    if (n == 1) return Weights({1.0});
    Stream s(seed, index);
    Vector lg(n);
    for (std::size_t i = 0; i < n; ++i) lg[i] = s.log_gamma_variate(params.alpha[i]) - std::log(params.beta[i]);
    const double lse = log_sum_exp(lg);
    for (double& v : lg) v = std::exp(v - lse);
    return closure(lg);
}

inline std::vector<Weights> sample(const ScaledDirichletParams& params, std::uint64_t seed, std::size_t count) {
    params.validate();
    std::vector<Weights> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(sample_one(params, seed, k));
    return out;
}

/// log density with respect to the Aitchison measure on the open simplex.
inline double log_density_aitchison(const ScaledDirichletParams& params, std::span<const double> y) {
    params.validate();
    detail::require(y.size() == params.size(), ErrorCode::DimensionMismatch, "point and parameters differ in length");
    detail::require_interior(y);
    const std::size_t n = params.size();
    double a = 0.0;
    double lg = 0.0;
    double num = 0.0;
    Vector lby(n);
    for (std::size_t i = 0; i < n; ++i) {
        a += params.alpha[i];
        lg += std::lgamma(params.alpha[i]);
        lby[i] = std::log(params.beta[i]) + std::log(y[i]);
        num += params.alpha[i] * lby[i];
    }
    return std::lgamma(a) + 0.5 * std::log(static_cast<double>(n)) - lg + num - a * log_sum_exp(lby);
}

inline double density_aitchison(const ScaledDirichletParams& params, std::span<const double> y) {
    return std::exp(log_density_aitchison(params, y));
}

/// log C_{pi,sigma} = log Gamma(1/sigma) + log sqrt(n) - sum log Gamma(pi_i/sigma).
inline double log_mu_normalizer(const Weights& pi, double sigma) {
    double s = std::lgamma(1.0 / sigma) + 0.5 * std::log(static_cast<double>(pi.size()));
    for (std::size_t i = 0; i < pi.size(); ++i) s -= std::lgamma(pi[i] / sigma);
    return s;
}

/// log density of mu_{pi,x,sigma} through the scaled Dirichlet parameters.
inline double log_mu_density(const LocationParams& loc, std::span<const double> y) {
    return log_density_aitchison(loc.to_params(), y);
}

/// Same density written as C exp(-H(pi)/sigma) exp(-Gamma_pi(y||x)/sigma).
inline double log_mu_density_closed_form(const LocationParams& loc, std::span<const double> y) {
    loc.validate();
    detail::require(y.size() == loc.pi.size(), ErrorCode::DimensionMismatch, "point and parameters differ in length");
    detail::require_interior(y);
    return log_mu_normalizer(loc.pi, loc.sigma) -
           (shannon_entropy(loc.pi) + egr_div(loc.pi, y, loc.x.values())) / loc.sigma;
}

inline double mu_density(const LocationParams& loc, std::span<const double> y) {
    return std::exp(log_mu_density(loc, y));
}

/// |-sigma log mu(y) - Gamma_pi(y||x)|.
inline double ldp_gap(const LocationParams& loc, std::span<const double> y) {
    return std::abs(-loc.sigma * log_mu_density(loc, y) - egr_div(loc.pi, y, loc.x.values()));
}

struct RenyiCheck {
    double divergence;  // H_{1+sigma}(mu_y || mu_x), numerically
    double target;      // Gamma_pi(y||x) / sigma
    double residual;
    double std_error;   // zero on the quadrature path
};

struct RenyiOptions {
    double tol = 1e-8;
    std::size_t mc_samples = 1000000;
    std::uint64_t seed = 0;
};

/// Renyi divergence of order 1 + sigma between mu_{pi,y,sigma} and
/// mu_{pi,x,sigma}. n = 2 integrates (1/sigma) log int f_y^{1+sigma} f_x^{-sigma};
/// n = 3 estimates the same integral as E_{Z ~ mu_y}[(f_y(Z)/f_x(Z))^sigma].
inline RenyiCheck renyi_identity_residual(const Weights& pi, const Weights& x, const Weights& y, double sigma,
                                          const RenyiOptions& opt = {}) {
    const LocationParams lx{pi, x, sigma};
    const LocationParams ly{pi, y, sigma};
    const ScaledDirichletParams px = lx.to_params();
    const ScaledDirichletParams py = ly.to_params();
    const std::size_t n = pi.size();
    RenyiCheck out{};
    out.target = egr_div(pi, y.values(), x.values()) / sigma;

    if (n == 2) {
        auto f = [&](double y1, double y2) {
            const double z[2] = {y1, y2};
            return std::exp((1.0 + sigma) * log_density_aitchison(py, z) - sigma * log_density_aitchison(px, z));
        };
        const double I = aitchison_quadrature(f, opt.tol);
        out.divergence = std::log(I) / sigma;
        out.std_error = 0.0;
    } else if (n == 3) {
        const std::size_t N = opt.mc_samples;
        detail::require(N >= 2, ErrorCode::InvalidArgument, "need at least two samples");
        Vector w(N);
        for (std::size_t k = 0; k < N; ++k) {
            const Weights z = sample_one(py, opt.seed, k);
            w[k] = std::exp(sigma * (log_density_aitchison(py, z.values()) - log_density_aitchison(px, z.values())));
        }
        const double mean = pairwise_sum(w) / static_cast<double>(N);
        const double ss = pairwise_sum(0, N, [&](std::size_t k) { return (w[k] - mean) * (w[k] - mean); });
        const double sd = std::sqrt(ss / static_cast<double>(N - 1));
        out.divergence = std::log(mean) / sigma;
        // Delta method for (1/sigma) log(mean).
        out.std_error = sd / (std::sqrt(static_cast<double>(N)) * mean * sigma);
    } else {
        throw Error(ErrorCode::InvalidArgument, "renyi check supports n = 2 (quadrature) or n = 3 (Monte Carlo)");
    }
    out.residual = std::abs(out.divergence - out.target);
    return out;
}

}  // namespace growth
