#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egr/core.hpp"
#include "egr/error.hpp"
#include "egr/info.hpp"
#include "egr/numeric.hpp"
#include "egr/simplex.hpp"

namespace growth {

/// A finite distribution over log-return vectors: row k of r has
/// probability probs[k].
struct ScenarioSet {
    std::vector<Vector> r;
    Weights probs;

    ScenarioSet(std::vector<Vector> rows, Weights p) : r(std::move(rows)), probs(std::move(p)) { validate(); }

    /// Equally likely scenarios.
    explicit ScenarioSet(std::vector<Vector> rows)
        : r(std::move(rows)), probs(barycenter(std::max<std::size_t>(r.size(), 1))) {
        validate();
    }

    std::size_t K() const noexcept { return r.size(); }
    std::size_t n() const noexcept { return r.empty() ? 0 : r.front().size(); }

    /// m = E[r].
    Vector mean() const {
        Vector m(n(), 0.0);
        for (std::size_t k = 0; k < K(); ++k)
            for (std::size_t i = 0; i < n(); ++i) m[i] += probs[k] * r[k][i];
        return m;
    }

    ScenarioSet scaled(double t) const {
        std::vector<Vector> rows = r;
        for (auto& row : rows)
            for (double& v : row) v *= t;
        return ScenarioSet(std::move(rows), probs);
    }

private:
    void validate() const {
        detail::require(!r.empty(), ErrorCode::InvalidArgument, "scenario set needs at least one scenario");
        detail::require(probs.size() == r.size(), ErrorCode::DimensionMismatch, "one probability per scenario");
        const std::size_t n0 = r.front().size();
        detail::require(n0 >= 1, ErrorCode::InvalidArgument, "scenarios need at least one asset");
        for (const auto& row : r) {
            detail::require(row.size() == n0, ErrorCode::DimensionMismatch, "scenarios differ in length");
            for (double v : row) detail::require(std::isfinite(v), ErrorCode::DomainViolation, "scenario entries must be finite");
        }
    }
};

struct MaxEgrResult {
    Weights pi_star;
    double value;
    std::size_t i_star;  // argmax of r (first occurrence)
    std::size_t j_star;  // argmin of r (first occurrence)
    bool degenerate_constant;
    bool tie;  // an extreme value is attained at more than one index
};

struct DualSolveResult {
    double lambda_star;  // +inf encodes the eta = 0 limit, 0 the saturated limit
    Weights pi_star;
    Weights q_star;
    double value;
    double kkt_residual;
    int iterations;
};

namespace detail {

inline void require_finite_all(std::span<const double> r) {
    require(!r.empty(), ErrorCode::InvalidArgument, "returns must be nonempty");
    for (double v : r) require(std::isfinite(v), ErrorCode::DomainViolation, "log returns must be finite");
}

/// q_i proportional to pi_i e^{s_i} on supp(pi). Entries may underflow to zero
/// for extreme s; the result is still a valid point of the closed simplex.
inline Weights tilt(const Weights& pi, std::span<const double> s) {
    const double lse = weighted_log_sum_exp(pi.values(), s);
    Vector q(pi.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i)
        if (pi.in_support(i)) q[i] = pi[i] * std::exp(s[i] - lse);
    double t = 0.0;
    for (double v : q) t += v;
    for (double& v : q) v /= t;
    return Weights(std::move(q));
}

// Mass on the larger return for the two-point problem with spread d > 0:
// 1/d - 1/(e^d - 1).
inline double two_point_weight(double d) {
    if (d < 0.05) {
        const double d2 = d * d;
        return 0.5 - d / 12.0 + d * d2 / 720.0 - d * d2 * d2 / 30240.0 + d * d2 * d2 * d2 / 1209600.0;
    }
    if (d > 1.0) return 1.0 / d - std::exp(-d) / (-std::expm1(-d));
    return 1.0 / d - 1.0 / std::expm1(d);
}

// Optimal value log((e^d - 1)/d) + d/(e^d - 1) - 1.
inline double two_point_value(double d) {
    if (d < 0.05) {
        const double d2 = d * d;
        return d2 / 8.0 - d2 * d2 / 576.0 + d2 * d2 * d2 / 25920.0 - d2 * d2 * d2 * d2 / 1075200.0;
    }
    if (d > 1.0) {
        const double em = -std::expm1(-d);  // 1 - e^{-d}
        return d + std::log(em) - std::log(d) + d * std::exp(-d) / em - 1.0;
    }
    const double e = std::expm1(d);
    return std::log(e / d) + d / e - 1.0;
}

inline Weights two_point(std::size_t n, std::size_t i, std::size_t j, double wi) {
    Vector w(n, 0.0);
    w[i] = wi;
    w[j] = 1.0 - wi;
    return Weights(std::move(w));
}

}  // namespace detail

// ---- variational representation ----

/// <p - pi, r> - H(p || pi); -inf when supp(p) is not inside supp(pi).
inline double variational_objective(const Weights& pi, std::span<const double> r, const Weights& p) {
    const double h = relative_entropy(p, pi);
    if (!std::isfinite(h)) return -kInf;
    double lin = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i)) lin += (p[i] - pi[i]) * r[i];
    return lin - h;
}

struct VariationalResult {
    double value;
    Weights p_star;
};

/// gamma(pi, r) as a maximum over p, attained at p* = pi (+)_pi C[e^r].
inline VariationalResult variational_max(const Weights& pi, std::span<const double> r) {
    const double v = egr_log(pi, r);
    return {v, detail::tilt(pi, r)};
}

// ---- deterministic maximization ----

/// max over the simplex of gamma(pi, r): supported on the argmax and argmin.
inline MaxEgrResult max_egr(std::span<const double> r) {
    detail::require_finite_all(r);
    const std::size_t n = r.size();
    const auto imax = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    const auto imin = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());
    const double d = r[imax] - r[imin];
    if (!(d > 0.0)) return {barycenter(n), 0.0, imax, imin, true, false};
    const auto cmax = std::count(r.begin(), r.end(), r[imax]);
    const auto cmin = std::count(r.begin(), r.end(), r[imin]);
    return {detail::two_point(n, imax, imin, detail::two_point_weight(d)), detail::two_point_value(d), imax, imin,
            false, cmax > 1 || cmin > 1};
}

/// <q - pi, r> - lambda H(q || pi).
inline double penalized_objective(std::span<const double> r, double lambda, const Weights& pi, const Weights& q) {
    const double h = relative_entropy(q, pi);
    if (!std::isfinite(h)) return -kInf;
    double lin = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) lin += (q[i] - pi[i]) * r[i];
    return lin - lambda * h;
}

/// sup over (pi, q) of <q - pi, r> - lambda H(q || pi) = lambda max gamma(., r/lambda).
inline DualSolveResult penalized_joint(std::span<const double> r, double lambda) {
    detail::require_finite_all(r);
    detail::require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be positive");
    Vector s(r.begin(), r.end());
    for (double& v : s) v /= lambda;
    const MaxEgrResult m = max_egr(s);
    Weights q = detail::tilt(m.pi_star, s);
    const double value = lambda * m.value;
    const double obj = penalized_objective(r, lambda, m.pi_star, q);
    return {lambda, m.pi_star, std::move(q), value, std::abs(obj - value), 0};
}

// ---- entropy-constrained problems ----

inline constexpr double kRootTol = 1e-10;
inline constexpr int kRootBudget = 200;

/// H(q(r/lambda) || pi) with q(s) = pi (+)_pi C[e^s].
inline double tilt_entropy(const Weights& pi, std::span<const double> r, double lambda) {
    double rmax = -kInf;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i)) rmax = std::max(rmax, r[i]);
    Vector s(r.size(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i)) s[i] = (r[i] - rmax) / lambda;
    const double lse = weighted_log_sum_exp(pi.values(), s);
    double h = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!pi.in_support(i)) continue;
        const double q = pi[i] * std::exp(s[i] - lse);
        if (q > 0.0) h += q * (s[i] - lse);
    }
    return std::max(h, 0.0);
}

/// eta-bar = -log of the pi-mass on the argmax of r within supp(pi).
inline double eta_bar(const Weights& pi, std::span<const double> r) {
    double rmax = -kInf;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i)) rmax = std::max(rmax, r[i]);
    double mass = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i) && r[i] == rmax) mass += pi[i];
    return std::max(-std::log(mass), 0.0);
}

namespace detail {

// Solves h(x) = target for h continuous and monotone in x > 0, bracketing by
// doubling/halving from x0 and then bisecting in log x. increasing says which
// way h runs.
template <class H>
std::pair<double, int> monotone_root(H&& h, double target, double x0, bool increasing) {
    auto above = [&](double x) { return increasing ? h(x) > target : h(x) < target; };
    double lo = x0, hi = x0;
    int it = 0;
    // lo: h on the "below target" side; hi: h on the "above target" side.
    while (above(lo)) {
        lo /= 2;
        if (++it > kRootBudget || !(lo > 0.0)) throw Error(ErrorCode::NoConvergence, "could not bracket the root");
    }
    while (!above(hi)) {
        hi *= 2;
        if (++it > kRootBudget || !std::isfinite(hi)) throw Error(ErrorCode::NoConvergence, "could not bracket the root");
    }
    double x = std::sqrt(lo * hi);
    for (int k = 0; k < kRootBudget; ++k, ++it) {
        x = std::sqrt(lo * hi);
        const double v = h(x);
        // Aim well inside the tolerance so a recomputed H still meets it.
        if (std::abs(v - target) <= 1e-3 * kRootTol) return {x, it};
        if ((v > target) == increasing)
            hi = x;
        else
            lo = x;
        if (hi / lo - 1.0 < 4 * std::numeric_limits<double>::epsilon()) break;
    }
    if (std::abs(h(x) - target) <= kRootTol) return {x, it};
    throw Error(ErrorCode::NoConvergence, "bisection did not reach the target tolerance");
}

}  // namespace detail

/// sup { <q - pi, r> : H(q || pi) <= eta } for fixed pi.
inline DualSolveResult phi_eta(const Weights& pi, std::span<const double> r, double eta) {
    detail::check_log_returns(pi, r);
    detail::require(eta >= 0.0 && !std::isnan(eta), ErrorCode::InvalidArgument, "eta must be nonnegative");
    const double mean = support_dot(pi.values(), r);
    if (eta == 0.0) return {kInf, pi, pi, 0.0, 0.0, 0};

    const double ebar = eta_bar(pi, r);
    double rmax = -kInf, rmin = kInf;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i)) {
            rmax = std::max(rmax, r[i]);
            rmin = std::min(rmin, r[i]);
        }
    if (eta >= ebar) {
        // Saturated: all mass on the argmax set, in proportion to pi.
        Vector q(pi.size(), 0.0);
        for (std::size_t i = 0; i < q.size(); ++i)
            if (pi.in_support(i) && r[i] == rmax) q[i] = pi[i];
        double mass = 0.0;
        for (double v : q) mass += v;
        for (double& v : q) v /= mass;
        Weights qs(std::move(q));
        return {0.0, pi, std::move(qs), rmax - mean, 0.0, 0};
    }

    const double spread = rmax - rmin;
    auto H = [&](double lambda) { return tilt_entropy(pi, r, lambda); };
    const auto [lam, iters] = detail::monotone_root(H, eta, spread / std::max(eta, 1e-8), false);
    Vector s(r.size(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (pi.in_support(i)) s[i] = (r[i] - rmax) / lam;
    Weights q = detail::tilt(pi, s);
    const double value = support_dot(q.values(), r) - mean;
    const double res = std::abs(relative_entropy(q, pi) - eta);
    return {lam, pi, std::move(q), value, res, iters};
}

namespace detail {

struct TwoPointTilt {
    double t;  // pi mass on the larger return
    double q;  // tilted mass on the larger return
    double h;  // H(q || pi)
};

// The two-point closed form at spread x, tilted by e^{x}.
inline TwoPointTilt two_point_tilt(double x) {
    const double t = two_point_weight(x);
    if (x < 1e-3) {
        const double x2 = x * x;
        const double h = x2 / 8.0 - x2 * x2 / 192.0 + x2 * x2 * x2 / 5184.0;
        const double q = t / (t + (1.0 - t) * std::exp(-x));
        return {t, q, h};
    }
    // With u = (1 - t) e^{-x} / t: q = 1 / (1 + u) and
    // H = -log(t (1 + u)) - (1 - q) x, which stays accurate for huge x.
    const double u = (1.0 - t) * std::exp(-x) / t;
    const double q = 1.0 / (1.0 + u);
    const double h = -std::log(t) - std::log1p(u) - x * (u / (1.0 + u));
    return {t, q, std::max(h, 0.0)};
}

}  // namespace detail

/// sup over (pi, q) with H(q || pi) <= eta of <q - pi, r>.
inline DualSolveResult constrained_joint(std::span<const double> r, double eta) {
    detail::require_finite_all(r);
    detail::require(eta >= 0.0 && !std::isnan(eta), ErrorCode::InvalidArgument, "eta must be nonnegative");
    const std::size_t n = r.size();
    const auto i = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    const auto j = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());
    const double d = r[i] - r[j];
    if (!(d > 0.0)) {
        const Weights b = barycenter(n);
        return {kInf, b, b, 0.0, 0.0, 0};
    }
    if (eta == 0.0) {
        const Weights h = detail::two_point(n, i, j, 0.5);
        return {kInf, h, h, 0.0, 0.0, 0};
    }
    // Solve in x = d / lambda, where H increases from 0 to infinity.
    auto H = [&](double x) { return detail::two_point_tilt(x).h; };
    // H grows like log x - 1, so start the bracket near e^{eta + 1} for large eta.
    const double x0 = eta > 1.0 ? std::exp(std::min(eta + 1.0, 690.0)) : std::max(eta, 1e-8);
    const auto [x, iters] = detail::monotone_root(H, eta, x0, true);
    const auto tp = detail::two_point_tilt(x);
    Weights pi = detail::two_point(n, i, j, tp.t);
    Weights q = detail::two_point(n, i, j, tp.q);
    const double value = (tp.q - tp.t) * d;
    const double res = std::abs(relative_entropy(q, pi) - eta);
    return {d / x, std::move(pi), std::move(q), value, res, iters};
}

// ---- expected excess growth rate ----

/// J(pi) = sum_k p_k gamma(pi, r_k).
inline double expected_egr(const Weights& pi, const ScenarioSet& s) {
    detail::require(pi.size() == s.n(), ErrorCode::DimensionMismatch, "weights and scenarios differ in length");
    return pairwise_sum(0, s.K(), [&](std::size_t k) { return s.probs[k] * egr_log(pi, s.r[k]); });
}

namespace detail {

// E[R_i / <pi, R>] for every i, computed as exp(r_ki - log <pi, R_k>).
inline Vector wealth_ratio(const Weights& pi, const ScenarioSet& s) {
    const std::size_t n = s.n();
    Vector out(n, 0.0);
    for (std::size_t k = 0; k < s.K(); ++k) {
        if (!s.probs.in_support(k)) continue;
        const double l = weighted_log_sum_exp(pi.values(), s.r[k]);
        for (std::size_t i = 0; i < n; ++i) out[i] += s.probs[k] * std::exp(s.r[k][i] - l);
    }
    return out;
}

}  // namespace detail

/// g*(pi) = E[R / <pi, R>] - m.
inline Vector supergradient(const Weights& pi, const ScenarioSet& s) {
    detail::require(pi.size() == s.n(), ErrorCode::DimensionMismatch, "weights and scenarios differ in length");
    Vector g = detail::wealth_ratio(pi, s);
    const Vector m = s.mean();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= m[i];
    return g;
}

/// c_j = E[R_j / <pi, R>] - 1 - <e_j - pi, m>. Optimality holds iff c <= 0
/// everywhere with equality on supp(pi); max_j c_j bounds the optimality gap.
inline Vector optimality_certificate(const Weights& pi, const ScenarioSet& s) {
    Vector c = supergradient(pi, s);
    const double pg = dot(pi.values(), c);
    for (double& v : c) v -= pg;
    return c;
}

struct ExpectedEgrOptions {
    double tol = 1e-6;
    int max_iterations = 100000;
    int check_every = 100;
    bool polish = true;
};

struct ExpectedEgrResult {
    Weights pi_star;
    double value;
    Vector certificate;
    int iterations;
    bool converged;
};

/// Thrown when no certified point is found; carries the best iterate.
class ExpectedEgrNoConvergence : public Error {
public:
    explicit ExpectedEgrNoConvergence(ExpectedEgrResult best)
        : Error(ErrorCode::NoConvergence, "expected-EGR certificate not reached within the iteration budget"),
          best_(std::move(best)) {}
    const ExpectedEgrResult& best() const noexcept { return best_; }

private:
    ExpectedEgrResult best_;
};

namespace detail {

inline bool certified(const Weights& pi, const Vector& c, double tol) {
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] > tol) return false;
        if (pi.in_support(j) && std::abs(c[j]) > tol) return false;
    }
    return true;
}

inline double max_violation(const Weights& pi, const Vector& c) {
    double v = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) v = std::max(v, pi.in_support(j) ? std::abs(c[j]) : c[j]);
    return v;
}

// Active-set Newton for a concave f on the simplex, started near the optimum.
// grad(x) is the ambient gradient, hess(x, S) the Hessian block on the index
// set S. Coordinates that a step drives to zero leave the face; the vertex
// with the most positive first-order certificate enters it. Produces exact
// zeros off the optimal face.
template <class F, class G, class H>
Vector active_set_newton(Vector x, F&& f, G&& grad, H&& hess, double tol) {
    const std::size_t n = x.size();
    auto cert = [&](const Vector& v) {
        Vector c = grad(v);
        const double pg = dot(v, c);
        for (double& e : c) e -= pg;
        return c;
    };
    std::vector<char> active(n, 0);
    const double xmax = *std::max_element(x.begin(), x.end());
    for (std::size_t j = 0; j < n; ++j) active[j] = x[j] >= 1e-3 * xmax;
    for (std::size_t j = 0; j < n; ++j)
        if (!active[j]) x[j] = 0.0;
    auto normalize = [](Vector& v) {
        for (double& e : v) e = std::max(e, 0.0);
        double t = 0.0;
        for (double e : v) t += e;
        for (double& e : v) e /= t;
    };
    normalize(x);

    for (std::size_t outer = 0; outer < 4 * n + 10; ++outer) {
        for (int it = 0; it < 60; ++it) {
            std::vector<std::size_t> S;
            for (std::size_t j = 0; j < n; ++j)
                if (active[j]) S.push_back(j);
            const std::size_t m = S.size();
            const Vector g = grad(x);
            Eigen::MatrixXd Kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
            Kkt.topLeftCorner(m, m) = hess(x, S);
            for (std::size_t a = 0; a < m; ++a) {
                Kkt(a, m) = 1.0;
                Kkt(m, a) = 1.0;
                rhs[a] = -g[S[a]];
            }
            Eigen::VectorXd step = Kkt.completeOrthogonalDecomposition().solve(rhs).head(m);
            step.array() -= step.sum() / static_cast<double>(m);
            if (step.lpNorm<Eigen::Infinity>() < 1e-15) break;

            double amax = 1.0;
            std::size_t blocking = n;
            for (std::size_t a = 0; a < m; ++a)
                if (step[a] < 0.0 && x[S[a]] + step[a] <= 0.0) {
                    const double aa = -x[S[a]] / step[a];
                    if (aa < amax) {
                        amax = aa;
                        blocking = S[a];
                    }
                }
            const double f0 = f(x);
            double alpha = amax;
            Vector xn(x);
            for (int bt = 0; bt < 40; ++bt) {
                xn = x;
                for (std::size_t a = 0; a < m; ++a) xn[S[a]] = x[S[a]] + alpha * step[a];
                if (alpha == amax && blocking < n) xn[blocking] = 0.0;
                normalize(xn);
                if (f(xn) >= f0 - 1e-15 * std::max(1.0, std::abs(f0))) break;
                alpha /= 2;
            }
            if (alpha == amax && blocking < n) active[blocking] = 0;
            x = xn;
            const Vector c = cert(x);
            double worst = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (active[j]) worst = std::max(worst, std::abs(c[j]));
            if (worst < 1e-14) break;
        }
        const Vector c = cert(x);
        std::size_t jbest = n;
        double cbest = 0.1 * tol;
        for (std::size_t j = 0; j < n; ++j)
            if (!active[j] && c[j] > cbest) {
                cbest = c[j];
                jbest = j;
            }
        if (jbest == n) break;
        active[jbest] = 1;
        for (double& v : x) v *= 0.99;
        x[jbest] += 0.01;
    }
    return x;
}

inline Weights newton_polish(const Weights& start, const ScenarioSet& s, double tol) {
    auto f = [&](const Vector& x) { return expected_egr(Weights(x), s); };
    auto g = [&](const Vector& x) { return supergradient(Weights(x), s); };
    // Hessian of J: -E[R_i R_j / <pi, R>^2].
    auto h = [&](const Vector& x, const std::vector<std::size_t>& S) {
        const std::size_t m = S.size();
        Eigen::MatrixXd Hs = Eigen::MatrixXd::Zero(m, m);
        for (std::size_t k = 0; k < s.K(); ++k) {
            const double l = weighted_log_sum_exp(x, s.r[k]);
            Eigen::VectorXd u(m);
            for (std::size_t a = 0; a < m; ++a) u[a] = std::exp(s.r[k][S[a]] - l);
            Hs -= s.probs[k] * u * u.transpose();
        }
        return Hs;
    };
    return Weights(active_set_newton(start.vec(), f, g, h, tol));
}

}  // namespace detail

/// Maximizes J over the simplex by entropic mirror ascent from the
/// barycenter; every check_every steps the iterate is polished on its
/// apparent face and accepted once the first-order certificate holds.
inline ExpectedEgrResult maximize_expected_egr(const ScenarioSet& s, double tol,
                                               ExpectedEgrOptions opt = {}) {
    detail::require(tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
    opt.tol = tol;
    const std::size_t n = s.n();
    double rinf = 0.0;
    for (const auto& row : s.r)
        for (double v : row) rinf = std::max(rinf, std::abs(v));
    const double c0 = 1.0 / (1.0 + rinf);

    Vector logw(n, -std::log(static_cast<double>(n)));
    auto current = [&] {
        const double lse = log_sum_exp(logw);
        Vector w(n);
        double t = 0.0;
        for (std::size_t i = 0; i < n; ++i) t += (w[i] = std::exp(logw[i] - lse));
        for (double& v : w) v /= t;
        return Weights(std::move(w));
    };

    ExpectedEgrResult best{barycenter(n), 0.0, {}, 0, false};
    double best_violation = kInf;
    auto consider = [&](const Weights& w, int it) {
        Vector c = optimality_certificate(w, s);
        const double v = detail::max_violation(w, c);
        if (v < best_violation) {
            best_violation = v;
            best = {w, expected_egr(w, s), std::move(c), it, false};
        }
        return detail::certified(w, best.certificate, opt.tol) && v == best_violation;
    };

    for (int t = 1; t <= opt.max_iterations; ++t) {
        const Weights w = current();
        const Vector g = optimality_certificate(w, s);
        const double step = c0 / std::sqrt(static_cast<double>(t));
        for (std::size_t i = 0; i < n; ++i) logw[i] += step * g[i];
        const double lse = log_sum_exp(logw);
        for (double& v : logw) v -= lse;

        if (t % opt.check_every == 0) {
            const Weights cur = current();
            if (consider(cur, t)) break;
            if (opt.polish) {
                try {
                    if (consider(detail::newton_polish(cur, s, opt.tol), t)) break;
                } catch (const Error&) {
                    // fall back to plain mirror ascent
                }
            }
        }
    }
    if (!detail::certified(best.pi_star, best.certificate, opt.tol)) throw ExpectedEgrNoConvergence(best);
    best.converged = true;
    return best;
}

/// Sort-based Euclidean projection onto the simplex.
inline Vector project_simplex(std::span<const double> v) {
    const std::size_t n = v.size();
    Vector u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        css += u[k];
        const double t = (css - 1.0) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) theta = t;
    }
    Vector out(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (out[i] = std::max(v[i] - theta, 0.0));
    for (double& x : out) x /= s;
    return out;
}

/// Q(pi) = (1/2)(sum pi_i E[r_i^2] - pi^T E[r r^T] pi), the second-order
/// model of J.
inline double quadratic_objective(const Weights& pi, const ScenarioSet& s) {
    double q = 0.0;
    for (std::size_t k = 0; k < s.K(); ++k) q += s.probs[k] * weighted_variance(pi, s.r[k]);
    return 0.5 * q;
}

/// Maximizer of the quadratic model: projected gradient to locate the optimal
/// face, then an exact solve of the KKT system on that face.
inline Weights quadratic_approx_solution(const ScenarioSet& s, int max_iterations = 100000) {
    const std::size_t n = s.n();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < s.K(); ++k) {
        const Eigen::Map<const Eigen::VectorXd> rk(s.r[k].data(), static_cast<Eigen::Index>(n));
        M += s.probs[k] * rk * rk.transpose();
    }
    const Eigen::VectorXd lin = 0.5 * M.diagonal();
    const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    if (!(L > 0.0)) return barycenter(n);  // all returns zero: the model vanishes

    auto toE = [&](const Vector& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n)).eval(); };
    auto f = [&](const Vector& v) {
        const Eigen::VectorXd x = toE(v);
        return lin.dot(x) - 0.5 * x.dot(M * x);
    };
    auto g = [&](const Vector& v) {
        const Eigen::VectorXd gx = lin - M * toE(v);
        return Vector(gx.data(), gx.data() + n);
    };
    auto h = [&](const Vector&, const std::vector<std::size_t>& S) {
        Eigen::MatrixXd Hs(S.size(), S.size());
        for (std::size_t a = 0; a < S.size(); ++a)
            for (std::size_t b = 0; b < S.size(); ++b) Hs(a, b) = -M(S[a], S[b]);
        return Hs;
    };
    auto kkt_ok = [&](const Vector& x) {
        Vector c = g(x);
        const double pg = dot(x, c);
        const double scale = 1e-12 * std::max(1.0, L);
        for (std::size_t j = 0; j < n; ++j) {
            const double cj = c[j] - pg;
            if (cj > scale || (x[j] > 0.0 && std::abs(cj) > scale)) return false;
        }
        return true;
    };

    Vector x(n, 1.0 / static_cast<double>(n));
    const double step = 1.0 / L;
    for (int it = 1; it <= max_iterations; ++it) {
        const Vector gx = g(x);
        Vector y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + step * gx[i];
        x = project_simplex(y);
        if (it % 50 == 0 || it == 1) {
            const Vector p = detail::active_set_newton(x, f, g, h, 1e-12 * std::max(1.0, L));
            if (kkt_ok(p)) return Weights(p);
        }
    }
    throw Error(ErrorCode::NoConvergence, "quadratic model solver did not converge");
}

struct GrowthBound {
    double lhs;  // E[log(<pi, R> / <pi*, R>)]
    double rhs;  // log(1 + <pi - pi*, m>)
};

inline GrowthBound relative_growth_bound_check(const Weights& pi, const Weights& pi_star, const ScenarioSet& s) {
    detail::require(pi.size() == s.n() && pi_star.size() == s.n(), ErrorCode::DimensionMismatch,
                    "weights and scenarios differ in length");
    const double lhs = pairwise_sum(0, s.K(), [&](std::size_t k) {
        if (!s.probs.in_support(k)) return 0.0;
        return s.probs[k] *
               (weighted_log_sum_exp(pi.values(), s.r[k]) - weighted_log_sum_exp(pi_star.values(), s.r[k]));
    });
    const Vector m = s.mean();
    double d = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) d += (pi[i] - pi_star[i]) * m[i];
    const double rhs = 1.0 + d > 0.0 ? std::log1p(d) : -kInf;
    return {lhs, rhs};
}

}  // namespace growth
