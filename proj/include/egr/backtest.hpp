#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "egr/core.hpp"
#include "egr/error.hpp"
#include "egr/numeric.hpp"
#include "egr/random.hpp"
#include "egr/simplex.hpp"

namespace growth {

/// T periods by n assets of strictly positive gross returns.
struct ReturnsPanel {
    std::vector<Vector> gross;
    std::vector<std::string> asset_names;
    std::vector<std::string> period_labels;

    std::size_t T() const noexcept { return gross.size(); }
    std::size_t n() const noexcept { return asset_names.size(); }

    void validate() const {
        detail::require(!gross.empty(), ErrorCode::ParseError, "panel has no periods");
        detail::require(period_labels.size() == gross.size(), ErrorCode::DimensionMismatch, "one label per period");
        for (std::size_t t = 0; t < gross.size(); ++t) {
            if (gross[t].size() != asset_names.size())
                throw Error(ErrorCode::RaggedRows, "row " + std::to_string(t + 1) + " has " +
                                                       std::to_string(gross[t].size()) + " values, expected " +
                                                       std::to_string(asset_names.size()));
            for (std::size_t i = 0; i < gross[t].size(); ++i)
                if (!(gross[t][i] > 0.0) || !std::isfinite(gross[t][i]))
                    throw Error(ErrorCode::NonPositiveReturn, "non-positive gross return at row " +
                                                                   std::to_string(t + 1) + ", column " +
                                                                   std::to_string(i + 1) + " (" + asset_names[i] + ")");
        }
        detail::require(std::set<std::string>(asset_names.begin(), asset_names.end()).size() == asset_names.size(),
                        ErrorCode::ParseError, "asset names must be unique");
        detail::require(std::set<std::string>(period_labels.begin(), period_labels.end()).size() == period_labels.size(),
                        ErrorCode::ParseError, "period labels must be unique");
    }

    /// Log returns, row by row.
    std::vector<Vector> log_returns() const {
        std::vector<Vector> out(gross);
        for (auto& row : out)
            for (double& v : row) v = std::log(v);
        return out;
    }
};

struct PanelFormat {
    bool log_returns = false;  // values are log returns rather than gross returns
    char delimiter = ',';
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

inline double parse_number(const std::string& s, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last)
        throw Error(ErrorCode::ParseError, "cannot parse '" + s + "' at row " + std::to_string(row) + ", column " +
                                               std::to_string(col));
    return v;
}

}  // namespace detail

/// Reads `period,<asset1>,...,<assetN>` followed by one row per period.
/// Row and column numbers in messages count data rows and asset columns from 1.
inline ReturnsPanel parse_panel(std::istream& in, const PanelFormat& fmt = {}) {
    std::string line;
    while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) throw Error(ErrorCode::ParseError, "empty input");
    const auto header = detail::split_line(line, fmt.delimiter);
    if (header.size() < 2) throw Error(ErrorCode::ParseError, "header needs a period column and at least one asset");
    ReturnsPanel p;
    p.asset_names.assign(header.begin() + 1, header.end());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++row;
        const auto f = detail::split_line(line, fmt.delimiter);
        if (f.size() != header.size())
            throw Error(ErrorCode::RaggedRows, "row " + std::to_string(row) + " has " + std::to_string(f.size() - 1) +
                                                   " values, expected " + std::to_string(header.size() - 1));
        p.period_labels.push_back(f[0]);
        Vector r(f.size() - 1);
        for (std::size_t i = 1; i < f.size(); ++i) {
            const double v = detail::parse_number(f[i], row, i);
            r[i - 1] = fmt.log_returns ? std::exp(v) : v;
            if (!(r[i - 1] > 0.0) || !std::isfinite(r[i - 1]))
                throw Error(ErrorCode::NonPositiveReturn, "non-positive gross return at row " + std::to_string(row) +
                                                               ", column " + std::to_string(i) + " (" +
                                                               p.asset_names[i - 1] + ")");
        }
        p.gross.push_back(std::move(r));
    }
    if (p.gross.empty()) throw Error(ErrorCode::ParseError, "no data rows (T = 0)");
    p.validate();
    return p;
}

inline ReturnsPanel load_panel(const std::string& path, const PanelFormat& fmt = {}) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return parse_panel(in, fmt);
}

inline void write_panel(std::ostream& out, const ReturnsPanel& p) {
    out << "period";
    for (const auto& a : p.asset_names) out << ',' << a;
    out << '\n';
    char buf[32];
    for (std::size_t t = 0; t < p.T(); ++t) {
        out << p.period_labels[t];
        for (double v : p.gross[t]) {
            const auto res = std::to_chars(buf, buf + sizeof buf, v);
            out << ',' << std::string(buf, res.ptr);
        }
        out << '\n';
    }
}

// ---- decomposition ----

struct DecompositionReport {
    double total_log_return;
    double weighted_avg_log_return;
    double cumulative_egr;
    Vector per_period_egr;
};

/// Log wealth of the constant-rebalanced portfolio pi, split into the
/// weighted average log return plus the accumulated excess growth rate.
inline DecompositionReport rebalanced_decomposition(const Weights& pi, const ReturnsPanel& panel) {
    detail::require(pi.size() == panel.n(), ErrorCode::DimensionMismatch, "weights and panel differ in width");
    const auto lr = panel.log_returns();
    const std::size_t T = panel.T();
    DecompositionReport rep{};
    rep.per_period_egr.resize(T);
    for (std::size_t t = 0; t < T; ++t) rep.per_period_egr[t] = egr_log(pi, lr[t]);
    rep.total_log_return =
        pairwise_sum(0, T, [&](std::size_t t) { return weighted_log_sum_exp(pi.values(), lr[t]); });
    rep.weighted_avg_log_return = pairwise_sum(0, T, [&](std::size_t t) { return support_dot(pi.values(), lr[t]); });
    rep.cumulative_egr = pairwise_sum(rep.per_period_egr);
    return rep;
}

// ---- rolling excess growth rate ----

struct Weighting {
    enum class Kind { EqualOnTopK, Fixed };
    Kind kind;
    std::size_t k = 0;
    std::optional<Weights> pi;

    static Weighting equal_top_k(std::size_t k) { return {Kind::EqualOnTopK, k, std::nullopt}; }
    static Weighting fixed(Weights w) { return {Kind::Fixed, 0, std::move(w)}; }
};

struct RollingResult {
    std::vector<std::size_t> window_start;  // first period, 0-based
    std::vector<std::size_t> window_end;    // last period, 0-based inclusive
    Vector egr;
    Vector cumulative;
};

/// Excess growth rate over non-overlapping windows of `window` periods. Gross
/// returns are compounded within each window; trailing periods that do not
/// fill a window are dropped. EqualOnTopK weights equally the k assets with
/// the largest relative price (cumulative return since the panel start) at
/// the start of each window, ties broken by lower index.
inline RollingResult rolling_egr(const ReturnsPanel& panel, std::size_t window, const Weighting& w) {
    detail::require(window >= 1, ErrorCode::DomainViolation, "window must be at least 1");
    detail::require(panel.T() >= window, ErrorCode::DomainViolation, "panel is shorter than one window");
    const std::size_t n = panel.n();
    if (w.kind == Weighting::Kind::Fixed) {
        detail::require(w.pi.has_value() && w.pi->size() == n, ErrorCode::DimensionMismatch,
                        "fixed weights must match the panel width");
    } else {
        detail::require(w.k >= 1 && w.k <= n, ErrorCode::DomainViolation, "top-k needs 1 <= k <= n");
    }
    const auto lr = panel.log_returns();
    const std::size_t W = panel.T() / window;
    RollingResult out;
    Vector level(n, 0.0);  // log relative price
    double cum = 0.0;
    for (std::size_t b = 0; b < W; ++b) {
        const std::size_t s = b * window;
        Vector g(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            g[i] = pairwise_sum(s, s + window, [&](std::size_t t) { return lr[t][i]; });

        double v;
        if (w.kind == Weighting::Kind::Fixed) {
            v = egr_log(*w.pi, g);
        } else {
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t c) { return level[a] > level[c]; });
            Vector pw(n, 0.0);
            for (std::size_t j = 0; j < w.k; ++j) pw[idx[j]] = 1.0 / static_cast<double>(w.k);
            v = egr_log(Weights(std::move(pw)), g);
        }
        for (std::size_t i = 0; i < n; ++i) level[i] += g[i];
        cum += v;
        out.window_start.push_back(s);
        out.window_end.push_back(s + window - 1);
        out.egr.push_back(v);
        out.cumulative.push_back(cum);
    }
    return out;
}

// ---- synthetic data ----

struct VolatilityRegime {
    std::size_t periods;
    double volatility;
};

struct SyntheticPanelSpec {
    std::size_t n = 3;
    std::vector<VolatilityRegime> regimes{{100, 0.01}};
    double drift = 0.0;
    std::uint64_t seed = 1;
};

/// Gross returns exp(drift + vol * N(0,1)), i.i.d. within each regime.
inline ReturnsPanel synthetic_panel(const SyntheticPanelSpec& spec) {
    detail::require(spec.n >= 1, ErrorCode::InvalidArgument, "need at least one asset");
    ReturnsPanel p;
    for (std::size_t i = 0; i < spec.n; ++i) p.asset_names.push_back("A" + std::to_string(i + 1));
    std::size_t t = 0;
    for (const auto& reg : spec.regimes) {
        detail::require(reg.volatility >= 0.0, ErrorCode::InvalidArgument, "volatility must be nonnegative");
        for (std::size_t k = 0; k < reg.periods; ++k, ++t) {
            Stream s(spec.seed, t);
            Vector row(spec.n);
            for (double& v : row) v = std::exp(spec.drift + reg.volatility * s.normal());
            p.gross.push_back(std::move(row));
            p.period_labels.push_back(std::to_string(t + 1));
        }
    }
    p.validate();
    return p;
}

}  // namespace growth
