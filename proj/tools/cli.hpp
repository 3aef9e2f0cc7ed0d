#pragma once

// Command-line front end. run() is kept separate from main() so the tests can
// drive it with in-memory streams.

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance/suite.hpp"
#include "egr.hpp"

namespace egrcli {

using growth::Vector;
using growth::Weights;
using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kSelftestFailed = 1, kInputError = 2, kNumericError = 3 };

/// Bad command-line input detected after CLI11 has parsed the flags.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline Json json_number(double v) {
    if (std::isfinite(v)) return v;
    return number(v);
}

inline Vector parse_list(const std::string& text, const std::string& flag) {
    Vector out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw UsageError(flag + ": empty entry in '" + text + "'");
        item = item.substr(b, e - b + 1);
        double v = 0.0;
        const char* first = item.data();
        if (*first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size())
            throw UsageError(flag + ": cannot parse '" + item + "' as a number");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(flag + ": expected a comma-separated list of numbers");
    return out;
}

inline Weights parse_weights(const std::string& text, const std::string& flag) {
    Vector w = parse_list(text, flag);
    double s = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError(flag + ": weights must be finite and nonnegative");
        s += v;
    }
    // Accept weights typed with a few decimals; renormalize what is close.
    if (std::abs(s - 1.0) > 1e-9) throw UsageError(flag + ": weights must sum to 1 (got " + number(s) + ")");
    for (double& v : w) v /= s;
    return Weights(std::move(w));
}

/// Scenario file: one row of log returns per scenario. An optional header
/// row names the assets; if its last field is `prob` or `probability` the
/// last column holds scenario probabilities, otherwise scenarios are equally
/// likely.
inline growth::ScenarioSet load_scenarios(std::istream& in) {
    using growth::Error;
    using growth::ErrorCode;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) rows.push_back(growth::detail::split_line(line, ','));
    if (rows.empty()) throw Error(ErrorCode::ParseError, "scenario file is empty");

    auto is_number = [](const std::string& s) {
        double v;
        const char* f = s.data();
        if (!s.empty() && *f == '+') ++f;
        const auto [p, ec] = std::from_chars(f, s.data() + s.size(), v);
        return !s.empty() && ec == std::errc() && p == s.data() + s.size();
    };
    bool has_prob = false;
    std::size_t first = 0;
    if (!std::all_of(rows[0].begin(), rows[0].end(), is_number)) {
        std::string last = rows[0].back();
        std::transform(last.begin(), last.end(), last.begin(), [](unsigned char c) { return std::tolower(c); });
        has_prob = last == "prob" || last == "probability";
        first = 1;
    }
    const std::size_t width = rows[0].size();
    std::vector<Vector> r;
    Vector p;
    for (std::size_t k = first; k < rows.size(); ++k) {
        const std::size_t row = k - first + 1;
        if (rows[k].size() != width)
            throw Error(ErrorCode::RaggedRows, "scenario row " + std::to_string(row) + " has " +
                                                   std::to_string(rows[k].size()) + " fields, expected " +
                                                   std::to_string(width));
        Vector v;
        for (std::size_t c = 0; c < width; ++c) v.push_back(growth::detail::parse_number(rows[k][c], row, c + 1));
        if (has_prob) {
            p.push_back(v.back());
            v.pop_back();
        }
        r.push_back(std::move(v));
    }
    if (r.empty()) throw Error(ErrorCode::ParseError, "no scenario rows (K = 0)");
    if (r.front().empty()) throw Error(ErrorCode::ParseError, "scenarios need at least one asset column");
    if (!has_prob) return growth::ScenarioSet(std::move(r));
    double s = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "scenario probabilities must be nonnegative");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "scenario probabilities must sum to 1");
    for (double& v : p) v /= s;
    return growth::ScenarioSet(std::move(r), Weights(std::move(p)));
}

inline growth::ScenarioSet load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw growth::Error(growth::ErrorCode::ParseError, "cannot open " + path);
    return load_scenarios(in);
}

inline Json weights_json(const Weights& w) { return Json(w.vec()); }

/// Runs one command line (without the program name). Output goes to `out`;
/// errors are reported as {"error": {"code", "message"}} on `out` and as
/// plain text on `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Excess growth rate toolkit", "egr"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "json";
    std::uint64_t seed = 0;
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", seed, "Seed for every random draw");

    // Shared option storage; each subcommand binds the ones it uses.
    std::string pi_s, returns_s, log_returns_s, file, x_s, y_s, sigma_s, alpha_s, beta_s, criteria_s, scenarios;
    std::size_t window = 0, top_k = 0, count = 1, samples = 1000000;
    double eta = 0.0, lambda = 0.0, tol = 1e-6, quad_tol = 1e-8;
    int max_iterations = 100000;
    bool log_input = false, quadratic = false;

    auto* compute = app.add_subcommand("compute", "Excess growth rate of one return vector");
    compute->add_option("--pi", pi_s, "Weights, comma separated")->required();
    auto* c_ret = compute->add_option("--returns", returns_s, "Gross returns");
    auto* c_log = compute->add_option("--log-returns", log_returns_s, "Log returns");
    c_ret->excludes(c_log);

    auto* decompose = app.add_subcommand("decompose", "Log-wealth decomposition of a rebalanced portfolio");
    decompose->add_option("--file", file, "Returns panel CSV")->required();
    decompose->add_option("--pi", pi_s, "Weights (default: equal)");
    decompose->add_flag("--log-input", log_input, "Panel holds log returns");

    auto* rolling = app.add_subcommand("rolling", "Excess growth rate over non-overlapping windows");
    rolling->add_option("--file", file, "Returns panel CSV")->required();
    rolling->add_option("--window", window, "Window length in periods")->required();
    auto* r_k = rolling->add_option("--top-k", top_k, "Equal weights on the k largest assets");
    auto* r_pi = rolling->add_option("--pi", pi_s, "Fixed weights");
    r_k->excludes(r_pi);
    rolling->add_flag("--log-input", log_input, "Panel holds log returns");

    auto* omax = app.add_subcommand("optimize-max", "Maximize the excess growth rate for one return vector");
    auto* m_ret = omax->add_option("--returns", returns_s, "Gross returns");
    auto* m_log = omax->add_option("--log-returns", log_returns_s, "Log returns");
    m_ret->excludes(m_log);
    omax->add_option("--lambda", lambda, "Solve the entropy-penalized joint problem instead");

    auto* oeta = app.add_subcommand("optimize-eta", "Entropy-ball problem: fixed pi, or joint over (pi, q)");
    auto* e_ret = oeta->add_option("--returns", returns_s, "Gross returns");
    auto* e_log = oeta->add_option("--log-returns", log_returns_s, "Log returns");
    e_ret->excludes(e_log);
    oeta->add_option("--eta", eta, "Entropy radius")->required();
    oeta->add_option("--pi", pi_s, "Fixed weights (omit for the joint problem)");

    auto* oexp = app.add_subcommand("optimize-expected", "Maximize the expected excess growth rate");
    oexp->add_option("--scenarios", scenarios, "Scenario CSV")->required();
    oexp->add_option("--tol", tol, "Certificate tolerance");
    oexp->add_option("--max-iterations", max_iterations, "Mirror-ascent iteration budget");
    oexp->add_flag("--quadratic", quadratic, "Also report the quadratic-model solution");

    auto* dsamp = app.add_subcommand("dirichlet-sample", "Draw from a scaled Dirichlet law");
    dsamp->add_option("--alpha", alpha_s, "Shape parameters");
    dsamp->add_option("--beta", beta_s, "Rate parameters (default: ones)");
    dsamp->add_option("--pi", pi_s, "Location form: weights");
    dsamp->add_option("--x", x_s, "Location form: center");
    dsamp->add_option("--sigma", sigma_s, "Location form: scale");
    dsamp->add_option("--count", count, "Number of draws");

    auto* ldp = app.add_subcommand("ldp-check", "Gap between -sigma log density and the excess growth rate");
    ldp->add_option("--pi", pi_s)->required();
    ldp->add_option("--x", x_s)->required();
    ldp->add_option("--y", y_s)->required();
    ldp->add_option("--sigma", sigma_s, "Scales, comma separated (default 0.1,0.01,0.001)");

    auto* renyi = app.add_subcommand("renyi-check", "Renyi divergence of order 1 + sigma against Gamma / sigma");
    renyi->add_option("--pi", pi_s)->required();
    renyi->add_option("--x", x_s)->required();
    renyi->add_option("--y", y_s)->required();
    renyi->add_option("--sigma", sigma_s)->required();
    renyi->add_option("--samples", samples, "Monte Carlo draws (n = 3)");
    renyi->add_option("--tol", quad_tol, "Quadrature tolerance (n = 2)");

    auto* self = app.add_subcommand("selftest", "Run the acceptance checks");
    self->add_option("--criteria", criteria_s, "Comma-separated criterion numbers (default: all)");

    auto envelope = [&](const std::string& code, const std::string& message, Json extra = nullptr) {
        Json j;
        j["error"]["code"] = code;
        j["error"]["message"] = message;
        if (!extra.is_null()) j["error"]["best"] = std::move(extra);
        out << j.dump() << '\n';
        err << "error: " << code << ": " << message << '\n';
    };

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        envelope("UsageError", e.what());
        return kInputError;
    }
    const bool csv = format == "csv";

    auto returns_from_flags = [&](bool required) -> std::optional<Vector> {
        if (!returns_s.empty()) {
            Vector R = parse_list(returns_s, "--returns");
            for (double v : R)
                if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("--returns: gross returns must be positive");
            for (double& v : R) v = std::log(v);
            return R;
        }
        if (!log_returns_s.empty()) return parse_list(log_returns_s, "--log-returns");
        if (required) throw UsageError("one of --returns or --log-returns is required");
        return std::nullopt;
    };

    try {
        if (compute->parsed()) {
            const Weights pi = parse_weights(pi_s, "--pi");
            double g;
            if (!returns_s.empty())
                g = growth::egr(pi, parse_list(returns_s, "--returns"));
            else if (!log_returns_s.empty())
                g = growth::egr_log(pi, parse_list(log_returns_s, "--log-returns"));
            else
                throw UsageError("one of --returns or --log-returns is required");
            if (csv)
                out << "egr\n" << number(g) << '\n';
            else
                out << Json{{"egr", g}}.dump() << '\n';
        } else if (decompose->parsed()) {
            const auto panel = growth::load_panel(file, {log_input, ','});
            const Weights pi = pi_s.empty() ? growth::barycenter(panel.n()) : parse_weights(pi_s, "--pi");
            const auto rep = growth::rebalanced_decomposition(pi, panel);
            if (csv) {
                out << "period,egr\n";
                for (std::size_t t = 0; t < panel.T(); ++t)
                    out << panel.period_labels[t] << ',' << number(rep.per_period_egr[t]) << '\n';
            } else {
                Json j;
                j["total_log_return"] = rep.total_log_return;
                j["weighted_avg_log_return"] = rep.weighted_avg_log_return;
                j["cumulative_egr"] = rep.cumulative_egr;
                j["per_period_egr"] = rep.per_period_egr;
                out << j.dump() << '\n';
            }
        } else if (rolling->parsed()) {
            const auto panel = growth::load_panel(file, {log_input, ','});
            growth::Weighting w = growth::Weighting::equal_top_k(0);
            if (!pi_s.empty())
                w = growth::Weighting::fixed(parse_weights(pi_s, "--pi"));
            else if (r_k->count() > 0)
                w = growth::Weighting::equal_top_k(top_k);
            else
                throw UsageError("one of --top-k or --pi is required");
            const auto res = growth::rolling_egr(panel, window, w);
            if (csv) {
                out << "window_start,window_end,egr,cumulative_egr\n";
                for (std::size_t b = 0; b < res.egr.size(); ++b)
                    out << panel.period_labels[res.window_start[b]] << ',' << panel.period_labels[res.window_end[b]]
                        << ',' << number(res.egr[b]) << ',' << number(res.cumulative[b]) << '\n';
            } else {
                Json rows = Json::array();
                for (std::size_t b = 0; b < res.egr.size(); ++b)
                    rows.push_back({{"window_start", panel.period_labels[res.window_start[b]]},
                                    {"window_end", panel.period_labels[res.window_end[b]]},
                                    {"egr", res.egr[b]},
                                    {"cumulative_egr", res.cumulative[b]}});
                out << Json{{"windows", rows}}.dump() << '\n';
            }
        } else if (omax->parsed()) {
            const Vector r = *returns_from_flags(true);
            if (omax->count("--lambda") > 0) {
                const auto res = growth::penalized_joint(r, lambda);
                if (csv) {
                    out << "index,pi_star,q_star\n";
                    for (std::size_t i = 0; i < r.size(); ++i)
                        out << i + 1 << ',' << number(res.pi_star[i]) << ',' << number(res.q_star[i]) << '\n';
                } else {
                    Json j;
                    j["lambda"] = lambda;
                    j["value"] = res.value;
                    j["pi_star"] = weights_json(res.pi_star);
                    j["q_star"] = weights_json(res.q_star);
                    out << j.dump() << '\n';
                }
            } else {
                const auto res = growth::max_egr(r);
                if (csv) {
                    out << "index,pi_star\n";
                    for (std::size_t i = 0; i < r.size(); ++i) out << i + 1 << ',' << number(res.pi_star[i]) << '\n';
                } else {
                    Json j;
                    j["value"] = res.value;
                    j["pi_star"] = weights_json(res.pi_star);
                    j["i_star"] = res.i_star + 1;
                    j["j_star"] = res.j_star + 1;
                    j["degenerate_constant"] = res.degenerate_constant;
                    j["tie"] = res.tie;
                    out << j.dump() << '\n';
                }
            }
        } else if (oeta->parsed()) {
            const Vector r = *returns_from_flags(true);
            const auto res = pi_s.empty() ? growth::constrained_joint(r, eta)
                                          : growth::phi_eta(parse_weights(pi_s, "--pi"), r, eta);
            if (csv) {
                out << "index,pi_star,q_star\n";
                for (std::size_t i = 0; i < r.size(); ++i)
                    out << i + 1 << ',' << number(res.pi_star[i]) << ',' << number(res.q_star[i]) << '\n';
            } else {
                Json j;
                j["eta"] = eta;
                j["lambda_star"] = json_number(res.lambda_star);
                j["value"] = res.value;
                j["pi_star"] = weights_json(res.pi_star);
                j["q_star"] = weights_json(res.q_star);
                j["kkt_residual"] = res.kkt_residual;
                j["iterations"] = res.iterations;
                out << j.dump() << '\n';
            }
        } else if (oexp->parsed()) {
            const auto S = load_scenarios(scenarios);
            growth::ExpectedEgrOptions opt;
            opt.tol = tol;
            opt.max_iterations = max_iterations;
            auto as_json = [](const growth::ExpectedEgrResult& res) {
                Json j;
                j["pi_star"] = weights_json(res.pi_star);
                j["value"] = res.value;
                j["max_certificate"] = *std::max_element(res.certificate.begin(), res.certificate.end());
                j["certificate"] = res.certificate;
                j["iterations"] = res.iterations;
                return j;
            };
            growth::ExpectedEgrResult res{Weights({1.0}), 0.0, {}, 0, false};
            try {
                res = growth::maximize_expected_egr(S, tol, opt);
            } catch (const growth::ExpectedEgrNoConvergence& e) {
                envelope(std::string(growth::to_string(e.code())), e.message(), as_json(e.best()));
                return kNumericError;
            }
            std::optional<Weights> qa;
            if (quadratic) qa = growth::quadratic_approx_solution(S);
            if (csv) {
                out << "index,pi_star" << (qa ? ",pi_quadratic" : "") << '\n';
                for (std::size_t i = 0; i < S.n(); ++i) {
                    out << i + 1 << ',' << number(res.pi_star[i]);
                    if (qa) out << ',' << number((*qa)[i]);
                    out << '\n';
                }
            } else {
                Json j = as_json(res);
                if (qa) {
                    j["quadratic"]["pi"] = weights_json(*qa);
                    j["quadratic"]["expected_egr"] = growth::expected_egr(*qa, S);
                }
                out << j.dump() << '\n';
            }
        } else if (dsamp->parsed()) {
            growth::ScaledDirichletParams P;
            if (!alpha_s.empty()) {
                if (!pi_s.empty() || !x_s.empty() || !sigma_s.empty())
                    throw UsageError("--alpha excludes the location form (--pi, --x, --sigma)");
                P.alpha = parse_list(alpha_s, "--alpha");
                P.beta = beta_s.empty() ? Vector(P.alpha.size(), 1.0) : parse_list(beta_s, "--beta");
            } else if (!pi_s.empty() && !x_s.empty() && !sigma_s.empty()) {
                const growth::LocationParams L{parse_weights(pi_s, "--pi"), parse_weights(x_s, "--x"),
                                               parse_list(sigma_s, "--sigma").at(0)};
                P = L.to_params();
            } else {
                throw UsageError("give --alpha [--beta], or all of --pi, --x and --sigma");
            }
            const auto draws = growth::sample(P, seed, count);
            if (csv) {
                for (std::size_t i = 0; i < P.size(); ++i) out << (i ? "," : "") << 'y' << i + 1;
                out << '\n';
                for (const auto& w : draws) {
                    for (std::size_t i = 0; i < w.size(); ++i) out << (i ? "," : "") << number(w[i]);
                    out << '\n';
                }
            } else {
                Json rows = Json::array();
                for (const auto& w : draws) rows.push_back(w.vec());
                out << Json{{"seed", seed}, {"samples", rows}}.dump() << '\n';
            }
        } else if (ldp->parsed()) {
            const Weights pi = parse_weights(pi_s, "--pi"), x = parse_weights(x_s, "--x"), y = parse_weights(y_s, "--y");
            const Vector sig = parse_list(sigma_s.empty() ? "0.1,0.01,0.001" : sigma_s, "--sigma");
            const double target = growth::egr_div(pi, y.vec(), x.vec());
            if (csv) {
                out << "sigma,gap\n";
                for (double s : sig) out << number(s) << ',' << number(growth::ldp_gap({pi, x, s}, y.vec())) << '\n';
            } else {
                Json rows = Json::array();
                for (double s : sig) rows.push_back({{"sigma", s}, {"gap", growth::ldp_gap({pi, x, s}, y.vec())}});
                out << Json{{"egr", target}, {"gaps", rows}}.dump() << '\n';
            }
        } else if (renyi->parsed()) {
            const Weights pi = parse_weights(pi_s, "--pi"), x = parse_weights(x_s, "--x"), y = parse_weights(y_s, "--y");
            const double sigma = parse_list(sigma_s, "--sigma").at(0);
            const auto c = growth::renyi_identity_residual(pi, x, y, sigma, {quad_tol, samples, seed});
            const char* method = pi.size() == 2 ? "quadrature" : "monte_carlo";
            if (csv) {
                out << "method,divergence,target,residual,std_error\n"
                    << method << ',' << number(c.divergence) << ',' << number(c.target) << ',' << number(c.residual)
                    << ',' << number(c.std_error) << '\n';
            } else {
                Json j;
                j["method"] = method;
                j["divergence"] = c.divergence;
                j["target"] = c.target;
                j["residual"] = c.residual;
                j["std_error"] = c.std_error;
                out << j.dump() << '\n';
            }
        } else if (self->parsed()) {
            std::vector<int> ids;
            if (!criteria_s.empty())
                for (double v : parse_list(criteria_s, "--criteria")) {
                    if (v != std::floor(v) || v < 1 || v > 14) throw UsageError("--criteria: numbers must be 1..14");
                    ids.push_back(static_cast<int>(v));
                }
            const std::uint64_t s = app.count("--seed") ? seed : acceptance::kDefaultSeed;
            bool ok = true;
            Json rows = Json::array();
            if (csv) out << "criterion,name,passed,seconds,detail\n";
            acceptance::run_all(s, ids, [&](const acceptance::Outcome& o) {
                ok = ok && o.passed;
                err << acceptance::format_line(o) << '\n';
                if (csv)
                    out << o.id << ',' << o.name << ',' << (o.passed ? "true" : "false") << ',' << number(o.seconds)
                        << ",\"" << o.detail << "\"\n";
                else
                    rows.push_back({{"criterion", o.id},
                                    {"name", o.name},
                                    {"passed", o.passed},
                                    {"seconds", o.seconds},
                                    {"detail", o.detail}});
            });
            if (!csv) out << Json{{"passed", ok}, {"criteria", rows}}.dump() << '\n';
            return ok ? kOk : kSelftestFailed;
        }
    } catch (const UsageError& e) {
        envelope("UsageError", e.what());
        return kInputError;
    } catch (const growth::Error& e) {
        envelope(std::string(growth::to_string(e.code())), e.message());
        const bool numeric =
            e.code() == growth::ErrorCode::NoConvergence || e.code() == growth::ErrorCode::QuadratureFailure;
        return numeric ? kNumericError : kInputError;
    }
    return kOk;
}

}  // namespace egrcli
