#include <gtest/gtest.h>

#include <sstream>

#include "egr.hpp"
#include "oracles.hpp"

using namespace growth;

namespace {
Error error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "no exception";
    return Error(ErrorCode::InvalidArgument, "");
}

ReturnsPanel parse(const std::string& s, PanelFormat fmt = {}) {
    std::istringstream in(s);
    return parse_panel(in, fmt);
}
}  // namespace

TEST(Panel, ParsesGrossAndLogInput) {
    const auto p = parse("period,A,B\n1,1.1,0.9\n2, 1.0 ,1.2\r\n");
    EXPECT_EQ(p.T(), 2u);
    EXPECT_EQ(p.n(), 2u);
    EXPECT_EQ(p.asset_names[1], "B");
    EXPECT_DOUBLE_EQ(p.gross[1][1], 1.2);
    const auto l = parse("period,A\nx,0.0\ny,-0.5\n", {true, ','});
    EXPECT_DOUBLE_EQ(l.gross[1][0], std::exp(-0.5));
    const auto semi = parse("period;A;B\n1;1;2\n", {false, ';'});
    EXPECT_EQ(semi.gross[0][1], 2.0);
}

TEST(Panel, ErrorsNameRowAndColumn) {
    const auto ragged = error_of([] { parse("period,A,B\n1,1.0,1.0\n2,1.0\n"); });
    EXPECT_EQ(ragged.code(), ErrorCode::RaggedRows);
    EXPECT_NE(ragged.message().find("row 2"), std::string::npos);
    const auto neg = error_of([] { parse("period,A,B\n1,1.0,-1.0\n"); });
    EXPECT_EQ(neg.code(), ErrorCode::NonPositiveReturn);
    EXPECT_NE(neg.message().find("row 1, column 2"), std::string::npos);
    const auto bad = error_of([] { parse("period,A\n1,abc\n"); });
    EXPECT_EQ(bad.code(), ErrorCode::ParseError);
    EXPECT_NE(bad.message().find("'abc'"), std::string::npos);
    const auto empty = error_of([] { parse("period,A,B\n"); });
    EXPECT_EQ(empty.code(), ErrorCode::ParseError);
    EXPECT_NE(empty.message().find("T = 0"), std::string::npos);
    EXPECT_EQ(error_of([] { parse(""); }).code(), ErrorCode::ParseError);
    EXPECT_EQ(error_of([] { parse("period,A,A\n1,1,1\n"); }).code(), ErrorCode::ParseError);
    EXPECT_EQ(error_of([] { parse("period,A\n1,0\n"); }).code(), ErrorCode::NonPositiveReturn);
}

TEST(Panel, WriteParseRoundTripIsExact) {
    SyntheticPanelSpec spec;
    spec.n = 4;
    spec.regimes = {{30, 0.02}, {30, 0.1}};
    const auto p = synthetic_panel(spec);
    std::ostringstream out;
    write_panel(out, p);
    const auto q = parse(out.str());
    EXPECT_EQ(q.gross, p.gross);
    EXPECT_EQ(q.asset_names, p.asset_names);
    EXPECT_EQ(q.period_labels, p.period_labels);
}

TEST(Synthetic, DeterministicAndRegimeVolatility) {
    SyntheticPanelSpec spec;
    spec.n = 5;
    spec.regimes = {{2000, 0.01}, {2000, 0.05}};
    spec.seed = 3;
    const auto a = synthetic_panel(spec), b = synthetic_panel(spec);
    EXPECT_EQ(a.gross, b.gross);
    const auto lr = a.log_returns();
    double v1 = 0.0, v2 = 0.0;
    for (std::size_t t = 0; t < 2000; ++t) v1 += lr[t][0] * lr[t][0];
    for (std::size_t t = 2000; t < 4000; ++t) v2 += lr[t][0] * lr[t][0];
    EXPECT_NEAR(std::sqrt(v1 / 2000), 0.01, 0.001);
    EXPECT_NEAR(std::sqrt(v2 / 2000), 0.05, 0.005);
}

TEST(Decomposition, IdentityAndSingleAsset) {
    SyntheticPanelSpec spec;
    spec.n = 6;
    spec.regimes = {{300, 0.03}};
    const auto p = synthetic_panel(spec);
    const auto rep = rebalanced_decomposition(barycenter(6), p);
    EXPECT_NEAR(rep.total_log_return, rep.weighted_avg_log_return + rep.cumulative_egr, 1e-12);
    const auto one = rebalanced_decomposition(Weights({0.0, 0.0, 1.0, 0.0, 0.0, 0.0}), p);
    EXPECT_EQ(one.cumulative_egr, 0.0);
    EXPECT_THROW(rebalanced_decomposition(barycenter(5), p), Error);
}

TEST(Rolling, WindowsCompoundAndDropTheTail) {
    const auto p = parse("period,A,B\n1,1.1,0.9\n2,1.2,1.0\n3,0.8,1.1\n4,1.0,1.0\n5,2.0,0.5\n");
    const auto res = rolling_egr(p, 2, Weighting::fixed(barycenter(2)));
    ASSERT_EQ(res.egr.size(), 2u);
    EXPECT_EQ(res.window_start[1], 2u);
    EXPECT_EQ(res.window_end[1], 3u);
    EXPECT_NEAR(res.egr[0], egr(barycenter(2), Vector{1.1 * 1.2, 0.9 * 1.0}), 1e-15);
    EXPECT_NEAR(res.cumulative[1], res.egr[0] + res.egr[1], 1e-16);
    EXPECT_EQ(error_of([&] { rolling_egr(p, 6, Weighting::equal_top_k(1)); }).code(), ErrorCode::DomainViolation);
    EXPECT_EQ(error_of([&] { rolling_egr(p, 0, Weighting::equal_top_k(1)); }).code(), ErrorCode::DomainViolation);
    EXPECT_EQ(error_of([&] { rolling_egr(p, 1, Weighting::equal_top_k(3)); }).code(), ErrorCode::DomainViolation);
}

TEST(Rolling, TopKFollowsRelativePriceWithLowIndexTies) {
    // Window 1 starts with all levels equal: top-1 is asset A (index 0).
    // After window 1, C leads; window 2 holds C alone, so its EGR is zero.
    const auto p = parse("period,A,B,C\n1,1.0,1.0,1.5\n2,1.3,0.7,1.0\n");
    const auto res = rolling_egr(p, 1, Weighting::equal_top_k(2));
    // window 1: A and B (tie on level, lower index wins)
    EXPECT_NEAR(res.egr[0], egr(Weights({0.5, 0.5, 0.0}), Vector{1.0, 1.0, 1.5}), 1e-16);
    // window 2: C (level log 1.5) and A (0 beats B's 0 by index)
    EXPECT_NEAR(res.egr[1], egr(Weights({0.5, 0.0, 0.5}), Vector{1.3, 0.7, 1.0}), 1e-16);
}
