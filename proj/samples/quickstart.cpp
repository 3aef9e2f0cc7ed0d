// A tour of the main entry points on small inputs.

#include <cstdio>
#include <vector>

#include "egr.hpp"

int main() {
    using namespace growth;

    const Weights pi({0.5, 0.5});
    const std::vector<double> R{2.0, 0.5};
    std::printf("Gamma(pi, R)            = %.17g (log 1.25 = %.17g)\n", egr(pi, R), std::log(1.25));

    const auto best = max_egr(std::vector<double>{0.0, 1.0});
    std::printf("max over pi, r = (0,1)  = %.17g at pi* = (%.6f, %.6f)\n", best.value, best.pi_star[0],
                best.pi_star[1]);

    const auto ball = phi_eta(pi, std::vector<double>{0.0, 1.0}, 0.1);
    std::printf("entropy ball, eta = 0.1 = %.12f (lambda* = %.6f)\n", ball.value, ball.lambda_star);

    const ScenarioSet S({{0.05, -0.02, 0.01}, {-0.03, 0.04, 0.0}, {0.02, 0.01, -0.01}});
    const auto ex = maximize_expected_egr(S, 1e-8);
    std::printf("expected-EGR optimum    = %.12f at (%.6f, %.6f, %.6f)\n", ex.value, ex.pi_star[0], ex.pi_star[1],
                ex.pi_star[2]);

    const LocationParams loc{Weights({0.4, 0.6}), Weights({0.5, 0.5}), 0.01};
    const std::vector<double> y{0.3, 0.7};
    std::printf("LDP gap at sigma = 0.01 = %.6f\n", ldp_gap(loc, y));
    return 0;
}
