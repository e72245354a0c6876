#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "grushin/davies.hpp"
#include "grushin/errors.hpp"

#include <cmath>
#include <numbers>

using namespace grushin;

namespace {

constexpr double kPi = std::numbers::pi;

// Rodrigues: H_k(x) = (-1)^k e^{x²} d^k/dx^k e^{-x²}, via the polynomial P_k with
// d^k e^{-x²} = P_k e^{-x²}, P_{k+1} = P_k' - 2x P_k
double rodrigues(int k, double x) {
    std::vector<double> P{1.0};
    for (int j = 0; j < k; ++j) {
        std::vector<double> Q(P.size() + 1, 0.0);
        for (std::size_t i = 1; i < P.size(); ++i) Q[i - 1] += i * P[i];
        for (std::size_t i = 0; i < P.size(); ++i) Q[i + 1] -= 2 * P[i];
        P = Q;
    }
    double v = 0;
    for (std::size_t i = P.size(); i-- > 0;) v = v * x + P[i];
    return (k % 2 ? -1 : 1) * v;
}

LineGrid fine() { return {8.0, 40001}; }

} // namespace

TEST_CASE("hermite recurrence vs Rodrigues") {
    CHECK(hermite(5, 1.3) == doctest::Approx(rodrigues(5, 1.3)).epsilon(1e-13));
    for (int k = 0; k <= 12; ++k)
        for (double x : {-1.7, 0.0, 0.4, 2.2}) CHECK(hermite(k, x) == doctest::Approx(rodrigues(k, x)).epsilon(1e-12));
    CHECK_THROWS_AS(hermite(61, 0.1), DegreeTooLarge);
    CHECK(hermite(60, 0.1) != 0.0);
}

TEST_CASE("eigenvalue closed form") {
    ComplexParameter b1(1.0);
    CHECK(davies_eigenvalue(b1, 1) == cplx(1.0));
    CHECK(davies_eigenvalue(b1, 2) == cplx(3.0));
    ComplexParameter b2(std::polar(2.0, kPi / 4));
    CHECK(std::abs(davies_eigenvalue(b2, 3) - 5.0 * std::polar(2.0, kPi / 4)) <= 1e-15);
    CHECK_THROWS_AS(ComplexParameter(cplx(0.0, 1.0)), InvalidArgument);
}

TEST_CASE("eigen-relation residual") {
    for (cplx beta : {cplx(1.0), std::polar(1.0, kPi / 4), std::polar(2.0, -kPi / 3)}) {
        ComplexParameter b(beta);
        for (int k = 1; k <= 8; ++k) CHECK(davies_eigen_residual(b, k, fine()) <= 1e-5);
    }
}

TEST_CASE("biorthogonality") {
    ComplexParameter b(std::polar(1.5, kPi / 5));
    for (int k = 1; k <= 6; ++k) CHECK(davies_biorthogonality_defect(b, k, fine()) <= 1e-8);
}

TEST_CASE("projection") {
    ComplexParameter b(1.0);
    CHECK(davies_projection_norm(b) == doctest::Approx(1.0));
    ComplexParameter b2(std::polar(1.0, kPi / 4));
    CHECK(davies_projection_norm(b2) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-12));
    ComplexParameter b3(cplx(1.0, std::sqrt(3.0)));
    CHECK(davies_projection_norm(b3) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // √(|β|/Re β) is the same number
    CHECK(davies_projection_norm(b3) == doctest::Approx(std::sqrt(std::abs(b3.beta) / b3.beta.real())));

    LineGrid g{8.0, 8001};
    for (auto* bp : {&b, &b2, &b3}) {
        double est = davies_projection_norm_estimate(*bp, g, 42);
        CHECK(std::abs(est - davies_projection_norm(*bp)) <= 1e-3);
    }

    // idempotent, and fixes φ_β
    std::vector<cplx> u(g.n);
    for (int i = 0; i < g.n; ++i) u[i] = std::exp(-std::pow(g.x(i) - 0.7, 2)) * cplx(1.0, g.x(i));
    auto pu = davies_project(b2, g, u);
    auto ppu = davies_project(b2, g, pu);
    double diff = 0, nrm = 0;
    for (int i = 0; i < g.n; ++i) {
        diff = std::max(diff, std::abs(pu[i] - ppu[i]));
        nrm = std::max(nrm, std::abs(pu[i]));
    }
    CHECK(diff <= 1e-12 * nrm);
    auto phi = davies_samples(b2, 1, g);
    auto pphi = davies_project(b2, g, phi);
    for (int i = 0; i < g.n; i += 101) CHECK(std::abs(pphi[i] - phi[i]) <= 1e-12);

    CHECK_THROWS_AS(davies_project(ComplexParameter(cplx(0.2, 1.0)), g, u), TruncationTooSmall);
    CHECK_THROWS_AS(davies_project(b, LineGrid{8.0, 20}, std::vector<cplx>(20)), GridTooCoarse);
}

TEST_CASE("restricted trace") {
    CHECK(std::abs(davies_trace_restricted(ComplexParameter(100.0), -0.5, 0.5) - 1.0) <= 1e-6);
    double inf = std::numeric_limits<double>::infinity();
    CHECK(std::abs(davies_trace_restricted(ComplexParameter(cplx(1.0, 1.0)), -inf, inf) - 1.0) <= 1e-12);
    // β = 1 on (-1, 1): erf(1)
    CHECK(std::abs(davies_trace_restricted(ComplexParameter(1.0), -1, 1) - std::erf(1.0)) <= 1e-12);
    CHECK_THROWS_AS(davies_trace_restricted(ComplexParameter(1.0), 0.1, 1), InvalidArgument);
}
