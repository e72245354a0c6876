#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "grushin/errors.hpp"
#include "grushin/profiles.hpp"

#include <cmath>
#include <functional>

using namespace grushin;

namespace {

DegeneracyProfile linear(double L = 1.0, int grid = 2001) {
    ProfileSpec s;
    s.L_minus = s.L_plus = L;
    s.grid = grid;
    return make_profile(s);
}

DegeneracyProfile cubic() {
    ProfileSpec s;
    s.kind = ProfileSpec::Kind::Cubic;
    s.params = {1.0, 0.0, 1.0};
    return make_profile(s);
}

// recursive adaptive Simpson
double simpson(const std::function<double(double)>& f, double a, double b, double tol, double whole, int depth) {
    double m = 0.5 * (a + b);
    double l = (m - a) / 6 * (f(a) + 4 * f(0.5 * (a + m)) + f(m));
    double r = (b - m) / 6 * (f(m) + 4 * f(0.5 * (m + b)) + f(b));
    if (depth == 0 || std::abs(l + r - whole) < 15 * tol) return l + r + (l + r - whole) / 15;
    return simpson(f, a, m, tol / 2, l, depth - 1) + simpson(f, m, b, tol / 2, r, depth - 1);
}

double adaptive(const std::function<double(double)>& f, double a, double b) {
    return simpson(f, a, b, 1e-13, (b - a) / 6 * (f(a) + 4 * f(0.5 * (a + b)) + f(b)), 40);
}

// classical RK4 on c' = (1 - q'(s)) / (2 q(s)) c for q = s + s³, from the series at s0
double rk4_amplitude_cubic(double x) {
    auto rhs = [](double s, double c) { return (1 - (1 + 3 * s * s)) / (2 * (s + s * s * s)) * c; };
    // series start c ≈ 1 - 3s²/4
    double s = 1e-4;
    double c = 1 + 0.5 * (-1.5) * s * s;
    const int n = 20000;
    double h = (x - s) / n;
    for (int k = 0; k < n; ++k) {
        double k1 = rhs(s, c);
        double k2 = rhs(s + h / 2, c + h / 2 * k1);
        double k3 = rhs(s + h / 2, c + h / 2 * k2);
        double k4 = rhs(s + h, c + h * k3);
        c += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        s += h;
    }
    return c;
}

} // namespace

TEST_CASE("make_profile examples") {
    auto p = linear();
    CHECK(p.q_prime_0() == 1.0);
    CHECK(p.x_grid().size() == 2001);
    CHECK(p.x_grid()[p.zero_index()] == 0.0);

    auto c = cubic();
    CHECK(c.q_prime_0() == doctest::Approx(1.0));

    ProfileSpec t;
    t.kind = ProfileSpec::Kind::Table;
    t.sample_x = {-1, -0.5, 0, 0.5, 1};
    t.sample_q = {-1, -0.5, 0, 0, 1};
    t.q_prime_0 = 1;
    CHECK_THROWS_AS(make_profile(t), HypothesisViolation);

    ProfileSpec bad;
    bad.params = {-1.0};
    CHECK_THROWS_AS(make_profile(bad), HypothesisViolation);
}

TEST_CASE("agmon_distance values") {
    auto p = linear();
    CHECK(agmon_distance(p, 0.6) == doctest::Approx(0.18).epsilon(1e-12));
    CHECK(agmon_distance(p, 0.0) == 0.0);
    CHECK_THROWS_AS(agmon_distance(p, 1.5), OutOfInterval);

    auto c = cubic();
    double oracle = adaptive([](double s) { return s + s * s * s; }, 0.0, 0.5);
    CHECK(std::abs(agmon_distance(c, 0.5) - oracle) <= 1e-8);
    CHECK(std::abs(agmon_distance(c, 0.3) - (0.045 + std::pow(0.3, 4) / 4)) <= 1e-10);
}

TEST_CASE("agmon_distance_tilde endpoints") {
    auto p = linear();
    CHECK(agmon_distance_tilde(p, -1.0).infinite);
    CHECK(agmon_distance_tilde(p, 1.0).infinite);
    CHECK(std::isinf(agmon_distance_tilde(p, 1.0).finite_or()));
    auto v = agmon_distance_tilde(p, 0.6);
    CHECK_FALSE(v.infinite);
    CHECK(v.value == doctest::Approx(0.18).epsilon(1e-12));
}

TEST_CASE("wkb_amplitude") {
    auto p = linear();
    CHECK(wkb_amplitude(p, 0.0) == 1.0);
    CHECK(std::abs(wkb_amplitude(p, 0.7) - 1.0) <= 1e-10);
    CHECK(std::abs(wkb_amplitude(p, -0.9) - 1.0) <= 1e-10);

    auto c = cubic();
    CHECK(wkb_amplitude(c, 0.0) == 1.0);
    // closed form (1 + x²)^{-3/4} and an independent RK4 integration
    double x = 0.5;
    CHECK(std::abs(wkb_amplitude(c, x) - std::pow(1 + x * x, -0.75)) <= 1e-6);
    CHECK(std::abs(wkb_amplitude(c, x) - rk4_amplitude_cubic(x)) <= 1e-6);
    CHECK(std::abs(wkb_amplitude(c, -0.8) - std::pow(1 + 0.64, -0.75)) <= 1e-6);
}

TEST_CASE("property: linear d is x²/2, even, monotone in |x|") {
    auto p = linear();
    double worst = 0;
    for (int k = -100; k <= 100; ++k) {
        double x = 0.0099 * k + 0.00037;
        worst = std::max(worst, std::abs(agmon_distance(p, x) - 0.5 * x * x));
    }
    CHECK(worst <= 1e-10);

    for (auto prof : {linear(), cubic(), linear(2.0, 4001)}) {
        double L = std::min(prof.L_minus(), prof.L_plus());
        double prev = 0;
        for (int k = 0; k <= 400; ++k) {
            double x = L * k / 400.0;
            double d = agmon_distance(prof, x);
            CHECK(std::abs(d - agmon_distance(prof, -x)) <= 1e-10);
            CHECK(d >= 0.0);
            CHECK(d >= prev);
            prev = d;
        }
    }
}

TEST_CASE("property: d_cache sign and strict monotonicity") {
    auto c = cubic();
    const auto& x = c.x_grid();
    const auto& d = c.d_cache();
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] <= 0) CHECK(d[i] < d[i - 1]);
        else CHECK(d[i] > d[i - 1]);
    }
}
