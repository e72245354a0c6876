#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "grushin/errors.hpp"
#include "grushin/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace grushin;

namespace {

constexpr double kPi = std::numbers::pi;

DegeneracyProfile linear() { return make_profile(ProfileSpec{}); }

DegeneracyProfile cubic() {
    ProfileSpec s;
    s.kind = ProfileSpec::Kind::Cubic;
    s.params = {1.0, 0.0, 1.0};
    return make_profile(s);
}

ControlRegion strip(double a, double b) {
    return ControlRegion::band(Path::constant(a, YTopology::Torus), Path::constant(b, YTopology::Torus), 1, 1);
}

ControlRegion wiggly(double c1, double c2, double amp, double freq = 1, double phase = 0) {
    auto g1 = Path::from_function([=](double y) { return c1 + amp * std::sin(freq * y + phase); }, YTopology::Torus);
    auto g2 = Path::from_function([=](double y) { return c2 + amp * std::sin(freq * y + phase); }, YTopology::Torus);
    return ControlRegion::band(g1, g2, 1, 1);
}

Grid2D grid(int nx = 200, int ny = 256) {
    Grid2D g;
    g.nx = nx;
    g.ny = ny;
    return g;
}

} // namespace

TEST_CASE("minimal_time examples") {
    auto p = linear();
    CHECK(minimal_time(p, strip(-0.5, 0.5)).upper == 0.0);
    auto t = minimal_time(p, strip(0.3, 0.6));
    CHECK(std::abs(t.upper - 0.045) <= 1e-10);
    REQUIRE(t.critical);
    CHECK(*t.critical == t.upper);
    CHECK(std::abs(minimal_time(p, strip(-0.6, -0.3)).upper - 0.045) <= 1e-10);

    auto c = cubic();
    double oracle = 0.3 * 0.3 / 2 + std::pow(0.3, 4) / 4;
    CHECK(std::abs(minimal_time(c, strip(0.3, 0.6)).upper - oracle) <= 1e-10);

    CHECK_THROWS_AS(minimal_time(p, ControlRegion::rect_complement(-0.6, {0.3, 0.9}, 1, 1)), InvalidArgument);
}

TEST_CASE("band construction preconditions") {
    CHECK_THROWS_AS(strip(0.5, 0.5), InvalidArgument);
    CHECK_THROWS_AS(strip(0.5, 1.2), InvalidArgument);
    CHECK_THROWS_AS(ControlRegion::rect_complement(0.2, {0.5, 0.5}, 1, 1), InvalidArgument);
}

TEST_CASE("lower_bound_time examples") {
    auto p = linear();
    auto rc = ControlRegion::rect_complement(-0.6, {0.3, 0.9}, 1, 1);
    auto lb = lower_bound_time(p, rc, 256);
    // half-cell margin at nx = 2000 costs at most 0.6·dx/2
    CHECK(std::abs(lb.lower - 0.18) <= 6.1e-4);
    CHECK(lb.lower <= 0.18);

    CHECK(lower_bound_time(p, strip(-0.5, 0.5), 128).lower == 0.0);

    std::vector<ControlRegion::Rect> rs{{0.25, 1.0, 0.0, kPi}, {-1.0, -0.25, kPi, 2 * kPi}};
    auto two = ControlRegion::rects(rs, 1, 1);
    auto lb2 = lower_bound_time(p, two, 256);
    CHECK(std::abs(lb2.lower - 0.03125) <= 3e-4);
}

TEST_CASE("property: lower bound below critical on randomized bands") {
    auto p = linear();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 20; ++k) {
        double c1 = -0.8 + 1.2 * U(rng);
        double w = 0.1 + 0.2 * U(rng);
        double amp = 0.08 * U(rng);
        if (c1 - amp <= -0.95) c1 = -0.95 + amp + 0.01;
        if (c1 + w + amp >= 0.95) w = 0.94 - c1 - amp;
        auto r = wiggly(c1, c1 + w, amp, 1 + (k % 3), 6 * U(rng));
        auto up = minimal_time(p, r);
        auto lo = lower_bound_time(p, r, 64, 800);
        CHECK(lo.lower <= *up.critical + 1e-12);
    }
}

TEST_CASE("property: minimal_time reduces to d(max gamma1) for positive bands") {
    auto c = cubic();
    auto r = wiggly(0.3, 0.5, 0.1, 2);
    CHECK(std::abs(minimal_time(c, r).upper - agmon_distance(c, r.gamma1().max())) <= 1e-15);
}

TEST_CASE("property: y-rotation invariance") {
    auto p = linear();
    auto r = wiggly(0.2, 0.45, 0.1, 1, 0.4);
    double t0 = minimal_time(p, r).upper;
    for (double dy : {0.3, 1.7, 4.2}) CHECK(std::abs(minimal_time(p, r.rotated(dy)).upper - t0) <= 1e-12);
}

TEST_CASE("raster agrees with membership at cell centres") {
    auto r = wiggly(-0.3, 0.1, 0.1);
    auto g = grid(80, 64);
    auto ras = r.rasterize(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(ras.at(i, j) == r.contains(g.xc(i), g.yc(j)));
}

TEST_CASE("build_cutoff") {
    auto r = strip(-0.2, 0.2);
    auto g = grid(400, 64);
    auto chi = build_cutoff(r, 0.1, g);
    auto ras = r.rasterize(g);
    bool ok_left = true, ok_right = true, ok_range = true, ok_support = true;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double x = g.xc(i), v = chi.at(i, j);
            if (x <= -0.25 && v != 1.0) ok_left = false;
            if (x >= 0.25 && v != 0.0) ok_right = false;
            if (v < 0 || v > 1) ok_range = false;
            if (chi.gradient_support[g.index(i, j)] && !ras.at(i, j)) ok_support = false;
        }
    CHECK(ok_left);
    CHECK(ok_right);
    CHECK(ok_range);
    CHECK(ok_support);

    CHECK_THROWS_AS(build_cutoff(r, 0.4, g), EpsilonTooLarge);

    auto w = wiggly(-0.35, -0.05, 0.15);
    auto gw = grid(400, 256);
    auto cw = build_cutoff(w, 0.05, gw);
    auto rw = w.rasterize(gw);
    std::size_t outside = 0;
    for (std::size_t k = 0; k < cw.values.size(); ++k)
        if (cw.gradient_support[k] && !rw.mask[k]) ++outside;
    CHECK(outside == 0);

    auto comp = cw.complement();
    for (std::size_t k = 0; k < cw.values.size(); k += 97) CHECK(comp.values[k] == 1.0 - cw.values[k]);
}

TEST_CASE("separates_boundaries") {
    auto g = grid(200, 256);
    Polyline graph;
    for (int k = 0; k < 200; ++k) {
        double s = 2 * kPi * k / 200;
        graph.push_back({0.1 * std::sin(s), s});
    }
    CHECK(separates_boundaries(graph, g));

    Polyline loop;
    for (int k = 0; k < 100; ++k) {
        double s = 2 * kPi * k / 100;
        loop.push_back({0.2 + 0.1 * std::cos(s), 3.0 + 0.1 * std::sin(s)});
    }
    CHECK_FALSE(separates_boundaries(loop, g));

    auto w = wiggly(-0.35, -0.05, 0.15);
    CHECK(separates_boundaries(mid_path(w), g));
    CHECK(separates_boundaries(mid_path(w), grid(400, 512)));
}

TEST_CASE("property: randomized band mid-paths separate") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0, 1);
    auto g = grid(300, 384);
    for (int k = 0; k < 20; ++k) {
        double c1 = -0.7 + 1.2 * U(rng);
        double w = 0.05 + 0.2 * U(rng);
        double amp = 0.2 * U(rng);
        auto r = wiggly(std::max(c1, -0.75), std::max(c1, -0.75) + w, amp, 1 + (k % 4), 6 * U(rng));
        CHECK(separates_boundaries(mid_path(r), g));
    }
}
