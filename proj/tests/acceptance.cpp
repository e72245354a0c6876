// acceptance runner: `acceptance <criterion 1..7>` prints detail lines and one verdict line

#include "grushin/control.hpp"
#include "grushin/davies.hpp"
#include "grushin/errors.hpp"
#include "grushin/geometry.hpp"
#include "grushin/runge.hpp"
#include "grushin/semigroup.hpp"
#include "grushin/spectral.hpp"

#include <Eigen/Dense>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace grushin;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// pinned tolerances
constexpr double kC1Tol = 1e-10, kC1Time = 1.0;
constexpr double kC2Residual = 1e-5, kC2Biorth = 1e-8, kC2Norm = 1e-3, kC2Trace = 1e-6, kC2Time = 10.0;
constexpr double kC3Real = 1e-6, kC3Complex = 1e-4, kC3Dense = 1e-9, kC3Time = 120.0;
constexpr double kC4Defect = 1e-4, kC4Refine = 3.0, kC4Spread = 3.0, kC4Time = 60.0;
constexpr double kC5Growth = 10.0, kC5SupBand = 5.0, kC5Bounded = 5.0, kC5Time = 300.0;
constexpr double kC6Residual = 1e-6, kC6Violation = 1e-3, kC6Cond = 1e3, kC6Time = 300.0;
constexpr double kC7Parseval = 1e-10;

struct Report {
    bool ok = true;
    void check(const std::string& what, bool pass, const std::string& detail) {
        if (detail.empty()) std::printf("  [%s] %s\n", pass ? "ok" : "FAIL", what.c_str());
        else std::printf("  [%s] %s: %s\n", pass ? "ok" : "FAIL", what.c_str(), detail.c_str());
        ok = ok && pass;
    }
};

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

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

std::vector<cplx> sample(const std::vector<double>& x, auto f) {
    std::vector<cplx> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = f(x[i]);
    return v;
}

void c1(Report& rep, double& budget) {
    budget = kC1Time;
    auto p = linear();
    auto r = ControlRegion::band(Path::constant(0.3, YTopology::Torus), Path::constant(0.6, YTopology::Torus), 1, 1);
    double t = minimal_time(p, r).upper;
    rep.check("T_* = a^2/2", std::abs(t - 0.045) <= kC1Tol, fmt("T_* = %.17g, |T_* - 0.045| = %.3g", t, std::abs(t - 0.045)));
}

void c2(Report& rep, double& budget) {
    budget = kC2Time;
    LineGrid g{8.0, 40001};
    double worst_res = 0, worst_bi = 0, worst_norm = 0;
    std::uint64_t seed = 1;
    for (cplx beta : {cplx(1.0), std::polar(1.0, kPi / 4), std::polar(2.0, -kPi / 3)}) {
        ComplexParameter b(beta);
        for (int k = 1; k <= 8; ++k) {
            worst_res = std::max(worst_res, davies_eigen_residual(b, k, g));
            worst_bi = std::max(worst_bi, davies_biorthogonality_defect(b, k, g));
        }
        double exact = std::sqrt(std::abs(beta) / beta.real());
        double est = davies_projection_norm_estimate(b, LineGrid{8.0, 8001}, seed++);
        worst_norm = std::max(worst_norm, std::abs(est - exact));
    }
    rep.check("eigen-relation residual, k <= 8", worst_res <= kC2Residual, fmt("max %.3g", worst_res));
    rep.check("biorthogonality defect", worst_bi <= kC2Biorth, fmt("max %.3g", worst_bi));
    rep.check("projection norm vs sqrt(|b|/Re b)", worst_norm <= kC2Norm, fmt("max error %.3g", worst_norm));
    double tr = std::abs(davies_trace_restricted(ComplexParameter(100.0), -0.5, 0.5) - 1.0);
    rep.check("restricted trace at b=100", tr <= kC2Trace, fmt("|trace - 1| = %.3g", tr));
}

cplx dense_lowest(const TridiagonalOperator& op) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(op.n, op.n);
    for (int i = 0; i < op.n; ++i) {
        A(i, i) = op.diag[i];
        if (i + 1 < op.n) {
            A(i, i + 1) = op.super[i];
            A(i + 1, i) = op.sub[i];
        }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
    cplx best = es.eigenvalues()[0];
    for (int i = 1; i < op.n; ++i)
        if (std::abs(es.eigenvalues()[i]) < std::abs(best)) best = es.eigenvalues()[i];
    return best;
}

void c3(Report& rep, double& budget) {
    budget = kC3Time;
    const std::vector<double> nus{10, 20, 40, 80, 160};
    // I = (-2, 2) keeps the wall correction below 1e-12
    auto p = linear(2.0, 4001);
    auto real_rows = eigenvalue_asymptotics_sweep(p, 0.0, nus, 4000);
    double worst = 0;
    for (const auto& r : real_rows) {
        std::printf("    theta=0   |nu|=%5.0f  dev=%.3e  raw dev=%.3e\n", r.modulus, r.deviation,
                    std::abs(r.lambda_raw / r.nu - 1.0));
        worst = std::max(worst, r.deviation);
    }
    rep.check("theta=0 deviation", worst <= kC3Real, fmt("max %.3g", worst));

    auto cplx_rows = eigenvalue_asymptotics_sweep(p, kPi / 4, nus, 4000);
    worst = 0;
    for (const auto& r : cplx_rows) {
        std::printf("    theta=pi/4 |nu|=%5.0f  dev=%.3e\n", r.modulus, r.deviation);
        worst = std::max(worst, r.deviation);
    }
    rep.check("theta=pi/4 deviation", worst <= kC3Complex, fmt("max %.3g", worst));

    double dense_gap = 0;
    for (double m : {10.0, 20.0, 40.0}) {
        cplx nu = std::polar(m, kPi / 4);
        auto op = discretize(p, nu, 600);
        auto e = first_eigenpair(op, p, nu);
        dense_gap = std::max(dense_gap, std::abs(e.lambda - dense_lowest(op)) / m);
    }
    rep.check("theta=pi/4 inverse iteration vs dense solver (n=600)", dense_gap <= kC3Dense, fmt("max %.3g", dense_gap));

    auto c = cubic();
    auto cr = eigenvalue_asymptotics_sweep(c, 0.0, {50, 400}, 4000);
    rep.check("q=x+x^3 deviation at 400 below 50", cr[1].deviation < cr[0].deviation,
              fmt("%.4g (400) vs %.4g (50)", cr[1].deviation, cr[0].deviation));
}

void c4(Report& rep, double& budget) {
    budget = kC4Time;
    auto p = linear();
    auto e4 = first_eigenpair(discretize(p, 40.0, 4000), p, 40.0);
    auto e8 = first_eigenpair(discretize(p, 40.0, 8000), p, 40.0);
    double d4 = agmon_residual(e4, p, 0.5), d8 = agmon_residual(e8, p, 0.5);
    rep.check("Agmon defect at n=4000", d4 <= kC4Defect, fmt("%.3g", d4));
    rep.check("defect decrease under doubling", d4 / d8 >= kC4Refine, fmt("ratio %.3f", d4 / d8));

    double lo = 1e300, hi = 0;
    for (double m : {20.0, 40.0, 80.0, 160.0}) {
        auto e = first_eigenpair(discretize(p, m, 4000), p, m);
        double s = agmon_weighted_sup(e, p, 0.5);
        std::printf("    nu=%4.0f  sup ratio=%.4f\n", m, s);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    rep.check("weighted sup ratio spread", hi / lo <= kC4Spread, fmt("max/min = %.3f", hi / lo));
}

void c5(Report& rep, double& budget) {
    budget = kC5Time;
    auto p = linear();
    const double eps = 0.01, T = 0.1;
    auto U = PacmanRegion::one_sided(agmon_distance(p, -0.6), eps, {0.3, 0.9});
    auto tab = blowup_witness(U, 0.01, std::nullopt, p.q_prime_0() * T * (1 + eps), {10, 20, 30, 40, 50, 60});
    double smin = 1e300, smax = 0;
    for (const auto& r : tab.rows) {
        std::printf("    k=%2d  l2=%.4g  sup=%.4g\n", r.k, r.l2, r.sup);
        smin = std::min(smin, r.sup);
        smax = std::max(smax, r.sup);
    }
    double growth = tab.rows.back().l2 / tab.rows.front().l2;
    rep.check("polynomial L2 growth k=10..60", growth >= kC5Growth, fmt("%.3fx", growth));
    rep.check("polynomial sup band", smax / smin <= kC5SupBand, fmt("max/min = %.3f", smax / smin));

    auto r = ControlRegion::rect_complement(-0.6, {0.3, 0.9}, 1, 1);
    auto ce = counterexample_observability(p, r, T, eps, {10, 20, 30, 40});
    bool inc = true;
    for (std::size_t i = 0; i < ce.rows.size(); ++i) {
        std::printf("    T=0.1  k=%2d  modes=%d  quotient=%.5g\n", ce.rows[i].k, ce.rows[i].modes, ce.rows[i].quotient);
        if (i > 0) inc = inc && ce.rows[i].quotient > ce.rows[i - 1].quotient;
    }
    double qg = ce.rows.back().quotient / ce.rows.front().quotient;
    rep.check("PDE quotient strictly increasing", inc, "");
    rep.check("PDE quotient growth", qg >= kC5Growth, fmt("%.3fx", qg));

    bool none = false;
    try {
        blowup_witness(U, 0.01, std::nullopt, p.q_prime_0() * 0.25 * (1 + eps), {10, 20});
    } catch (const NoCounterexamplePoint&) {
        none = true;
    }
    rep.check("T=0.25 gives NoCounterexamplePoint", none, "");
    auto above = counterexample_observability(p, r, 0.25, eps, {10, 20, 30, 40});
    double amin = 1e300, amax = 0;
    for (const auto& row : above.rows) {
        std::printf("    T=0.25 k=%2d  quotient=%.5g\n", row.k, row.quotient);
        amin = std::min(amin, row.quotient);
        amax = std::max(amax, row.quotient);
    }
    rep.check("T=0.25 quotients bounded", above.consistency_probe && amax / amin <= kC5Bounded,
              fmt("max/min = %.3f", amax / amin));
}

void c6(Report& rep, double& budget) {
    budget = kC6Time;
    auto p = linear();
    const int n_grid = 1000;
    auto x = interior_nodes(p, n_grid);
    auto g0 = sample(x, [](double s) { return (1 - s * s) * std::exp(s); });
    double worst = 0, worst_resim = 0;
    for (int n : {0, 5, 10, 20}) {
        auto mc = strip_null_control(p, n, {0.3, 0.6}, 0.3, 10, 0.001, g0);
        std::printf("    n=%2d  residual=%.3e  resim=%.3e  free=%.3e  cond=%.3e\n", n, mc.residual, mc.residual_resim,
                    mc.free_residual, mc.condition_number);
        worst = std::max(worst, mc.residual);
        worst_resim = std::max(worst_resim, mc.residual_resim);
    }
    rep.check("strip control projected residual", worst <= kC6Residual && worst_resim <= kC6Residual,
              fmt("Gramian %.3g, re-simulated %.3g", worst, worst_resim));

    // band of the figure: offsets -0.35 / -0.05, amplitude 0.15
    auto g1 = Path::from_function([](double y) { return -0.35 + 0.15 * std::sin(y); }, YTopology::Torus);
    auto g2 = Path::from_function([](double y) { return -0.05 + 0.15 * std::sin(y); }, YTopology::Torus);
    auto band = ControlRegion::band(g1, g2, 1, 1);
    auto mid = mid_path(band);
    double lo = 1e300, hi = -1e300;
    for (const auto& q : mid) {
        lo = std::min(lo, q[0]);
        hi = std::max(hi, q[0]);
    }
    std::map<int, std::vector<cplx>> f0;
    for (int n = -2; n <= 2; ++n)
        f0[n] = sample(x, [&](double s) { return (s + 1) * (1 - s) * std::exp(0.25 * n * s) / (1.0 + std::abs(n)); });
    const double T = 0.3, dt = 0.001;
    auto fm = strip_controlled_solution(p, f0, {-1.0, lo}, T, 10, dt);
    auto fp = strip_controlled_solution(p, f0, {hi, 1.0}, T, 10, dt);
    std::vector<double> viol;
    for (int ny : {128, 256, 512}) {
        auto grid = solution_grid(p, n_grid - 1, ny, YTopology::Torus);
        auto chi = build_cutoff(band, 0.1, grid).complement();
        auto ps = patch_controls(fm.solution, fp.solution, chi, p, fm.controls.front().dt, band);
        std::printf("    ny=%d  support violation=%.3e  terminal=%.3e\n", ny, ps.support_violation, ps.terminal_norm);
        viol.push_back(ps.support_violation);
    }
    bool dec = viol[1] < viol[0] && viol[2] < viol[1];
    rep.check("patched support violation at n_grid=1000", viol[0] <= kC6Violation, fmt("%.3g", viol[0]));
    rep.check("violation decreases under refinement", dec, fmt("%.3g -> %.3g -> %.3g", viol[0], viol[1], viol[2]));

    auto a = strip_null_control(p, 20, {0.3, 0.6}, 0.3, 10, 0.001, g0);
    auto b = strip_null_control(p, 20, {0.3, 0.6}, 0.03, 10, 0.0001, g0);
    double growth = b.condition_number / a.condition_number;
    rep.check("condition number growth T=0.3 -> 0.03 (n=20)", growth >= kC6Cond,
              fmt("%.3g -> %.3g, %.1fx", a.condition_number, b.condition_number, growth));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void c7(Report& rep, double& budget) {
    budget = 60.0;
    auto p = linear();
    auto x = interior_nodes(p, 400);
    double worst = 0;
    for (auto topo : {YTopology::Torus, YTopology::Interval}) {
        std::map<int, std::vector<cplx>> g0;
        for (int n : {1, 3, 6})
            g0[n] = sample(x, [&](double s) { return cplx(1 - s * s, 0.1 * n * s) * std::exp(0.3 * n * s); });
        if (topo == YTopology::Torus) g0[-2] = g0[3];
        auto sol = evolve(p, g0, 0.05, 0.001, topo);
        for (std::size_t k = 0; k < sol.times.size(); ++k) {
            double a = sol.mode_energy(k), b = sol.grid_energy(k, 64);
            worst = std::max(worst, std::abs(a - b) / a);
        }
    }
    rep.check("Parseval identity", worst <= kC7Parseval, fmt("max relative defect %.3g", worst));

    auto base = fs::temp_directory_path() / ("grushin_acceptance_" + std::to_string(::getpid()));
    std::vector<fs::path> outs{base / "a", base / "b"};
    bool ran = true;
    for (const auto& o : outs) {
        std::string cmd = std::string("GRUSHIN_LOG=error ") + GRUSHIN_CLI + " simulate --seed 3 --config " +
                          GRUSHIN_CONFIGS + "/simulate.json --out " + o.string() + " 2>/dev/null";
        int st = std::system(cmd.c_str());
        ran = ran && WIFEXITED(st) && WEXITSTATUS(st) == 0;
    }
    bool same = ran;
    int files = 0;
    if (ran)
        for (const auto& e : fs::directory_iterator(outs[0])) {
            if (e.path().extension() != ".csv") continue;
            ++files;
            same = same && slurp(e.path()) == slurp(outs[1] / e.path().filename());
        }
    fs::remove_all(base);
    rep.check("determinism across two CLI runs", same && files > 0, fmt("%d CSV files compared", files));

    std::mt19937_64 rng(20240);
    std::uniform_real_distribution<double> U(0, 1);
    Grid2D g;
    g.nx = 300;
    g.ny = 384;
    int separated = 0;
    for (int k = 0; k < 20; ++k) {
        double c1 = -0.75 + 1.25 * U(rng);
        double w = 0.05 + 0.2 * U(rng);
        double amp = 0.2 * U(rng);
        double freq = 1 + std::floor(4 * U(rng));
        double ph = 2 * kPi * U(rng);
        auto a = Path::from_function([=](double y) { return c1 + amp * std::sin(freq * y + ph); }, YTopology::Torus);
        auto b = Path::from_function([=](double y) { return c1 + w + amp * std::sin(freq * y + ph); }, YTopology::Torus);
        if (separates_boundaries(mid_path(ControlRegion::band(a, b, 1, 1)), g)) ++separated;
    }
    rep.check("randomized band mid-paths separate", separated == 20, fmt("%d / 20", separated));
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <1..7>\n");
        return 2;
    }
    const int c = std::atoi(argv[1]);
    const std::function<void(Report&, double&)> runs[] = {c1, c2, c3, c4, c5, c6, c7};
    if (c < 1 || c > 7) {
        std::fprintf(stderr, "criterion must be 1..7\n");
        return 2;
    }
    Report rep;
    double budget = 0;
    auto t0 = std::chrono::steady_clock::now();
    try {
        runs[c - 1](rep, budget);
    } catch (const std::exception& e) {
        rep.check("no exception", false, e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.check("runtime", secs < budget, fmt("%.2f s (limit %.0f s)", secs, budget));
    std::printf("CRITERION %d: %s\n", c, rep.ok ? "PASS" : "FAIL");
    return rep.ok ? 0 : 1;
}
