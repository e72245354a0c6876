#include "config.hpp"
#include "output.hpp"

#include "grushin/control.hpp"
#include "grushin/davies.hpp"
#include "grushin/errors.hpp"
#include "grushin/runge.hpp"
#include "grushin/semigroup.hpp"
#include "grushin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <tbb/global_control.h>

namespace fs = std::filesystem;
using namespace grushin;
using namespace grushin::cli;

namespace {

struct Context {
    ExperimentConfig cfg;
    fs::path out;
    Manifest manifest;
};

double need(const std::optional<double>& v, const char* key) {
    if (!v) throw ConfigError(std::string("missing key '") + key + "'");
    return *v;
}

void emit(Context& ctx, const std::string& name, const std::vector<std::string>& header,
          const std::vector<std::vector<double>>& rows) {
    write_csv(ctx.out / name, header, rows);
    ctx.manifest.outputs.push_back(name);
}

void run_mintime(Context& ctx) {
    auto p = build_profile(ctx.cfg);
    auto r = build_region(ctx.cfg, p);
    std::vector<std::vector<double>> rows;
    std::optional<TimeBounds> up;
    if (r.kind() == ControlRegion::Kind::Band) up = minimal_time(p, r);
    auto lo = lower_bound_time(p, r, ctx.cfg.probe_count);
    double t_star = up ? up->upper : std::numeric_limits<double>::quiet_NaN();
    rows.push_back({t_star, lo.lower, lo.seg_a, lo.seg_b, lo.y0});
    emit(ctx, "mintime.csv", {"T_star", "T_lower", "seg_a", "seg_b", "y0"}, rows);
    if (up) ctx.manifest.summary["T_star"] = t_star;
    ctx.manifest.summary["T_lower"] = lo.lower;
    spdlog::info("T_* = {}, lower bound = {}", t_star, lo.lower);
}

void run_spectrum(Context& ctx) {
    auto p = build_profile(ctx.cfg);
    if (ctx.cfg.nus.empty()) throw ConfigError("nus must be a nonempty list");
    auto tab = eigenvalue_asymptotics_sweep(p, ctx.cfg.theta, ctx.cfg.nus, ctx.cfg.n_grid, ctx.cfg.richardson);
    std::vector<std::vector<double>> rows;
    double worst = 0;
    for (const auto& r : tab) {
        rows.push_back({r.nu.real(), r.nu.imag(), r.lambda.real(), r.lambda.imag(), r.residual, r.deviation,
                        r.lambda_raw.real(), r.lambda_raw.imag()});
        worst = std::max(worst, r.deviation);
    }
    emit(ctx, "spectrum.csv",
         {"re_nu", "im_nu", "re_lambda", "im_lambda", "residual", "deviation", "re_lambda_raw", "im_lambda_raw"}, rows);
    ctx.manifest.summary["max_deviation"] = worst;
}

void run_agmon(Context& ctx) {
    auto p = build_profile(ctx.cfg);
    double eps = need(ctx.cfg.epsilon, "epsilon");
    if (ctx.cfg.nus.empty()) throw ConfigError("nus must be a nonempty list");
    std::vector<std::vector<double>> rows;
    double worst = 0, smin = INFINITY, smax = 0;
    for (double m : ctx.cfg.nus) {
        cplx nu = std::polar(m, ctx.cfg.theta);
        auto e = first_eigenpair(discretize(p, nu, ctx.cfg.n_grid), p, nu);
        double d = agmon_residual(e, p, eps);
        double s = agmon_weighted_sup(e, p, eps);
        rows.push_back({nu.real(), nu.imag(), d, s});
        worst = std::max(worst, d);
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    emit(ctx, "agmon.csv", {"re_nu", "im_nu", "defect", "weighted_sup"}, rows);
    ctx.manifest.summary["max_defect"] = worst;
    ctx.manifest.summary["sup_spread"] = smax / smin;
}

void run_davies(Context& ctx) {
    const auto& c = ctx.cfg;
    if (c.betas.empty()) throw ConfigError("betas must be a nonempty list");
    LineGrid g{c.line_X, c.line_n};
    std::vector<std::vector<double>> rows, proj;
    double worst_res = 0, worst_bi = 0, worst_norm = 0;
    for (std::size_t i = 0; i < c.betas.size(); ++i) {
        ComplexParameter b(c.betas[i]);
        for (int k = 1; k <= c.k_max; ++k) {
            double r = davies_eigen_residual(b, k, g);
            double d = davies_biorthogonality_defect(b, k, g);
            cplx lam = davies_eigenvalue(b, k);
            rows.push_back({b.beta.real(), b.beta.imag(), double(k), lam.real(), lam.imag(), r, d});
            worst_res = std::max(worst_res, r);
            worst_bi = std::max(worst_bi, d);
        }
        double exact = davies_projection_norm(b);
        double est = davies_projection_norm_estimate(b, g, ctx.manifest.seed + i);
        cplx tr = davies_trace_restricted(b, -0.5, 0.5);
        proj.push_back({b.beta.real(), b.beta.imag(), exact, est, tr.real(), tr.imag()});
        worst_norm = std::max(worst_norm, std::abs(est - exact));
    }
    emit(ctx, "davies_modes.csv", {"re_beta", "im_beta", "k", "re_lambda", "im_lambda", "residual", "biorthogonality_defect"}, rows);
    emit(ctx, "davies_projection.csv",
         {"re_beta", "im_beta", "norm_exact", "norm_estimate", "re_trace_half", "im_trace_half"}, proj);
    ctx.manifest.summary["max_residual"] = worst_res;
    ctx.manifest.summary["max_biorthogonality_defect"] = worst_bi;
    ctx.manifest.summary["max_norm_error"] = worst_norm;
}

void write_grid(Context& ctx, const std::string& name, const std::vector<double>& x, int ny, YTopology topo,
                const std::vector<cplx>& f) {
    std::vector<std::vector<double>> rows;
    const double dy = y_length(topo) / ny;
    for (int j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < x.size(); ++i) {
            const cplx v = f[j * x.size() + i];
            rows.push_back({x[i], (j + 0.5) * dy, v.real(), v.imag()});
        }
    emit(ctx, name, {"x", "y", "re", "im"}, rows);
}

std::vector<std::size_t> pick_frames(std::size_t total, int want) {
    std::vector<std::size_t> f;
    int n = std::max(2, want);
    for (int k = 0; k < n; ++k) {
        std::size_t idx = static_cast<std::size_t>(std::llround(double(k) * (total - 1) / (n - 1)));
        if (f.empty() || f.back() != idx) f.push_back(idx);
    }
    return f;
}

void run_simulate(Context& ctx) {
    const auto& c = ctx.cfg;
    auto p = build_profile(c);
    double T = need(c.T, "T"), dt = need(c.dt, "dt");
    auto sol = evolve(p, initial_modes(c, p), T, dt);
    std::vector<std::vector<double>> energy;
    double worst = 0;
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
        double me = sol.mode_energy(k), ge = sol.grid_energy(k, c.ny);
        double d = std::abs(me - ge) / std::max(me, std::numeric_limits<double>::min());
        worst = std::max(worst, d);
        energy.push_back({sol.times[k], me, ge, d});
    }
    emit(ctx, "energy.csv", {"t", "mode_energy", "grid_energy", "parseval_defect"}, energy);
    int idx = 0;
    for (auto k : pick_frames(sol.times.size(), c.frames)) {
        char name[64];
        std::snprintf(name, sizeof name, "frame_%04d.csv", idx++);
        write_grid(ctx, name, sol.x, c.ny, sol.y_topology, sol.reconstruct(k, c.ny));
    }
    ctx.manifest.summary["max_parseval_defect"] = worst;
    ctx.manifest.summary["final_energy"] = energy.back()[1];
}

void run_observability(Context& ctx, const std::string& mode) {
    const auto& c = ctx.cfg;
    auto p = build_profile(c);
    auto r = build_region(c, p);
    if (r.kind() != ControlRegion::Kind::RectComplement) throw ConfigError("observability needs a rect_complement region");
    double T = need(c.T, "T"), eps = need(c.epsilon, "epsilon");
    if (c.k_list.empty()) throw ConfigError("k_list must be a nonempty list");
    if (mode == "polynomial") {
        auto U = PacmanRegion::one_sided(agmon_distance(p, r.a()), eps, r.W0());
        double T_eff = p.q_prime_0() * T * (1 + eps);
        try {
            auto tab = blowup_witness(U, c.margin, std::nullopt, T_eff, c.k_list, c.N, c.degree_factor);
            std::vector<std::vector<double>> rows;
            double smin = INFINITY, smax = 0;
            for (const auto& row : tab.rows) {
                rows.push_back({double(row.k), row.l2, row.sup, row.ratio});
                smin = std::min(smin, row.sup);
                smax = std::max(smax, row.sup);
            }
            emit(ctx, "blowup.csv", {"k", "l2", "sup", "ratio"}, rows);
            ctx.manifest.summary["no_counterexample_point"] = false;
            ctx.manifest.summary["re_z0"] = tab.z0.real();
            ctx.manifest.summary["im_z0"] = tab.z0.imag();
            ctx.manifest.summary["l2_growth"] = tab.rows.back().l2 / tab.rows.front().l2;
            ctx.manifest.summary["sup_band"] = smax / smin;
        } catch (const NoCounterexamplePoint& e) {
            spdlog::info("{}", e.what());
            ctx.manifest.summary["no_counterexample_point"] = true;
        }
        return;
    }
    if (mode != "pde") throw ConfigError("--mode must be polynomial or pde");
    CounterexampleOptions opt;
    opt.N = c.N;
    opt.margin = c.margin;
    opt.z0_offset = c.z0_offset;
    opt.degree_factor = c.degree_factor;
    opt.n_grid = c.n_grid;
    auto tab = counterexample_observability(p, r, T, eps, c.k_list, opt);
    std::vector<std::vector<double>> rows;
    double qmax = 0;
    for (const auto& row : tab.rows) {
        rows.push_back({double(row.k), row.quotient, double(row.modes), row.tail_fraction});
        qmax = std::max(qmax, row.quotient);
    }
    emit(ctx, "quotients.csv", {"k", "quotient", "modes", "tail_fraction"}, rows);
    ctx.manifest.summary["max_quotient"] = qmax;
    ctx.manifest.summary["quotient_growth"] = tab.rows.back().quotient / tab.rows.front().quotient;
    ctx.manifest.summary["consistency_probe"] = tab.consistency_probe;
}

void run_control(Context& ctx) {
    const auto& c = ctx.cfg;
    auto p = build_profile(c);
    double T = need(c.T, "T"), dt = need(c.dt, "dt");
    auto f0 = initial_modes(c, p);
    if (c.strip) {
        auto sc = strip_controlled_solution(p, f0, *c.strip, T, c.M, dt);
        std::vector<std::vector<double>> rows;
        double worst = 0, cmax = 0;
        for (const auto& m : sc.controls) {
            rows.push_back({double(m.n), m.residual, m.residual_resim, m.free_residual, m.tail_norm, m.energy,
                            m.condition_number});
            worst = std::max(worst, m.residual);
            cmax = std::max(cmax, m.condition_number);
        }
        emit(ctx, "control_modes.csv",
             {"n", "residual", "residual_resim", "free_residual", "tail_norm", "energy", "condition_number"}, rows);
        ctx.manifest.summary["max_residual"] = worst;
        ctx.manifest.summary["max_condition_number"] = cmax;
    }
    if (c.region_json) {
        auto r = build_region(c, p);
        if (r.kind() != ControlRegion::Kind::Band) throw ConfigError("patching needs a band region");
        double eps = need(c.epsilon, "epsilon");
        auto mid = mid_path(r);
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& q : mid) {
            lo = std::min(lo, q[0]);
            hi = std::max(hi, q[0]);
        }
        auto fm = strip_controlled_solution(p, f0, {-p.L_minus(), lo}, T, c.M, dt);
        auto fp = strip_controlled_solution(p, f0, {hi, p.L_plus()}, T, c.M, dt);
        auto grid = solution_grid(p, c.n_grid - 1, c.ny, r.topology());
        // built cutoff is 1 on the left; the combination wants 1 on ω₊
        auto chi = build_cutoff(r, eps, grid).complement();
        auto ps = patch_controls(fm.solution, fp.solution, chi, p, fm.controls.front().dt, r);
        emit(ctx, "patch.csv",
             {"max_u_inside", "max_u_outside", "support_violation", "terminal_norm", "terminal_minus", "terminal_plus"},
             {{ps.max_u_inside, ps.max_u_outside, ps.support_violation, ps.terminal_norm, ps.terminal_minus,
               ps.terminal_plus}});
        write_grid(ctx, "patched_u_last.csv", fm.solution.x, c.ny, r.topology(), ps.u.back());
        ctx.manifest.summary["support_violation"] = ps.support_violation;
        ctx.manifest.summary["terminal_norm"] = ps.terminal_norm;
    }
    if (!c.strip && !c.region_json) throw ConfigError("control needs a strip or a band region");
}

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Hypothesis: return 3;
    case ErrorKind::Numerical: return 4;
    }
    return 4;
}

void setup_logging() {
    const char* env = std::getenv("GRUSHIN_LOG");
    std::string lvl = env ? env : "info";
    spdlog::level::level_enum level;
    if (lvl == "error") level = spdlog::level::err;
    else if (lvl == "info") level = spdlog::level::info;
    else if (lvl == "debug") level = spdlog::level::debug;
    else throw ConfigError("GRUSHIN_LOG must be error, info or debug");
    spdlog::set_default_logger(spdlog::stderr_color_st("grushin"));
    spdlog::set_level(level);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Baouendi-Grushin controllability experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_dir = "out";
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    unsigned long long seed = 0;
    std::string obs_mode = "polynomial";
    app.add_option("--config", config_path, "experiment JSON")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for randomized estimates");
    const char* names[] = {"mintime", "spectrum", "agmon", "davies", "simulate", "observability", "control"};
    std::map<std::string, CLI::App*> subs;
    for (const char* n : names) subs[n] = app.add_subcommand(n);
    subs["observability"]->add_option("--mode", obs_mode, "polynomial or pde");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        setup_logging();
        tbb::global_control gc(tbb::global_control::max_allowed_parallelism, threads);
        Context ctx;
        ctx.cfg = load_config(config_path);
        ctx.out = out_dir;
        fs::create_directories(ctx.out);
        ctx.manifest.config_hash = sha256_hex(ctx.cfg.text);
        ctx.manifest.seed = seed;
        ctx.manifest.threads = threads;
        std::string cmd;
        for (auto& [n, s] : subs)
            if (s->parsed()) cmd = n;
        ctx.manifest.command = cmd;
        if (cmd == "mintime") run_mintime(ctx);
        else if (cmd == "spectrum") run_spectrum(ctx);
        else if (cmd == "agmon") run_agmon(ctx);
        else if (cmd == "davies") run_davies(ctx);
        else if (cmd == "simulate") run_simulate(ctx);
        else if (cmd == "observability") run_observability(ctx, obs_mode);
        else if (cmd == "control") run_control(ctx);
        ctx.manifest.write(ctx.out);
        return 0;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 4;
    }
}
