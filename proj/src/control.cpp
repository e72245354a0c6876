#include "grushin/control.hpp"

#include "grushin/errors.hpp"
#include "grushin/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>
#include <tbb/parallel_for.h>

namespace grushin {

namespace {

double geometric_sum(double x, int K) {
    if (std::abs(1 - x) < 1e-12) return K;
    return (1 - std::pow(x, K)) / (1 - x);
}

double strip_threshold(const DegeneracyProfile& p, std::pair<double, double> s) {
    if (s.first > 0) return agmon_distance(p, s.first) / p.q_prime_0();
    if (s.second < 0) return agmon_distance(p, s.second) / p.q_prime_0();
    return 0.0;
}

std::vector<cplx> project(const SymTridiagEigen& E, double scale, const std::vector<cplx>& g, double h) {
    std::vector<cplx> c(E.m, 0.0);
    for (int j = 0; j < E.m; ++j) {
        cplx s = 0;
        for (int i = 0; i < E.n; ++i) s += E.at(i, j) * scale * g[i];
        c[j] = s * h;
    }
    return c;
}

double vnorm(const std::vector<cplx>& v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

} // namespace

ModeControl strip_null_control(const DegeneracyProfile& p, int n, std::pair<double, double> strip, double T, int M,
                               double dt, const std::vector<cplx>& g0) {
    if (M < 1 || M > 40) throw InvalidArgument("M must lie in [1, 40]");
    if (!(strip.first < strip.second)) throw InvalidArgument("strip must satisfy x1 < x2");
    if (!(T > 0) || !(dt > 0) || dt > T) throw InvalidArgument("need 0 < dt <= T");
    const int nx = static_cast<int>(g0.size());
    auto op = mode_operator(p, n, nx);
    const double h = op.h;

    ModeControl mc;
    mc.n = n;
    mc.strip = strip;
    mc.h = h;
    mc.x = op.x;
    mc.threshold_time = strip_threshold(p, strip);
    if (T <= mc.threshold_time)
        spdlog::warn("T = {} does not exceed the strip threshold {}; attempting anyway", T, mc.threshold_time);
    mc.mask.resize(nx);
    for (int i = 0; i < nx; ++i) mc.mask[i] = op.x[i] > strip.first && op.x[i] < strip.second;
    if (std::count(mc.mask.begin(), mc.mask.end(), 1) == 0) throw EmptyRegion("strip contains no grid node");

    auto E = lowest_eigenpairs(op.diag, std::vector<double>(nx - 1, op.off), M);
    // h-orthonormal modes e_j = v_j / √h
    const double sc = 1.0 / std::sqrt(h);
    const int K = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
    const double tau = T / K;
    mc.dt = tau;
    mc.mode_eigenvalues = E.values;

    std::vector<double> r(M), fac(M);
    for (int j = 0; j < M; ++j) {
        double mu = E.values[j];
        r[j] = (1 - 0.5 * tau * mu) / (1 + 0.5 * tau * mu);
        fac[j] = tau / (1 + 0.5 * tau * mu);
    }
    auto c0 = project(E, sc, g0, h);
    std::vector<cplx> b(M);
    for (int j = 0; j < M; ++j) b[j] = -std::pow(r[j], K) * c0[j];
    mc.free_residual = vnorm(b);
    mc.gramian_rhs = b;

    Eigen::MatrixXd G(M, M);
    for (int j = 0; j < M; ++j)
        for (int l = 0; l <= j; ++l) {
            double s = 0;
            for (int i = 0; i < nx; ++i)
                if (mc.mask[i]) s += E.at(i, j) * E.at(i, l);
            s *= sc * sc * h;
            double v = fac[j] * fac[l] * geometric_sum(r[j] * r[l], K) * s / tau;
            G(j, l) = v;
            G(l, j) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().maxCoeff();
    double lmin = es.eigenvalues().minCoeff();
    mc.condition_number = lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (mc.condition_number > 1e14) throw GramianIllConditioned("Gramian condition number above 1e14");

    Eigen::MatrixXd Gr = G;
    Gr.diagonal().array() += 1e-14 * G.trace();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Gr);
    Eigen::VectorXd br(M), bi(M);
    for (int j = 0; j < M; ++j) {
        br(j) = b[j].real();
        bi(j) = b[j].imag();
    }
    Eigen::VectorXd ar = ldlt.solve(br), ai = ldlt.solve(bi);
    mc.multipliers.resize(M);
    for (int j = 0; j < M; ++j) mc.multipliers[j] = {ar(j), ai(j)};
    Eigen::VectorXd gr = G * ar, gi = G * ai;
    std::vector<cplx> pred(M);
    for (int j = 0; j < M; ++j) pred[j] = cplx(gr(j), gi(j)) - b[j];
    mc.residual = vnorm(pred);

    // u^k = Σ_j α_j fac_j r_j^{K-1-k} / τ · B e_j
    mc.u.assign(K, std::vector<cplx>(nx, 0.0));
    for (int k = 0; k < K; ++k) {
        auto& uk = mc.u[k];
        for (int j = 0; j < M; ++j) {
            cplx w = mc.multipliers[j] * fac[j] * std::pow(r[j], K - 1 - k) / tau * sc;
            if (w == cplx(0)) continue;
            for (int i = 0; i < nx; ++i)
                if (mc.mask[i]) uk[i] += w * E.at(i, j);
        }
        for (const auto& z : uk) mc.energy += std::norm(z) * tau * h;
    }

    CrankNicolson cn(op, tau);
    std::vector<cplx> g = g0;
    mc.times.push_back(0.0);
    mc.states.push_back(g);
    for (int k = 0; k < K; ++k) {
        cn.step(g, &mc.u[k]);
        mc.times.push_back(k + 1 == K ? T : (k + 1) * tau);
        mc.states.push_back(g);
    }
    auto cK = project(E, sc, g, h);
    mc.residual_resim = vnorm(cK);
    std::vector<cplx> rest = g;
    for (int j = 0; j < M; ++j)
        for (int i = 0; i < nx; ++i) rest[i] -= cK[j] * E.at(i, j) * sc;
    double t2 = 0;
    for (const auto& z : rest) t2 += std::norm(z) * h;
    mc.tail_norm = std::sqrt(t2);
    return mc;
}

StripControlledSolution strip_controlled_solution(const DegeneracyProfile& p,
                                                  const std::map<int, std::vector<cplx>>& g0,
                                                  std::pair<double, double> strip, double T, int M, double dt) {
    if (g0.empty()) throw InvalidArgument("no active modes");
    std::vector<std::pair<int, const std::vector<cplx>*>> items;
    for (const auto& [n, v] : g0) items.emplace_back(n, &v);
    StripControlledSolution out;
    out.controls.resize(items.size());
    tbb::parallel_for(std::size_t(0), items.size(), [&](std::size_t k) {
        out.controls[k] = strip_null_control(p, items[k].first, strip, T, M, dt, *items[k].second);
    });
    auto& sol = out.solution;
    sol.y_topology = YTopology::Torus;
    sol.h = out.controls.front().h;
    sol.x = out.controls.front().x;
    sol.times = out.controls.front().times;
    for (const auto& c : out.controls) {
        ModeSolution m;
        m.n = c.n;
        m.h = c.h;
        m.x = c.x;
        m.times = c.times;
        m.states = c.states;
        sol.modes.push_back(std::move(m));
    }
    return out;
}

PatchedSolution patch_controls(const FullSolution& f_minus, const FullSolution& f_plus, const CutoffField& chi,
                               const DegeneracyProfile& p, double dt, const ControlRegion& omega, int max_frames) {
    const Grid2D& g = chi.grid;
    const int nx = g.nx, ny = g.ny;
    const std::size_t K1 = f_minus.times.size();
    if (f_plus.times.size() != K1 || K1 < 2) throw GridMismatch("solutions have different time grids");
    for (std::size_t k = 0; k < K1; ++k)
        if (std::abs(f_minus.times[k] - f_plus.times[k]) > 1e-12) throw GridMismatch("time nodes differ");
    if (f_minus.x.size() != static_cast<std::size_t>(nx) || f_plus.x.size() != static_cast<std::size_t>(nx))
        throw GridMismatch("cutoff raster does not match the solution nodes");
    if (std::abs(g.xc(0) - f_minus.x.front()) > 1e-9 || std::abs(g.xc(nx - 1) - f_minus.x.back()) > 1e-9)
        throw GridMismatch("cutoff cell centres are not the solution nodes");
    if (f_minus.y_topology != g.topo || f_plus.y_topology != g.topo) throw GridMismatch("y topology differs");
    for (std::size_t k = 0; k + 1 < K1; ++k)
        if (std::abs(f_minus.times[k + 1] - f_minus.times[k] - dt) > 1e-9 * dt)
            throw GridMismatch("frames must be stored at every step of size dt");

    PatchedSolution out;
    out.grid = g;
    out.region_mask = omega.rasterize(g).mask;
    // outside ω beyond the stencil band
    std::vector<std::uint8_t> far(out.region_mask.size(), 1);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (!out.region_mask[g.index(i, j)]) continue;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= nx) continue;
                    if (g.topo == YTopology::Torus) jj = (jj + ny) % ny;
                    else if (jj < 0 || jj >= ny) continue;
                    far[g.index(ii, jj)] = 0;
                }
        }

    const double h = f_minus.h, dy = g.dy();
    std::vector<double> q2(nx);
    for (int i = 0; i < nx; ++i) {
        double q = p.q(f_minus.x[i]);
        q2[i] = q * q;
    }
    auto combine = [&](std::size_t k) {
        auto a = f_minus.reconstruct(k, ny);
        auto b = f_plus.reconstruct(k, ny);
        for (std::size_t c = 0; c < a.size(); ++c) a[c] = chi.values[c] * a[c] + (1 - chi.values[c]) * b[c];
        return a;
    };
    // -∂x² f - q² ∂y² f with Dirichlet ends in x, periodic or odd reflection in y
    auto spatial = [&](const std::vector<cplx>& f) {
        std::vector<cplx> L(f.size());
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                cplx c = f[g.index(i, j)];
                cplx l = i > 0 ? f[g.index(i - 1, j)] : 0.0;
                cplx r = i + 1 < nx ? f[g.index(i + 1, j)] : 0.0;
                cplx dn, up;
                if (g.topo == YTopology::Torus) {
                    dn = f[g.index(i, (j + ny - 1) % ny)];
                    up = f[g.index(i, (j + 1) % ny)];
                } else {
                    dn = j > 0 ? f[g.index(i, j - 1)] : -c;
                    up = j + 1 < ny ? f[g.index(i, j + 1)] : -c;
                }
                L[g.index(i, j)] = -(l - 2.0 * c + r) / (h * h) - q2[i] * (dn - 2.0 * c + up) / (dy * dy);
            }
        }
        return L;
    };

    std::size_t stride = std::max<std::size_t>(1, (K1 + max_frames - 1) / std::max(1, max_frames));
    auto fk = combine(0);
    auto Lk = spatial(fk);
    out.times.push_back(f_minus.times[0]);
    out.f.push_back(fk);
    for (std::size_t k = 0; k + 1 < K1; ++k) {
        auto f1 = combine(k + 1);
        auto L1 = spatial(f1);
        const double tau = f_minus.times[k + 1] - f_minus.times[k];
        std::vector<cplx> u(fk.size());
        for (std::size_t c = 0; c < u.size(); ++c) {
            u[c] = (f1[c] - fk[c]) / tau + 0.5 * (L1[c] + Lk[c]);
            double m = std::abs(u[c]);
            if (out.region_mask[c]) out.max_u_inside = std::max(out.max_u_inside, m);
            else if (far[c]) out.max_u_outside = std::max(out.max_u_outside, m);
        }
        bool keep = (k + 1) % stride == 0 || k + 2 == K1;
        if (keep) {
            out.times.push_back(f_minus.times[k + 1]);
            out.f.push_back(f1);
            out.u_times.push_back(0.5 * (f_minus.times[k] + f_minus.times[k + 1]));
            out.u.push_back(std::move(u));
        }
        fk = std::move(f1);
        Lk = std::move(L1);
    }
    double s = 0;
    for (const auto& z : fk) s += std::norm(z);
    out.terminal_norm = std::sqrt(s * h * dy);
    out.terminal_minus = std::sqrt(f_minus.mode_energy(K1 - 1));
    out.terminal_plus = std::sqrt(f_plus.mode_energy(K1 - 1));
    const double biggest = std::max(out.max_u_inside, out.max_u_outside);
    out.support_violation = biggest > 0 ? out.max_u_outside / biggest : 0.0;
    return out;
}

} // namespace grushin
