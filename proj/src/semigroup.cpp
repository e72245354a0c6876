#include "grushin/semigroup.hpp"

#include "grushin/errors.hpp"
#include "grushin/runge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>
#include <tbb/parallel_for.h>

namespace grushin {

namespace {

constexpr int kMaxFrames = 4096;

double l2sq(const std::vector<cplx>& v, double h) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return s * h;
}

std::vector<double> y_nodes(YTopology topo, int ny) {
    std::vector<double> y(ny);
    double dy = y_length(topo) / ny;
    for (int j = 0; j < ny; ++j) y[j] = (j + 0.5) * dy;
    return y;
}

cplx basis(YTopology topo, int n, double y) {
    return topo == YTopology::Torus ? std::polar(1.0, n * y) : cplx(std::sin(n * y));
}

} // namespace

std::vector<double> ModeOperator::apply(const std::vector<double>& v) const {
    const int m = static_cast<int>(v.size());
    std::vector<double> r(m);
    for (int i = 0; i < m; ++i) {
        double s = diag[i] * v[i];
        if (i > 0) s += off * v[i - 1];
        if (i + 1 < m) s += off * v[i + 1];
        r[i] = s;
    }
    return r;
}

std::vector<double> interior_nodes(const DegeneracyProfile& p, int n_grid) {
    if (n_grid < 3) throw InvalidArgument("n_grid must be >= 3");
    double h = (p.L_minus() + p.L_plus()) / n_grid;
    std::vector<double> x(n_grid - 1);
    for (int i = 0; i < n_grid - 1; ++i) x[i] = -p.L_minus() + (i + 1) * h;
    return x;
}

ModeOperator mode_operator(const DegeneracyProfile& p, int n, int n_interior) {
    ModeOperator op;
    op.n = n;
    op.x = interior_nodes(p, n_interior + 1);
    op.h = (p.L_minus() + p.L_plus()) / (n_interior + 1);
    const double h2 = op.h * op.h;
    op.off = -1.0 / h2;
    op.diag.resize(n_interior);
    double qmax = 0;
    for (int i = 0; i < n_interior; ++i) {
        double q = p.q(op.x[i]);
        qmax = std::max(qmax, q * q);
        op.diag[i] = 2.0 / h2 + double(n) * n * q * q;
    }
    if (h2 * double(n) * n * qmax > 1.0) throw GridTooCoarse("h^2 n^2 max q^2 > 1");
    return op;
}

Grid2D solution_grid(const DegeneracyProfile& p, int n_interior, int ny, YTopology topo) {
    Grid2D g;
    double h = (p.L_minus() + p.L_plus()) / (n_interior + 1);
    g.x0 = -p.L_minus() + 0.5 * h;
    g.x1 = p.L_plus() - 0.5 * h;
    g.nx = n_interior;
    g.ny = ny;
    g.topo = topo;
    return g;
}

CrankNicolson::CrankNicolson(const ModeOperator& op, double tau) : op_(&op), tau_(tau) {
    if (!(tau > 0)) throw InvalidArgument("time step must be positive");
    std::vector<double> d(op.diag.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = 1.0 + 0.5 * tau * op.diag[i];
    std::vector<double> e(d.size() - 1, 0.5 * tau * op.off);
    lhs_ = std::make_shared<SpdTridiag>(std::move(d), std::move(e));
}

void CrankNicolson::step(std::vector<cplx>& g, const std::vector<cplx>* source) const {
    const int m = static_cast<int>(g.size());
    const auto& A = *op_;
    std::vector<cplx> r(m);
    for (int i = 0; i < m; ++i) {
        cplx ag = A.diag[i] * g[i];
        if (i > 0) ag += A.off * g[i - 1];
        if (i + 1 < m) ag += A.off * g[i + 1];
        r[i] = g[i] - 0.5 * tau_ * ag;
        if (source) r[i] += tau_ * (*source)[i];
    }
    lhs_->solve(r);
    g = std::move(r);
}

ModeSolution evolve_mode(const DegeneracyProfile& p, int n, const std::vector<cplx>& g0, double T, double dt,
                         int stride, YTopology topo) {
    if (!(T > 0) || !(dt > 0) || dt > T * (1 + 1e-12)) throw InvalidArgument("need 0 < dt <= T");
    if (g0.size() < 2) throw InvalidArgument("initial profile too short");
    if (topo == YTopology::Interval && n < 1) throw InvalidArgument("sine modes start at n = 1");
    auto op = mode_operator(p, n, static_cast<int>(g0.size()));
    int K = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
    double last = T - (K - 1) * dt;
    if (stride <= 0) stride = (K + kMaxFrames - 1) / kMaxFrames;

    ModeSolution s;
    s.n = n;
    s.y_topology = topo;
    s.h = op.h;
    s.x = op.x;
    s.times.push_back(0.0);
    s.states.push_back(g0);
    CrankNicolson full(op, dt);
    std::unique_ptr<CrankNicolson> tail;
    if (std::abs(last - dt) > 1e-14 * T) tail = std::make_unique<CrankNicolson>(op, last);
    std::vector<cplx> g = g0;
    for (int k = 0; k < K; ++k) {
        bool final = k == K - 1;
        (final && tail ? *tail : full).step(g);
        if (final || (k + 1) % stride == 0) {
            s.times.push_back(final ? T : (k + 1) * dt);
            s.states.push_back(g);
        }
    }
    return s;
}

double FullSolution::basis_norm2() const {
    return y_topology == YTopology::Torus ? 2 * std::numbers::pi : 0.5 * std::numbers::pi;
}

double FullSolution::mode_energy(std::size_t frame) const {
    double s = 0;
    for (const auto& m : modes) s += l2sq(m.states.at(frame), h);
    return basis_norm2() * s;
}

std::vector<cplx> FullSolution::reconstruct(std::size_t frame, int ny) const {
    const std::size_t nx = x.size();
    std::vector<cplx> f(nx * ny, 0.0);
    auto ys = y_nodes(y_topology, ny);
    for (const auto& m : modes) {
        const auto& st = m.states.at(frame);
        for (int j = 0; j < ny; ++j) {
            cplx e = basis(y_topology, m.n, ys[j]);
            cplx* row = f.data() + j * nx;
            for (std::size_t i = 0; i < nx; ++i) row[i] += st[i] * e;
        }
    }
    return f;
}

double FullSolution::grid_energy(std::size_t frame, int ny) const {
    auto f = reconstruct(frame, ny);
    double s = 0;
    for (const auto& z : f) s += std::norm(z);
    return s * h * y_length(y_topology) / ny;
}

FullSolution evolve(const DegeneracyProfile& p, const std::map<int, std::vector<cplx>>& g0, double T, double dt,
                    YTopology topo, int stride) {
    if (g0.empty()) throw InvalidArgument("no active modes");
    std::vector<std::pair<int, const std::vector<cplx>*>> items;
    for (const auto& [n, v] : g0) items.emplace_back(n, &v);
    const std::size_t nx = items.front().second->size();
    for (const auto& it : items)
        if (it.second->size() != nx) throw GridMismatch("mode profiles have different lengths");
    FullSolution sol;
    sol.y_topology = topo;
    sol.modes.resize(items.size());
    tbb::parallel_for(std::size_t(0), items.size(), [&](std::size_t k) {
        sol.modes[k] = evolve_mode(p, items[k].first, *items[k].second, T, dt, stride, topo);
    });
    sol.h = sol.modes.front().h;
    sol.x = sol.modes.front().x;
    sol.times = sol.modes.front().times;
    return sol;
}

FullSolution evolve(const DegeneracyProfile& p, const std::vector<cplx>& field, int ny, int max_mode, double T,
                    double dt, YTopology topo, int stride) {
    if (ny < 1 || field.size() % ny != 0) throw GridMismatch("field size is not a multiple of ny");
    if (2 * max_mode >= ny) throw InvalidArgument("max_mode must stay below ny/2");
    const std::size_t nx = field.size() / ny;
    double fmax = 0;
    for (const auto& v : field) fmax = std::max(fmax, std::abs(v));
    auto ys = y_nodes(topo, ny);
    std::map<int, std::vector<cplx>> modes;
    int lo = topo == YTopology::Torus ? -max_mode : 1;
    for (int n = lo; n <= max_mode; ++n) {
        std::vector<cplx> c(nx, 0.0);
        double w = topo == YTopology::Torus ? 1.0 / ny : 2.0 / ny;
        for (int j = 0; j < ny; ++j) {
            cplx e = std::conj(basis(topo, n, ys[j])) * w;
            for (std::size_t i = 0; i < nx; ++i) c[i] += field[j * nx + i] * e;
        }
        // projections at round-off level are aliasing noise
        bool any = std::any_of(c.begin(), c.end(), [&](cplx z) { return std::abs(z) > 1e-14 * fmax; });
        if (any) modes.emplace(n, std::move(c));
    }
    if (modes.empty()) {
        modes.emplace(topo == YTopology::Torus ? 0 : 1, std::vector<cplx>(nx, 0.0));
    }
    return evolve(p, modes, T, dt, topo, stride);
}

double observability_quotient(const FullSolution& sol, const ControlRegion& r, double T, int ny) {
    if (sol.times.empty() || std::abs(sol.times.back() - T) > 1e-9 * std::max(1.0, T))
        throw InvalidArgument("solution does not end at T");
    Grid2D g;
    g.x0 = sol.x.front() - 0.5 * sol.h;
    g.x1 = sol.x.back() + 0.5 * sol.h;
    g.nx = static_cast<int>(sol.x.size());
    g.ny = ny;
    g.topo = sol.y_topology;
    auto mask = r.rasterize(g);
    if (mask.count() == 0) throw EmptyRegion("control region has no cells on the solution grid");
    const double cell = sol.h * g.dy();
    std::vector<double> dens(sol.times.size());
    tbb::parallel_for(std::size_t(0), sol.times.size(), [&](std::size_t k) {
        auto f = sol.reconstruct(k, ny);
        double s = 0;
        for (std::size_t c = 0; c < f.size(); ++c)
            if (mask.mask[c]) s += std::norm(f[c]);
        dens[k] = s * cell;
    });
    double den = 0;
    for (std::size_t k = 0; k + 1 < dens.size(); ++k)
        den += 0.5 * (dens[k] + dens[k + 1]) * (sol.times[k + 1] - sol.times[k]);
    return sol.mode_energy(sol.times.size() - 1) / den;
}

double eigen_expansion_quotient(const std::vector<ComplexEigenpair>& eigens, const std::vector<cplx>& a,
                                const ControlRegion& r, double T) {
    if (r.kind() != ControlRegion::Kind::RectComplement || r.topology() != YTopology::Torus)
        throw InvalidArgument("eigen expansion quotient needs a rectangle complement on the torus");
    if (eigens.size() < a.size()) throw MissingEigenpair("fewer eigenpairs than coefficients");
    std::vector<int> act;
    for (std::size_t m = 0; m < a.size(); ++m)
        if (a[m] != cplx(0)) act.push_back(static_cast<int>(m));
    if (act.empty()) throw InvalidArgument("zero coefficient vector");
    const auto& ref = eigens[act.front()];
    for (int m : act) {
        if (eigens[m].phi.empty()) throw MissingEigenpair("no eigenpair for mode " + std::to_string(m + 1));
        if (eigens[m].phi.size() != ref.phi.size()) throw GridMismatch("eigenpairs on different grids");
    }
    const std::size_t nx = ref.x.size();
    const double h = ref.h;
    const double xa = r.a();
    const auto W = r.W0();
    const double twopi = 2 * std::numbers::pi;
    const std::size_t K = act.size();

    double num = 0;
    for (int m : act) num += std::norm(a[m]) * std::exp(-2 * eigens[m].lambda.real() * T) * l2sq(eigens[m].phi, h);
    num *= twopi;

    std::vector<double> terms(K, 0.0);
    tbb::parallel_for(std::size_t(0), K, [&](std::size_t i) {
        const auto& ei = eigens[act[i]];
        double acc = 0;
        for (std::size_t j = 0; j < K; ++j) {
            const auto& ej = eigens[act[j]];
            cplx ml = 0, mr = 0;
            for (std::size_t s = 0; s < nx; ++s) {
                cplx v = std::conj(ei.phi[s]) * ej.phi[s];
                (ref.x[s] < xa ? ml : mr) += v;
            }
            ml *= h;
            mr *= h;
            int d = act[j] - act[i];
            cplx win = d == 0 ? cplx(W.second - W.first)
                              : (std::polar(1.0, d * W.second) - std::polar(1.0, d * W.first)) / cplx(0, d);
            cplx y = (d == 0 ? twopi : 0.0) - win;
            cplx L = std::conj(ei.lambda) + ej.lambda;
            cplx G = (1.0 - std::exp(-L * T)) / L;
            cplx term = std::conj(a[act[i]]) * a[act[j]] * G * ((d == 0 ? twopi : 0.0) * ml + y * mr);
            acc += term.real();
        }
        terms[i] = acc;
    });
    double den = 0;
    for (double t : terms) den += t;
    if (!(den > 0)) throw NoConvergence("non-positive observation energy");
    return num / den;
}

CounterexampleTable counterexample_observability(const DegeneracyProfile& p, const ControlRegion& r, double T,
                                                 double epsilon, const std::vector<int>& k_list,
                                                 const CounterexampleOptions& opt) {
    if (r.kind() != ControlRegion::Kind::RectComplement) throw InvalidArgument("region must be a rectangle complement");
    if (!(T > 0)) throw InvalidArgument("T must be positive");
    if (k_list.empty()) throw InvalidArgument("empty k list");
    if (r.a() >= 0) throw InvalidArgument("the excluded rectangle must start at a < 0");
    CounterexampleTable t;
    t.lower_bound = agmon_distance(p, r.a()) / p.q_prime_0();
    t.consistency_probe = T >= t.lower_bound;
    if (t.consistency_probe) spdlog::info("T = {} is above the lower bound {}; consistency probe", T, t.lower_bound);

    auto U = PacmanRegion::one_sided(agmon_distance(p, r.a()), epsilon, r.W0());
    auto V = U.inflate(opt.margin);
    t.z0 = std::polar(V.r_inner + opt.z0_offset, V.arc_center());
    if (V.contains(t.z0)) throw InvalidArgument("z0 offset leaves z0 inside V");
    const auto fit_set = V.boundary(1200);

    std::vector<Polynomial> polys(k_list.size());
    tbb::parallel_for(std::size_t(0), k_list.size(), [&](std::size_t i) {
        if (k_list[i] < 0) throw InvalidArgument("k must be >= 0");
        polys[i] = runge_polynomial(t.z0, opt.degree_factor * k_list[i], fit_set, opt.N + 1);
    });
    int max_deg = 0;
    for (const auto& q : polys) max_deg = std::max(max_deg, q.degree());

    std::vector<ComplexEigenpair> eig(max_deg + 1);
    tbb::parallel_for(opt.N + 1, max_deg + 1, [&](int m) {
        cplx nu(m + 1.0, 0.0);
        eig[m] = first_eigenpair(discretize(p, nu, opt.n_grid), p, nu);
    });

    for (std::size_t i = 0; i < k_list.size(); ++i) {
        const auto& a = polys[i].coeffs;
        CounterexampleRow row;
        row.k = k_list[i];
        row.modes = static_cast<int>(a.size()) - (opt.N + 1);
        row.quotient = eigen_expansion_quotient(eig, a, r, T);
        double tot = 0, tail = 0;
        std::size_t cut = a.size() - std::max<std::size_t>(1, (a.size() - opt.N - 1) / 4);
        for (std::size_t m = opt.N + 1; m < a.size(); ++m) {
            double w = std::norm(a[m]) * std::exp(-2 * eig[m].lambda.real() * T) * l2sq(eig[m].phi, eig[m].h);
            tot += w;
            if (m >= cut) tail += w;
        }
        row.tail_fraction = tot > 0 ? tail / tot : 0;
        if (row.tail_fraction > 1e-8)
            spdlog::warn("TruncationWarning: k = {} tail energy fraction {:.3g}", row.k, row.tail_fraction);
        t.rows.push_back(row);
    }
    return t;
}

} // namespace grushin
