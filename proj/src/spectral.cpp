#include "grushin/spectral.hpp"

#include "grushin/errors.hpp"
#include "grushin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <tbb/parallel_for.h>

namespace grushin {

namespace {

constexpr int kMaxIterations = 200;
constexpr int kFixedShiftSteps = 5;
const double kLogOverflow = std::log(1e280);

double norm2(const std::vector<cplx>& v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

cplx bilinear_dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double diag_inf_norm(const TridiagonalOperator& op) {
    double m = 0;
    for (const auto& d : op.diag) m = std::max(m, std::abs(d));
    return m;
}

void check_epsilon(double epsilon) {
    if (!(epsilon > 0 && epsilon <= 1)) throw InvalidArgument("epsilon must lie in (0, 1]");
}

// log|w| and arg w of w = e^{νκ}φ, κ = (1-ε)d
struct LogWeighted {
    std::vector<double> logmod, phase;
    double max_log = -std::numeric_limits<double>::infinity();
};

LogWeighted weighted(const ComplexEigenpair& e, const DegeneracyProfile& p, double epsilon,
                     const std::vector<cplx>& phi) {
    LogWeighted r;
    r.logmod.resize(phi.size());
    r.phase.resize(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        cplx nk = e.nu * ((1 - epsilon) * agmon_distance(p, e.x[i]));
        double a = std::abs(phi[i]);
        r.logmod[i] = a > 0 ? nk.real() + std::log(a) : -std::numeric_limits<double>::infinity();
        r.phase[i] = nk.imag() + std::arg(phi[i]);
        r.max_log = std::max(r.max_log, r.logmod[i]);
    }
    if (r.max_log > kLogOverflow) throw OverflowGuard("weighted eigenfunction exceeds 1e280");
    return r;
}

} // namespace

std::vector<cplx> TridiagonalOperator::apply(const std::vector<cplx>& v) const {
    std::vector<cplx> r(n);
    for (int i = 0; i < n; ++i) {
        cplx s = diag[i] * v[i];
        if (i > 0) s += sub[i - 1] * v[i - 1];
        if (i + 1 < n) s += super[i] * v[i + 1];
        r[i] = s;
    }
    return r;
}

cplx ComplexEigenpair::phi_at(double xq, double L_minus, double L_plus) const {
    if (xq <= -L_minus || xq >= L_plus) return 0.0;
    double s = (xq + L_minus) / h;
    int j = static_cast<int>(std::floor(s));
    double f = s - j;
    // node j sits at x[j-1]; j = 0 and j = n+1 are the Dirichlet ends
    auto node = [&](int k) -> cplx {
        if (k <= 0 || k > static_cast<int>(phi.size())) return 0.0;
        return phi[k - 1];
    };
    return (1 - f) * node(j) + f * node(j + 1);
}

TridiagonalOperator discretize(const DegeneracyProfile& p, cplx nu, int n_grid) {
    if (n_grid < 200) throw InvalidArgument("n_grid must be >= 200");
    if (!(nu.real() > 0)) throw InvalidArgument("Re(nu) must be positive");
    TridiagonalOperator op;
    op.nu = nu;
    op.n = n_grid - 1;
    op.h = (p.L_minus() + p.L_plus()) / n_grid;
    const double h2 = op.h * op.h;
    const cplx nu2 = nu * nu;
    op.x.resize(op.n);
    op.diag.resize(op.n);
    op.sub.assign(op.n - 1, cplx(-1.0 / h2));
    op.super = op.sub;
    double qmax = 0;
    for (int i = 0; i < op.n; ++i) {
        double x = -p.L_minus() + (i + 1) * op.h;
        double q = p.q(x);
        op.x[i] = x;
        qmax = std::max(qmax, q * q);
        op.diag[i] = 2.0 / h2 + nu2 * (q * q);
    }
    if (h2 * std::norm(nu) * qmax > 1.0) throw GridTooCoarse("h^2 |nu|^2 max q^2 > 1");
    return op;
}

ComplexEigenpair first_eigenpair(const TridiagonalOperator& op, const DegeneracyProfile& p, cplx nu) {
    if (std::abs(nu) < 1) throw InvalidArgument("|nu| must be >= 1");
    const double a = p.q_prime_0();
    const cplx target = a * nu;
    const double tol = 1e-10 * diag_inf_norm(op);

    auto shifted = [&](cplx s) {
        std::vector<cplx> d(op.diag);
        for (auto& v : d) v -= s;
        ComplexTridiagLU lu(op.sub, d, op.super);
        if (lu.singular()) {
            s *= 1.0 + 1e-6;
            d = op.diag;
            for (auto& v : d) v -= s;
            lu = ComplexTridiagLU(op.sub, d, op.super);
            if (lu.singular()) throw ShiftOnSpectrum("shift is an eigenvalue of the discretization");
        }
        return lu;
    };

    const cplx nq = std::pow(nu, 0.25);
    std::vector<cplx> gauss(op.n);
    for (int i = 0; i < op.n; ++i) gauss[i] = nq * std::exp(-0.5 * target * op.x[i] * op.x[i]);

    std::vector<cplx> v = gauss;
    double nv = norm2(v);
    for (auto& z : v) z /= nv;

    ComplexTridiagLU fixed = shifted(target);
    cplx rho = target;
    double res = std::numeric_limits<double>::infinity();
    int it = 0;
    int polish = 0;
    std::vector<cplx> best_v;
    cplx best_rho = rho;
    double best_res = res;
    for (; it < kMaxIterations; ++it) {
        if (it < kFixedShiftSteps) {
            fixed.solve(v);
        } else {
            try {
                shifted(rho).solve(v);
            } catch (const ShiftOnSpectrum&) {
                break;
            }
        }
        nv = norm2(v);
        if (!(nv > 0) || !std::isfinite(nv)) break;
        for (auto& z : v) z /= nv;
        auto av = op.apply(v);
        rho = bilinear_dot(v, av) / bilinear_dot(v, v);
        double r2 = 0;
        for (int i = 0; i < op.n; ++i) r2 += std::norm(av[i] - rho * v[i]);
        res = std::sqrt(r2);
        if (res < best_res) {
            best_res = res;
            best_rho = rho;
            best_v = v;
        }
        if (it >= kFixedShiftSteps && best_res <= tol && ++polish > 2) break;
    }
    if (best_v.empty() || !(best_res <= tol)) throw NoConvergence("inverse iteration did not converge");
    if (std::abs(best_rho - target) > a * std::abs(nu))
        throw NoConvergence("eigenvalue outside the localization disk");

    ComplexEigenpair e;
    e.nu = nu;
    e.lambda = best_rho;
    e.residual = best_res;
    e.iterations = it;
    e.h = op.h;
    e.x = op.x;
    const cplx vv = bilinear_dot(best_v, best_v);
    e.pairing_denominator = vv;
    cplx scale = 1.0 / std::sqrt(vv * op.h);
    e.phi_raw = best_v;
    for (auto& z : e.phi_raw) z *= scale;
    auto peak = std::max_element(e.phi_raw.begin(), e.phi_raw.end(),
                                 [](cplx l, cplx r) { return std::abs(l) < std::abs(r); });
    if (peak->real() < 0)
        for (auto& z : e.phi_raw) z = -z;
    cplx c = bilinear_dot(e.phi_raw, gauss) * op.h;
    e.phi = e.phi_raw;
    for (auto& z : e.phi) z *= c;
    return e;
}

std::vector<AsymptoticsRow> eigenvalue_asymptotics_sweep(const DegeneracyProfile& p, double theta,
                                                         const std::vector<double>& nus, int n_grid,
                                                         bool richardson) {
    if (std::abs(theta) > 1.2) throw InvalidArgument("|theta| above the 1.2 rad operating range");
    std::vector<AsymptoticsRow> rows(nus.size());
    tbb::parallel_for(std::size_t(0), nus.size(), [&](std::size_t k) {
        AsymptoticsRow r;
        r.modulus = nus[k];
        r.nu = std::polar(nus[k], theta);
        auto coarse = first_eigenpair(discretize(p, r.nu, n_grid), p, r.nu);
        r.lambda_raw = coarse.lambda;
        r.lambda = coarse.lambda;
        r.residual = coarse.residual;
        if (richardson) {
            auto fine = first_eigenpair(discretize(p, r.nu, 2 * n_grid), p, r.nu);
            r.lambda = (4.0 * fine.lambda - coarse.lambda) / 3.0;
            r.residual = fine.residual;
        }
        r.ratio = r.lambda / (p.q_prime_0() * r.nu);
        r.deviation = std::abs(r.ratio - 1.0);
        rows[k] = r;
    });
    return rows;
}

double agmon_residual(const ComplexEigenpair& e, const DegeneracyProfile& p, double epsilon) {
    check_epsilon(epsilon);
    auto lw = weighted(e, p, epsilon, e.phi);
    const std::size_t n = e.phi.size();
    std::vector<cplx> w(n + 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) w[i + 1] = std::polar(std::exp(lw.logmod[i] - lw.max_log), lw.phase[i]);
    const double h = e.h;
    const double th = std::arg(e.nu);
    const double mu = (std::exp(cplx(0, -th)) * e.lambda).real() / std::cos(th);
    const double nu2 = std::norm(e.nu);
    double grad = 0, pot = 0, mass = 0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) grad += std::norm(w[i + 1] - w[i]) / h;
    for (std::size_t i = 0; i < n; ++i) {
        double q = p.q(e.x[i]);
        double kp = (1 - epsilon) * q;
        double m = std::norm(w[i + 1]) * h;
        pot += (nu2 * (q * q - kp * kp) - mu) * m;
        mass += m;
    }
    return std::abs(grad + pot) / (nu2 * mass);
}

double agmon_weighted_sup(const ComplexEigenpair& e, const DegeneracyProfile& p, double epsilon) {
    check_epsilon(epsilon);
    auto lw = weighted(e, p, epsilon, e.phi);
    return std::exp(lw.max_log) / std::abs(e.nu);
}

cplx SymbolTable::gamma(int m) const {
    if (!covers(m)) throw DegreeRange("symbol index outside the table");
    return values[static_cast<std::size_t>(m + 1 - N_min)];
}

SymbolTable symbol_table(const DegeneracyProfile& p, double t, double x, double epsilon, int N_min, int N_max,
                         const std::map<int, ComplexEigenpair>& eigens) {
    if (t < 0) throw InvalidArgument("t must be >= 0");
    if (N_min < 1 || N_max < N_min) throw InvalidArgument("mode range must satisfy 1 <= N_min <= N_max");
    check_epsilon(epsilon);
    SymbolTable s;
    s.t = t;
    s.x = x;
    s.epsilon = epsilon;
    s.N_min = N_min;
    s.N_max = N_max;
    const double d = agmon_distance(p, x);
    const double a = p.q_prime_0();
    for (int n = N_min; n <= N_max; ++n) {
        auto it = eigens.find(n);
        if (it == eigens.end()) throw MissingEigenpair("no eigenpair for mode " + std::to_string(n));
        const auto& e = it->second;
        cplx ph = e.phi_at(x, p.L_minus(), p.L_plus());
        if (ph == cplx(0)) {
            s.values.push_back(0.0);
            continue;
        }
        cplx ex = -t * (e.lambda - a * n);
        double lm = ex.real() + std::log(std::abs(ph)) + n * d * (1 - epsilon);
        if (lm > kLogOverflow) throw OverflowGuard("symbol value exceeds 1e280");
        s.values.push_back(std::polar(std::exp(lm), ex.imag() + std::arg(ph)));
    }
    return s;
}

Polynomial apply_symbol(const SymbolTable& s, const Polynomial& poly) {
    std::vector<cplx> c(poly.coeffs.size(), 0.0);
    for (std::size_t m = 0; m < poly.coeffs.size(); ++m) {
        if (poly.coeffs[m] == cplx(0)) continue;
        if (!s.covers(static_cast<int>(m))) throw DegreeRange("coefficient outside the symbol table range");
        c[m] = s.gamma(static_cast<int>(m)) * poly.coeffs[m];
    }
    return Polynomial(std::move(c));
}

} // namespace grushin
