#include "grushin/davies.hpp"

#include "grushin/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace grushin {

namespace {

constexpr int kMaxDegree = 60;

template <class T> T hermite_rec(int k, T x) {
    if (k < 0) throw InvalidArgument("negative Hermite degree");
    if (k > kMaxDegree) throw DegreeTooLarge("Hermite degree above 60");
    T h0 = T(1);
    if (k == 0) return h0;
    T h1 = T(2) * x;
    for (int j = 1; j < k; ++j) {
        T h2 = T(2) * x * h1 - T(2.0 * j) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

void check_grid(const ComplexParameter& b, const LineGrid& g) {
    if (g.X * std::sqrt(b.beta.real()) < 6.0) throw TruncationTooSmall("need X sqrt(Re beta) >= 6");
    if (g.h() * std::sqrt(std::abs(b.beta)) > 0.5) throw GridTooCoarse("grid does not resolve the Gaussian scale");
}

double norm2(const LineGrid& g, const std::vector<cplx>& u) { return std::sqrt(inner(g, u, u).real()); }

} // namespace

ComplexParameter::ComplexParameter(cplx b) : beta(b), theta(std::arg(b)) {
    if (!(b.real() > 0)) throw InvalidArgument("Re(beta) must be positive");
}

double hermite(int k, double x) { return hermite_rec<double>(k, x); }
cplx hermite(int k, cplx z) { return hermite_rec<cplx>(k, z); }

cplx davies_eigenvalue(const ComplexParameter& b, int k) {
    if (k < 1) throw InvalidArgument("k >= 1");
    return static_cast<double>(2 * k - 1) * b.beta;
}

cplx davies_eigenfunction(const ComplexParameter& b, int k, double x) {
    if (k < 1) throw InvalidArgument("k >= 1");
    cplx s = std::sqrt(b.beta);
    return hermite(k - 1, s * x) * std::exp(-0.5 * b.beta * x * x);
}

std::vector<cplx> davies_samples(const ComplexParameter& b, int k, const LineGrid& g) {
    std::vector<cplx> v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = davies_eigenfunction(b, k, g.x(i));
    return v;
}

cplx inner(const LineGrid& g, const std::vector<cplx>& f, const std::vector<cplx>& u) {
    cplx s = 0;
    for (int i = 0; i < g.n; ++i) s += (i == 0 || i == g.n - 1 ? 0.5 : 1.0) * std::conj(f[i]) * u[i];
    return s * g.h();
}

cplx bilinear(const LineGrid& g, const std::vector<cplx>& f, const std::vector<cplx>& u) {
    cplx s = 0;
    for (int i = 0; i < g.n; ++i) s += (i == 0 || i == g.n - 1 ? 0.5 : 1.0) * f[i] * u[i];
    return s * g.h();
}

std::vector<cplx> davies_project(const ComplexParameter& b, const LineGrid& g, const std::vector<cplx>& u) {
    check_grid(b, g);
    if (static_cast<int>(u.size()) != g.n) throw InvalidArgument("sample count mismatch");
    auto phi = davies_samples(b, 1, g);
    // conj(φ_{β̄}) = φ_β on the real line, so the pairing is bilinear in φ_β
    cplx c = bilinear(g, phi, u) / bilinear(g, phi, phi);
    for (auto& v : phi) v *= c;
    return phi;
}

double davies_projection_norm(const ComplexParameter& b) { return 1.0 / std::sqrt(std::cos(b.theta)); }

double davies_projection_norm_estimate(const ComplexParameter& b, const LineGrid& g, std::uint64_t seed,
                                       int iterations) {
    check_grid(b, g);
    auto phi = davies_samples(b, 1, g);
    const cplx c = bilinear(g, phi, phi);
    // Π u = φ (∫φu)/c and Π* v = conj(φ) conj(∫conj(v)φ / c)
    auto apply = [&](const std::vector<cplx>& u) {
        cplx s = bilinear(g, phi, u) / c;
        std::vector<cplx> r(phi);
        for (auto& v : r) v *= s;
        return r;
    };
    auto apply_adj = [&](const std::vector<cplx>& v) {
        cplx s = std::conj(inner(g, v, phi) / c);
        std::vector<cplx> r(g.n);
        for (int i = 0; i < g.n; ++i) r[i] = std::conj(phi[i]) * s;
        return r;
    };
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<cplx> u(g.n);
    for (auto& v : u) v = {nd(rng), nd(rng)};
    double est = 0;
    for (int it = 0; it < iterations; ++it) {
        double nu = norm2(g, u);
        for (auto& v : u) v /= nu;
        auto pu = apply(u);
        est = norm2(g, pu);
        u = apply_adj(pu);
        if (norm2(g, u) == 0) break;
    }
    return est;
}

cplx davies_trace_restricted(const ComplexParameter& b, double a1, double a2) {
    if (!(a1 < 0 && 0 < a2)) throw InvalidArgument("interval must contain 0");
    using boost::math::quadrature::gauss_kronrod;
    auto re = [&](double x) { return std::exp(-b.beta * x * x).real(); };
    auto im = [&](double x) { return std::exp(-b.beta * x * x).imag(); };
    const double inf = std::numeric_limits<double>::infinity();
    auto integ = [&](auto f, double lo, double hi) { return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14); };
    cplx num(integ(re, a1, a2), integ(im, a1, a2));
    cplx den(integ(re, -inf, inf), integ(im, -inf, inf));
    return num / den;
}

double davies_eigen_residual(const ComplexParameter& b, int k, const LineGrid& g) {
    auto phi = davies_samples(b, k, g);
    const cplx lam = davies_eigenvalue(b, k);
    const double h = g.h();
    double num = 0, den = 0;
    for (int i = 1; i + 1 < g.n; ++i) {
        double x = g.x(i);
        cplx lap = (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) / (h * h);
        cplx r = -lap + b.beta * b.beta * x * x * phi[i] - lam * phi[i];
        num += std::norm(r);
        den += std::norm(lam * phi[i]);
    }
    return std::sqrt(num / den);
}

double davies_biorthogonality_defect(const ComplexParameter& b, int k, const LineGrid& g) {
    ComplexParameter bbar(std::conj(b.beta));
    auto fk = davies_samples(bbar, k, g);
    auto f1 = davies_samples(b, 1, g);
    cplx v = inner(g, fk, f1);
    cplx expect = k == 1 ? std::sqrt(std::numbers::pi / b.beta) : cplx(0);
    return std::abs(v - expect);
}

} // namespace grushin
