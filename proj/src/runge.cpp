#include "grushin/runge.hpp"

#include "grushin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <tbb/parallel_for.h>

namespace grushin {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// position of θ inside the arc measured from lo, in [0, 2π)
double arc_offset(double theta, double lo) {
    double s = std::fmod(theta - lo, kTwoPi);
    return s < 0 ? s + kTwoPi : s;
}

bool strictly_in_arc(double theta, std::pair<double, double> W) {
    double s = arc_offset(theta, W.first);
    return s > 0 && s < W.second - W.first;
}

void append_segment(std::vector<cplx>& out, double r0, double r1, double theta, int n) {
    for (int i = 0; i <= n; ++i) out.push_back(std::polar(r0 + (r1 - r0) * i / n, theta));
}

} // namespace

PacmanRegion PacmanRegion::one_sided(double d_a, double epsilon, std::pair<double, double> W0) {
    PacmanRegion r;
    r.r_inner = std::exp(-(1 - epsilon) * d_a);
    r.W0 = W0;
    r.variant = Variant::OneSided;
    r.validate();
    return r;
}

PacmanRegion PacmanRegion::two_sided(double d_a, double d_b, double epsilon, std::pair<double, double> W0) {
    PacmanRegion r;
    r.r_inner = std::exp(-(1 - epsilon) * std::min(d_a, d_b));
    r.W0 = W0;
    r.variant = Variant::TwoSided;
    r.validate();
    return r;
}

PacmanRegion PacmanRegion::pure_pacman(std::pair<double, double> W0) {
    PacmanRegion r;
    r.r_inner = 0;
    r.W0 = W0;
    r.variant = Variant::PurePacman;
    r.validate();
    return r;
}

void PacmanRegion::validate() const {
    double w = W0.second - W0.first;
    if (!(w > 0) || !(w < kTwoPi)) throw InvalidArgument("W0 must have nonempty interior and a nonempty complement");
    if (!(r_inner >= 0) || !(r_inner < outer_radius)) throw InvalidArgument("need 0 <= r_inner < outer_radius");
}

bool PacmanRegion::contains(cplx z) const {
    double m = std::abs(z);
    if (m <= r_inner) return true;
    if (m > outer_radius) return false;
    return m == 0 || !strictly_in_arc(std::arg(z), W0);
}

PacmanRegion PacmanRegion::inflate(double margin) const {
    if (!(margin >= 0)) throw InvalidArgument("margin must be >= 0");
    PacmanRegion v = *this;
    v.r_inner = r_inner * (1 + margin);
    v.outer_radius = outer_radius * (1 + margin);
    v.W0 = {W0.first + margin, W0.second - margin};
    v.validate();
    return v;
}

std::vector<cplx> PacmanRegion::boundary(int samples_per_unit) const {
    if (samples_per_unit < 1) throw InvalidArgument("samples_per_unit must be >= 1");
    std::vector<cplx> pts;
    const double w = W0.second - W0.first;
    int n_out = std::max(16, static_cast<int>(std::ceil((kTwoPi - w) * outer_radius * samples_per_unit)));
    for (int i = 0; i <= n_out; ++i) pts.push_back(std::polar(outer_radius, W0.second + (kTwoPi - w) * i / n_out));
    if (r_inner > 0) {
        int n_in = std::max(8, static_cast<int>(std::ceil(w * r_inner * samples_per_unit)));
        for (int i = 0; i <= n_in; ++i) pts.push_back(std::polar(r_inner, W0.first + w * i / n_in));
    }
    int n_seg = std::max(4, static_cast<int>(std::ceil((outer_radius - r_inner) * samples_per_unit)));
    append_segment(pts, r_inner, outer_radius, W0.first, n_seg);
    append_segment(pts, r_inner, outer_radius, W0.second, n_seg);
    return pts;
}

cplx choose_z0(const PacmanRegion& V, double T_eff, double offset) {
    const double rd = std::exp(-T_eff);
    if (rd <= V.r_inner) throw NoCounterexamplePoint("the disk D(0, e^{-T}) lies inside the closed region");
    double r = V.r_inner + offset;
    if (r >= rd) r = 0.5 * (V.r_inner + rd);
    return std::polar(r, V.arc_center());
}

std::vector<cplx> pole_push_chain(cplx z0, double R, double ratio, const std::vector<cplx>& compact) {
    if (!(std::abs(z0) > 0)) throw InvalidArgument("z0 must be nonzero");
    if (!(ratio > 1)) throw InvalidArgument("ratio must exceed 1");
    std::vector<cplx> chain{z0};
    while (std::abs(chain.back()) < R) chain.push_back(chain.back() * ratio);
    for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
        double step = std::abs(chain[j + 1] - chain[j]);
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& k : compact) dist = std::min(dist, std::abs(chain[j + 1] - k));
        if (!(step < dist)) throw RatioTooLarge("chain step exceeds the distance to the compact");
    }
    return chain;
}

Polynomial runge_polynomial(cplx z0, int degree, const std::vector<cplx>& boundary, int zero_order) {
    if (degree < 0 || zero_order < 0) throw InvalidArgument("degree and zero order must be >= 0");
    if (boundary.size() < static_cast<std::size_t>(degree + 1)) throw InvalidArgument("too few boundary samples");
    double rs = 0;
    for (const auto& b : boundary) rs = std::max(rs, std::abs(b));
    const int rows = static_cast<int>(boundary.size());
    Eigen::MatrixXcd A(rows, degree + 1);
    Eigen::VectorXcd f(rows);
    for (int i = 0; i < rows; ++i) {
        cplx s = boundary[i] / rs;
        cplx base = std::pow(s, zero_order);
        if (std::abs(boundary[i] - z0) == 0) throw InvalidArgument("z0 lies on the sample set");
        f(i) = base / (boundary[i] - z0);
        cplx pw = base;
        for (int m = 0; m <= degree; ++m) {
            A(i, m) = pw;
            pw *= s;
        }
    }
    Eigen::VectorXcd d = A.colPivHouseholderQr().solve(f);
    std::vector<cplx> c(zero_order + degree + 1, 0.0);
    for (int m = 0; m <= degree; ++m) c[zero_order + m] = d(m) / std::pow(rs, m);
    return Polynomial(std::move(c));
}

Polynomial runge_polynomial(cplx z0, int degree, const PacmanRegion& V, int zero_order, int samples_per_unit) {
    if (V.contains(z0)) throw InvalidArgument("z0 must lie outside the closed region");
    return runge_polynomial(z0, degree, V.boundary(samples_per_unit), zero_order);
}

double disk_l2_norm(const Polynomial& p, double R) {
    if (!(R > 0)) throw InvalidArgument("R must be positive");
    double s = 0;
    for (std::size_t n = 0; n < p.coeffs.size(); ++n)
        s += std::norm(p.coeffs[n]) * std::numbers::pi * std::pow(R, 2.0 * n + 2) / (n + 1.0);
    return std::sqrt(s);
}

double sup_on_region(const Polynomial& p, const PacmanRegion& region, int samples_per_unit) {
    region.validate();
    double m = 0;
    for (const auto& z : region.boundary(samples_per_unit)) m = std::max(m, std::abs(p(z)));
    return m;
}

BlowupTable blowup_witness(const PacmanRegion& U, double margin, std::optional<cplx> z0, double T_eff,
                           const std::vector<int>& k_list, int N, int degree_factor) {
    if (N < 0 || degree_factor < 1) throw InvalidArgument("need N >= 0 and degree_factor >= 1");
    const PacmanRegion V = U.inflate(margin);
    const double rd = std::exp(-T_eff);
    if (rd <= V.r_inner) throw NoCounterexamplePoint("the disk D(0, e^{-T}) lies inside the closed region");
    BlowupTable t;
    t.T_eff = T_eff;
    t.z0 = z0 ? *z0 : choose_z0(V, T_eff);
    if (V.contains(t.z0) || std::abs(t.z0) >= rd) throw InvalidArgument("z0 must lie in D(0, e^{-T}) outside V");
    const auto fit_set = V.boundary(1200);
    t.rows.resize(k_list.size());
    t.polys.resize(k_list.size());
    tbb::parallel_for(std::size_t(0), k_list.size(), [&](std::size_t i) {
        int k = k_list[i];
        if (k < 0) throw InvalidArgument("k must be >= 0");
        auto p = runge_polynomial(t.z0, degree_factor * k, fit_set, N + 1);
        BlowupRow r;
        r.k = k;
        r.l2 = disk_l2_norm(p, rd);
        r.sup = sup_on_region(p, V, 3000);
        r.ratio = r.l2 / r.sup;
        t.rows[i] = r;
        t.polys[i] = std::move(p);
    });
    return t;
}

} // namespace grushin
