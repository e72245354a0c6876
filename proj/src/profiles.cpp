#include "grushin/profiles.hpp"

#include "grushin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

// boost 1.74 pchip calls isnan unqualified
using std::isnan;

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <boost/numeric/odeint.hpp>

namespace grushin {

namespace {

constexpr double kZeroTol = 1e-12;

std::vector<double> build_grid(double Lm, double Lp, int n) {
    int intervals = n - 1;
    int nl = static_cast<int>(std::lround(intervals * Lm / (Lm + Lp)));
    nl = std::clamp(nl, 1, intervals - 1);
    int nr = intervals - nl;
    std::vector<double> x(n);
    for (int i = 0; i < nl; ++i) x[i] = -Lm + i * (Lm / nl);
    x[nl] = 0.0;
    for (int i = 1; i <= nr; ++i) x[nl + i] = i * (Lp / nr);
    x[n - 1] = Lp;
    return x;
}

} // namespace

bool DegeneracyProfile::contains(double x) const {
    double tol = 1e-13 * (L_minus_ + L_plus_);
    return x >= -L_minus_ - tol && x <= L_plus_ + tol;
}

DegeneracyProfile make_profile(const ProfileSpec& spec) {
    if (spec.grid < 3) throw InvalidArgument("profile grid size must be >= 3");
    if (!(spec.L_minus > 0) || !(spec.L_plus > 0))
        throw InvalidArgument("interval must contain 0 strictly");

    DegeneracyProfile p;
    p.L_minus_ = spec.L_minus;
    p.L_plus_ = spec.L_plus;
    std::ostringstream desc;

    switch (spec.kind) {
    case ProfileSpec::Kind::Linear: {
        if (spec.params.size() != 1) throw InvalidArgument("linear profile takes {slope}");
        double s = spec.params[0];
        p.q_ = [s](double x) { return s * x; };
        p.dq_ = [s](double) { return s; };
        p.q_prime_0_ = s;
        desc << "linear(" << s << ")";
        break;
    }
    case ProfileSpec::Kind::Cubic: {
        if (spec.params.size() != 3) throw InvalidArgument("cubic profile takes {a1,a2,a3}");
        double a1 = spec.params[0], a2 = spec.params[1], a3 = spec.params[2];
        p.q_ = [=](double x) { return x * (a1 + x * (a2 + x * a3)); };
        p.dq_ = [=](double x) { return a1 + x * (2 * a2 + 3 * a3 * x); };
        p.q_prime_0_ = a1;
        p.q2_0_ = 2 * a2;
        p.q3_0_ = 6 * a3;
        desc << "cubic(" << a1 << "," << a2 << "," << a3 << ")";
        break;
    }
    case ProfileSpec::Kind::Table: {
        if (spec.sample_x.size() != spec.sample_q.size() || spec.sample_x.size() < 4)
            throw InvalidArgument("table profile needs >= 4 matching samples");
        if (!std::is_sorted(spec.sample_x.begin(), spec.sample_x.end()))
            throw InvalidArgument("table abscissae must increase");
        if (spec.sample_x.front() > -spec.L_minus + 1e-12 || spec.sample_x.back() < spec.L_plus - 1e-12)
            throw InvalidArgument("table must cover the interval");
        auto xs = spec.sample_x;
        auto qs = spec.sample_q;
        auto interp = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
            std::move(xs), std::move(qs));
        p.q_ = [interp](double x) { return (*interp)(x); };
        p.dq_ = [interp](double x) { return interp->prime(x); };
        p.q_prime_0_ = spec.q_prime_0;
        double h = 1e-4 * (spec.L_minus + spec.L_plus);
        p.q2_0_ = (interp->prime(h) - interp->prime(-h)) / (2 * h);
        p.q3_0_ = (interp->prime(h) - 2 * interp->prime(0) + interp->prime(-h)) / (h * h);
        desc << "table(" << spec.sample_x.size() << " samples)";
        break;
    }
    }

    if (std::abs(p.q_(0.0)) > kZeroTol)
        throw HypothesisViolation("q(0) != 0");
    if (!(p.q_prime_0_ > 0))
        throw HypothesisViolation("q'(0) <= 0");

    p.x_ = build_grid(spec.L_minus, spec.L_plus, spec.grid);
    const auto& x = p.x_;
    std::size_t n = x.size();
    p.i0_ = static_cast<std::size_t>(std::find(x.begin(), x.end(), 0.0) - x.begin());

    std::vector<double> qv(n), dqv(n);
    p.min_dq_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        qv[i] = p.q_(x[i]);
        dqv[i] = p.dq_(x[i]);
        p.min_dq_ = std::min(p.min_dq_, dqv[i]);
        if (i == p.i0_) continue;
        // q keeps the sign of x; a sign flip between nodes hides a zero too
        if (std::abs(qv[i]) <= kZeroTol || qv[i] * x[i] < 0) {
            std::ostringstream os;
            os << "interior zero of q near x=" << x[i];
            throw HypothesisViolation(os.str());
        }
    }

    // composite Simpson, cumulative from the origin outward
    p.d_.assign(n, 0.0);
    auto simpson = [&](std::size_t a, std::size_t b) {
        double h = x[b] - x[a];
        return h / 6.0 * (qv[a] + 4.0 * p.q_(0.5 * (x[a] + x[b])) + qv[b]);
    };
    for (std::size_t i = p.i0_ + 1; i < n; ++i) p.d_[i] = p.d_[i - 1] + simpson(i - 1, i);
    for (std::size_t i = p.i0_; i-- > 0;) p.d_[i] = p.d_[i + 1] - simpson(i, i + 1);

    // cubic Hermite with the exact slope d' = q
    auto xs = p.x_;
    auto ds = p.d_;
    auto slopes = qv;
    auto herm = std::make_shared<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
        std::move(xs), std::move(ds), std::move(slopes));
    p.d_interp_ = [herm](double t) { return (*herm)(t); };
    desc << " on (" << -spec.L_minus << "," << spec.L_plus << "), grid " << spec.grid;
    p.description_ = desc.str();
    return p;
}

double agmon_distance(const DegeneracyProfile& p, double x) {
    if (!p.contains(x)) throw OutOfInterval("x outside the closed interval");
    x = std::clamp(x, -p.L_minus(), p.L_plus());
    if (x == 0.0) return 0.0;
    return p.d_interp_(x);
}

AgmonValue agmon_distance_tilde(const DegeneracyProfile& p, double x) {
    if (!p.contains(x)) throw OutOfInterval("x outside the closed interval");
    double tol = 1e-13 * (p.L_minus() + p.L_plus());
    if (std::abs(x + p.L_minus()) <= tol || std::abs(x - p.L_plus()) <= tol)
        return {std::numeric_limits<double>::infinity(), true};
    return {agmon_distance(p, x), false};
}

double wkb_amplitude(const DegeneracyProfile& p, double x) {
    if (!p.contains(x)) throw OutOfInterval("x outside the closed interval");
    if (x == 0.0) return 1.0;

    const auto& xg = p.x_grid();
    for (std::size_t i = 0; i < xg.size(); ++i) {
        if ((x > 0 && xg[i] >= 0 && xg[i] <= x) || (x < 0 && xg[i] <= 0 && xg[i] >= x)) {
            if (!(p.dq(xg[i]) > 0)) throw HypothesisViolation("min q' <= 0 on the requested range");
        }
    }

    const double a = p.q_prime_0();
    const double f0 = -p.q_second_0() / (2 * a);
    const double f1 = -p.q_third_0() / (4 * a) + p.q_second_0() * p.q_second_0() / (4 * a * a);
    auto taylor = [&](double s) { return 1.0 + f0 * s + 0.5 * (f0 * f0 + f1) * s * s; };

    double h = std::copysign(std::min(1e-3 * (p.L_minus() + p.L_plus()), std::abs(x)), x);
    if (std::abs(x) <= std::abs(h)) return taylor(x);

    const double tol = 1e-14 * (p.L_minus() + p.L_plus());
    auto rhs = [&](const double& c, double& dc, double s) {
        double d1 = p.q(s);
        if (std::abs(d1) < tol) throw SingularAmplitude("d' vanishes away from the origin");
        dc = (a - p.dq(s)) / (2 * d1) * c;
    };
    namespace odeint = boost::numeric::odeint;
    double c = taylor(h);
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<double>());
    odeint::integrate_adaptive(stepper, rhs, c, h, x, h);
    return c;
}

} // namespace grushin
