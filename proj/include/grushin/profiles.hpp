#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace grushin {

struct ProfileSpec {
    enum class Kind { Linear, Cubic, Table };
    Kind kind = Kind::Linear;
    double L_minus = 1.0;
    double L_plus = 1.0;
    // linear: {slope}; cubic: {a1, a2, a3} for q = a1 x + a2 x^2 + a3 x^3
    std::vector<double> params{1.0};
    // table: samples of q, interpolated by pchip; q'(0) must be supplied
    std::vector<double> sample_x, sample_q;
    double q_prime_0 = 0.0;
    int grid = 2001;
};

class DegeneracyProfile {
  public:
    double L_minus() const { return L_minus_; }
    double L_plus() const { return L_plus_; }
    double q(double x) const { return q_(x); }
    double dq(double x) const { return dq_(x); }
    double q_prime_0() const { return q_prime_0_; }
    double q_second_0() const { return q2_0_; }
    double q_third_0() const { return q3_0_; }
    // min of q' over the grid; > 0 means the strictly monotone case
    double min_dq() const { return min_dq_; }
    const std::vector<double>& x_grid() const { return x_; }
    const std::vector<double>& d_cache() const { return d_; }
    std::size_t zero_index() const { return i0_; }
    bool contains(double x) const;
    std::string describe() const { return description_; }

  private:
    friend DegeneracyProfile make_profile(const ProfileSpec&);
    double L_minus_ = 1, L_plus_ = 1;
    std::function<double(double)> q_, dq_;
    double q_prime_0_ = 1, q2_0_ = 0, q3_0_ = 0, min_dq_ = 0;
    std::vector<double> x_, d_;
    std::size_t i0_ = 0;
    std::function<double(double)> d_interp_;
    std::string description_;
    friend double agmon_distance(const DegeneracyProfile&, double);
};

// validates q(0)=0, q'(0)>0 and q(x)≠0 off the origin
DegeneracyProfile make_profile(const ProfileSpec& spec);

// d(x) = ∫_0^x q
double agmon_distance(const DegeneracyProfile& p, double x);

struct AgmonValue {
    double value = 0.0;
    bool infinite = false;
    double finite_or(double fallback = std::numeric_limits<double>::infinity()) const {
        return infinite ? fallback : value;
    }
};

// d̃: same as d inside, +inf at both endpoints
AgmonValue agmon_distance_tilde(const DegeneracyProfile& p, double x);

// c0 with c0' = (q'(0) - d'')/(2 d') c0, c0(0) = 1
double wkb_amplitude(const DegeneracyProfile& p, double x);

} // namespace grushin
