#pragma once

#include "grushin/polynomial.hpp"

#include <complex>
#include <optional>
#include <utility>
#include <vector>

namespace grushin {

using cplx = std::complex<double>;

// D(0, r_inner) ∪ {|z| < outer_radius, arg z ∉ W0}
struct PacmanRegion {
    enum class Variant { TwoSided, OneSided, PurePacman };
    double r_inner = 0;
    // closed arc [lo, hi] of arguments, 0 < hi - lo < 2π
    std::pair<double, double> W0{0, 0};
    double outer_radius = 1;
    Variant variant = Variant::OneSided;

    // inner radius e^{-(1-ε) d(a)}
    static PacmanRegion one_sided(double d_a, double epsilon, std::pair<double, double> W0);
    // inner radius e^{-(1-ε) min(d(a), d(b))}
    static PacmanRegion two_sided(double d_a, double d_b, double epsilon, std::pair<double, double> W0);
    static PacmanRegion pure_pacman(std::pair<double, double> W0);

    void validate() const;
    bool contains(cplx z) const;
    // radii scaled by (1+m), arc shrunk by m rad on each side; star-shaped about 0
    PacmanRegion inflate(double margin) const;
    // boundary curve points at roughly samples_per_unit per unit length
    std::vector<cplx> boundary(int samples_per_unit) const;
    double arc_center() const { return 0.5 * (W0.first + W0.second); }
};

// z0 = (r_inner + offset) e^{i·arc centre}, pulled inside D(0, e^{-T_eff}) if needed;
// throws NoCounterexamplePoint when that disk is contained in V̄
cplx choose_z0(const PacmanRegion& V, double T_eff, double offset = 0.01);

// z0, λz0, λ²z0, ... until modulus ≥ R; compact samples checked against |z_{j+1} - z_j| < dist(z_{j+1}, K)
std::vector<cplx> pole_push_chain(cplx z0, double R, double ratio, const std::vector<cplx>& compact = {});

// least-squares fit of Σ_{m ≤ degree} c_m z^{m+zero_order} to z^{zero_order}/(z - z0) on boundary samples
Polynomial runge_polynomial(cplx z0, int degree, const std::vector<cplx>& boundary, int zero_order = 0);
Polynomial runge_polynomial(cplx z0, int degree, const PacmanRegion& V, int zero_order = 0,
                            int samples_per_unit = 1200);

// √(Σ |a_n|² π R^{2n+2} / (n+1))
double disk_l2_norm(const Polynomial& p, double R);

double sup_on_region(const Polynomial& p, const PacmanRegion& region, int samples_per_unit);

struct BlowupRow {
    int k = 0;
    double l2 = 0;
    double sup = 0;
    double ratio = 0;
};

struct BlowupTable {
    cplx z0;
    double T_eff = 0;
    std::vector<BlowupRow> rows;
    std::vector<Polynomial> polys;
};

// p_k = z^{N+1} p̃_k with deg p̃_k = degree_factor·k; sup taken over V
BlowupTable blowup_witness(const PacmanRegion& U, double margin, std::optional<cplx> z0, double T_eff,
                           const std::vector<int>& k_list, int N = 5, int degree_factor = 2);

} // namespace grushin
