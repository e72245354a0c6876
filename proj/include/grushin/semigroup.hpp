#pragma once

#include "grushin/geometry.hpp"
#include "grushin/linalg.hpp"
#include "grushin/profiles.hpp"
#include "grushin/spectral.hpp"

#include <complex>
#include <map>
#include <memory>
#include <vector>

namespace grushin {

using cplx = std::complex<double>;

// A_n = -∂x² + n² q² on the interior nodes, Dirichlet rows eliminated
struct ModeOperator {
    int n = 0;
    double h = 0;
    std::vector<double> x;
    std::vector<double> diag;
    // off-diagonal entry, the same on both sides
    double off = 0;
    std::vector<double> apply(const std::vector<double>& v) const;
};

// interior nodes -L- + i h, i = 1..n_grid-1, h = (L- + L+)/n_grid
std::vector<double> interior_nodes(const DegeneracyProfile& p, int n_grid);
ModeOperator mode_operator(const DegeneracyProfile& p, int n, int n_interior);

// cell-centred raster whose x centres coincide with the interior nodes
Grid2D solution_grid(const DegeneracyProfile& p, int n_interior, int ny, YTopology topo);

// (I + τA/2) g⁺ = (I - τA/2) g + τ s
class CrankNicolson {
  public:
    CrankNicolson(const ModeOperator& op, double tau);
    double tau() const { return tau_; }
    void step(std::vector<cplx>& g, const std::vector<cplx>* source = nullptr) const;

  private:
    const ModeOperator* op_;
    double tau_;
    std::shared_ptr<SpdTridiag> lhs_;
};

struct ModeSolution {
    int n = 0;
    YTopology y_topology = YTopology::Torus;
    double h = 0;
    std::vector<double> x;
    std::vector<double> times;
    std::vector<std::vector<cplx>> states;
};

// stride 0 picks the smallest stride keeping at most 4096 stored frames
ModeSolution evolve_mode(const DegeneracyProfile& p, int n, const std::vector<cplx>& g0, double T, double dt,
                         int stride = 0, YTopology topo = YTopology::Torus);

struct FullSolution {
    std::vector<ModeSolution> modes;
    YTopology y_topology = YTopology::Torus;
    double h = 0;
    std::vector<double> x;
    std::vector<double> times;

    // basis e^{iny} on the torus, sin(ny) on (0, π)
    double basis_norm2() const;
    // Parseval side: basis_norm2 Σ_n ‖ĝ_n‖²
    double mode_energy(std::size_t frame) const;
    // g(t, x_i, y_j) at j·nx + i, y on cell centres
    std::vector<cplx> reconstruct(std::size_t frame, int ny) const;
    // midpoint rule in y on the reconstruction
    double grid_energy(std::size_t frame, int ny) const;
};

// initial profiles per mode index n
FullSolution evolve(const DegeneracyProfile& p, const std::map<int, std::vector<cplx>>& g0, double T, double dt,
                    YTopology topo = YTopology::Torus, int stride = 0);

// field values at j·nx + i on the solution_grid raster; modes |n| ≤ max_mode kept
FullSolution evolve(const DegeneracyProfile& p, const std::vector<cplx>& field, int ny, int max_mode, double T,
                    double dt, YTopology topo = YTopology::Torus, int stride = 0);

// ‖g(T)‖² / ∫_0^T ∫_ω |g|²
double observability_quotient(const FullSolution& sol, const ControlRegion& r, double T, int ny = 512);

// g = Σ_m a_m φ_{m+1}(x) e^{-λ_{m+1} t + i(m+1)y}; eigens[m] is the pair of mode m+1
double eigen_expansion_quotient(const std::vector<ComplexEigenpair>& eigens, const std::vector<cplx>& a,
                                const ControlRegion& r, double T);

struct CounterexampleOptions {
    int N = 5;
    double margin = 0.01;
    double z0_offset = 0.01;
    int degree_factor = 2;
    int n_grid = 2000;
};

struct CounterexampleRow {
    int k = 0;
    int modes = 0;
    double quotient = 0;
    // weighted energy share of the top quarter of the modes at time T
    double tail_fraction = 0;
};

struct CounterexampleTable {
    cplx z0;
    double lower_bound = 0;
    // T at or above the lower bound: a consistency probe, not a refutation
    bool consistency_probe = false;
    std::vector<CounterexampleRow> rows;
};

CounterexampleTable counterexample_observability(const DegeneracyProfile& p, const ControlRegion& r, double T,
                                                 double epsilon, const std::vector<int>& k_list,
                                                 const CounterexampleOptions& opt = {});

} // namespace grushin
