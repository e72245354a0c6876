#pragma once

#include "grushin/geometry.hpp"
#include "grushin/profiles.hpp"
#include "grushin/semigroup.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace grushin {

using cplx = std::complex<double>;

struct ModeControl {
    int n = 0;
    std::pair<double, double> strip{0, 0};
    double h = 0;
    double dt = 0;
    std::vector<double> x;
    std::vector<std::uint8_t> mask;
    // u[k] acts on (t_k, t_{k+1})
    std::vector<std::vector<cplx>> u;
    // controlled trajectory at t_0..t_K
    std::vector<double> times;
    std::vector<std::vector<cplx>> states;
    // per target mode
    std::vector<double> mode_eigenvalues;
    std::vector<cplx> gramian_rhs;
    std::vector<cplx> multipliers;
    double energy = 0;
    // ‖Π_M g(T)‖: Gramian prediction, re-simulation, and without control
    double residual = 0;
    double residual_resim = 0;
    double free_residual = 0;
    // ‖(I - Π_M) g(T)‖ after control
    double tail_norm = 0;
    double condition_number = 0;
    double threshold_time = 0;
};

// least-norm control killing the first M eigenmode projections of mode n at time T
ModeControl strip_null_control(const DegeneracyProfile& p, int n, std::pair<double, double> strip, double T, int M,
                               double dt, const std::vector<cplx>& g0);

struct StripControlledSolution {
    FullSolution solution;
    std::vector<ModeControl> controls;
};

// every mode of g0 controlled on the same strip; frames at every step
StripControlledSolution strip_controlled_solution(const DegeneracyProfile& p,
                                                  const std::map<int, std::vector<cplx>>& g0,
                                                  std::pair<double, double> strip, double T, int M, double dt);

struct PatchedSolution {
    Grid2D grid;
    // stored frames of f and of the half-step residual u
    std::vector<double> times;
    std::vector<std::vector<cplx>> f;
    std::vector<double> u_times;
    std::vector<std::vector<cplx>> u;
    std::vector<std::uint8_t> region_mask;
    double terminal_norm = 0;
    double terminal_minus = 0;
    double terminal_plus = 0;
    double max_u_inside = 0;
    double max_u_outside = 0;
    // max |u| outside ω (beyond the one-cell stencil band) over max |u|
    double support_violation = 0;
};

// f = χ f₋ + (1 - χ) f₊ and u = ∂t f - ∂x² f - q² ∂y² f on the CN stencil; keeps at most max_frames frames
PatchedSolution patch_controls(const FullSolution& f_minus, const FullSolution& f_plus, const CutoffField& chi,
                               const DegeneracyProfile& p, double dt, const ControlRegion& omega,
                               int max_frames = 16);

} // namespace grushin
