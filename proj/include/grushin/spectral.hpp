#pragma once

#include "grushin/polynomial.hpp"
#include "grushin/profiles.hpp"

#include <complex>
#include <map>
#include <vector>

namespace grushin {

using cplx = std::complex<double>;

// -u'' + ν² q² u on the interior nodes, Dirichlet rows eliminated
struct TridiagonalOperator {
    int n = 0;
    double h = 0;
    cplx nu;
    std::vector<double> x;
    std::vector<cplx> sub, diag, super;

    std::vector<cplx> apply(const std::vector<cplx>& v) const;
};

struct ComplexEigenpair {
    cplx nu;
    cplx lambda;
    std::vector<double> x;
    // φ_ν, the projection of ν^{1/4} e^{-q'(0)νx²/2} onto the eigenvector
    std::vector<cplx> phi;
    // Σ φ² h = 1
    std::vector<cplx> phi_raw;
    // |Σ φ² h| / Σ |φ|² h of the eigenvector; small means nearly self-orthogonal
    cplx pairing_denominator;
    double residual = 0;
    int iterations = 0;
    double h = 0;
    // linear interpolation of φ_ν with zero boundary values
    cplx phi_at(double xq, double L_minus, double L_plus) const;
};

TridiagonalOperator discretize(const DegeneracyProfile& p, cplx nu, int n_grid);

ComplexEigenpair first_eigenpair(const TridiagonalOperator& op, const DegeneracyProfile& p, cplx nu);

struct AsymptoticsRow {
    double modulus = 0;
    cplx nu;
    cplx lambda;
    cplx lambda_raw;
    double residual = 0;
    // λ / (q'(0) ν)
    cplx ratio;
    double deviation = 0;
};

// with richardson, λ = (4λ_{2n} - λ_n)/3 from grids n_grid and 2 n_grid
std::vector<AsymptoticsRow> eigenvalue_asymptotics_sweep(const DegeneracyProfile& p, double theta,
                                                         const std::vector<double>& nus, int n_grid = 4000,
                                                         bool richardson = true);

// normalized defect of the Agmon equality with κ = (1-ε) d
double agmon_residual(const ComplexEigenpair& e, const DegeneracyProfile& p, double epsilon);

// max |φ_ν e^{ν(1-ε)d}| / |ν|
double agmon_weighted_sup(const ComplexEigenpair& e, const DegeneracyProfile& p, double epsilon);

struct SymbolTable {
    double t = 0;
    double x = 0;
    double epsilon = 0;
    int N_min = 0;
    int N_max = 0;
    // values[n - N_min] = γ(n-1) for n in [N_min, N_max]
    std::vector<cplx> values;
    bool covers(int m) const { return m + 1 >= N_min && m + 1 <= N_max; }
    cplx gamma(int m) const;
};

SymbolTable symbol_table(const DegeneracyProfile& p, double t, double x, double epsilon, int N_min, int N_max,
                         const std::map<int, ComplexEigenpair>& eigens);

Polynomial apply_symbol(const SymbolTable& s, const Polynomial& poly);

} // namespace grushin
