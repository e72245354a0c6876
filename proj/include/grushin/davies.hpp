#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace grushin {

using cplx = std::complex<double>;

struct ComplexParameter {
    cplx beta;
    double theta;
    explicit ComplexParameter(cplx b);
};

// physicists' Hermite polynomials, H_{k+1} = 2x H_k - 2k H_{k-1}
double hermite(int k, double x);
cplx hermite(int k, cplx z);

cplx davies_eigenvalue(const ComplexParameter& b, int k);

// H_{k-1}(√β x) e^{-βx²/2}, principal root
cplx davies_eigenfunction(const ComplexParameter& b, int k, double x);

// uniform nodes on [-X, X]
struct LineGrid {
    double X = 8.0;
    int n = 4001;
    double h() const { return 2 * X / (n - 1); }
    double x(int i) const { return -X + i * h(); }
};

std::vector<cplx> davies_samples(const ComplexParameter& b, int k, const LineGrid& g);

// ∫ conj(f) g and ∫ f g by the trapezoid rule
cplx inner(const LineGrid& g, const std::vector<cplx>& f, const std::vector<cplx>& u);
cplx bilinear(const LineGrid& g, const std::vector<cplx>& f, const std::vector<cplx>& u);

// rank-one projection (∫φu / ∫φ²) φ onto the first eigenfunction
std::vector<cplx> davies_project(const ComplexParameter& b, const LineGrid& g, const std::vector<cplx>& u);

// 1/√cos(arg β)
double davies_projection_norm(const ComplexParameter& b);

// power iteration on Π*Π from a random start
double davies_projection_norm_estimate(const ComplexParameter& b, const LineGrid& g, std::uint64_t seed,
                                       int iterations = 30);

// ∫_I φ² / ∫_R φ² (bilinear square); endpoints may be ±inf
cplx davies_trace_restricted(const ComplexParameter& b, double a1, double a2);

// relative residual of the centred second difference eigen-relation, interior nodes
double davies_eigen_residual(const ComplexParameter& b, int k, const LineGrid& g);

// |<φ_{β̄,k}, φ_{β,1}> - δ_{k1} √(π/β)|
double davies_biorthogonality_defect(const ComplexParameter& b, int k, const LineGrid& g);

} // namespace grushin
