#pragma once

#include <complex>
#include <vector>

namespace grushin {

using cplx = std::complex<double>;

// LU with partial pivoting of a complex tridiagonal matrix (zgttrf)
class ComplexTridiagLU {
  public:
    ComplexTridiagLU(const std::vector<cplx>& sub, const std::vector<cplx>& diag, const std::vector<cplx>& super);
    bool singular() const { return info_ > 0; }
    void solve(std::vector<cplx>& b) const;

  private:
    int n_;
    int info_ = 0;
    std::vector<cplx> dl_, d_, du_, du2_;
    std::vector<int> ipiv_;
};

// LDLᵀ of a real symmetric positive definite tridiagonal matrix (dpttrf)
class SpdTridiag {
  public:
    SpdTridiag(std::vector<double> diag, std::vector<double> off);
    // solves in place for real and imaginary parts together
    void solve(std::vector<cplx>& b) const;
    void solve(std::vector<double>& b) const;

  private:
    int n_;
    std::vector<double> d_, e_;
};

struct SymTridiagEigen {
    std::vector<double> values;
    // column-major n x m
    std::vector<double> vectors;
    int n = 0;
    int m = 0;
    double at(int i, int k) const { return vectors[static_cast<std::size_t>(k) * n + i]; }
};

// the m lowest eigenpairs of a real symmetric tridiagonal matrix (dstevr)
SymTridiagEigen lowest_eigenpairs(const std::vector<double>& diag, const std::vector<double>& off, int m);

} // namespace grushin
