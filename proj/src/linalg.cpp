#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "grushin/linalg.hpp"

#include "grushin/errors.hpp"

namespace grushin {

ComplexTridiagLU::ComplexTridiagLU(const std::vector<cplx>& sub, const std::vector<cplx>& diag,
                                   const std::vector<cplx>& super)
    : n_(static_cast<int>(diag.size())), dl_(sub), d_(diag), du_(super), du2_(diag.size()), ipiv_(diag.size()) {
    if (n_ < 2 || static_cast<int>(sub.size()) != n_ - 1 || static_cast<int>(super.size()) != n_ - 1)
        throw InvalidArgument("tridiagonal band sizes");
    info_ = LAPACKE_zgttrf(n_, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data());
    if (info_ < 0) throw InvalidArgument("zgttrf argument error");
}

void ComplexTridiagLU::solve(std::vector<cplx>& b) const {
    if (singular()) throw ShiftOnSpectrum("singular tridiagonal factor");
    int info = LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', n_, 1, dl_.data(), d_.data(), du_.data(), du2_.data(),
                              ipiv_.data(), b.data(), n_);
    if (info != 0) throw NoConvergence("zgttrs failed");
}

SpdTridiag::SpdTridiag(std::vector<double> diag, std::vector<double> off)
    : n_(static_cast<int>(diag.size())), d_(std::move(diag)), e_(std::move(off)) {
    if (n_ < 1 || static_cast<int>(e_.size()) != n_ - 1) throw InvalidArgument("tridiagonal band sizes");
    int info = LAPACKE_dpttrf(n_, d_.data(), e_.data());
    if (info != 0) throw NoConvergence("matrix is not positive definite");
}

void SpdTridiag::solve(std::vector<double>& b) const {
    int info = LAPACKE_dpttrs(LAPACK_COL_MAJOR, n_, 1, d_.data(), e_.data(), b.data(), n_);
    if (info != 0) throw NoConvergence("dpttrs failed");
}

void SpdTridiag::solve(std::vector<cplx>& b) const {
    std::vector<double> rhs(2 * static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        rhs[i] = b[i].real();
        rhs[n_ + i] = b[i].imag();
    }
    int info = LAPACKE_dpttrs(LAPACK_COL_MAJOR, n_, 2, d_.data(), e_.data(), rhs.data(), n_);
    if (info != 0) throw NoConvergence("dpttrs failed");
    for (int i = 0; i < n_; ++i) b[i] = {rhs[i], rhs[n_ + i]};
}

SymTridiagEigen lowest_eigenpairs(const std::vector<double>& diag, const std::vector<double>& off, int m) {
    int n = static_cast<int>(diag.size());
    if (m < 1 || m > n) throw InvalidArgument("requested eigenpair count out of range");
    std::vector<double> d(diag), e(off);
    e.resize(n);
    SymTridiagEigen r;
    r.n = n;
    r.values.resize(n);
    r.vectors.resize(static_cast<std::size_t>(n) * m);
    std::vector<int> isuppz(2 * static_cast<std::size_t>(m));
    int found = 0;
    int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, m, 0.0, &found,
                              r.values.data(), r.vectors.data(), n, isuppz.data());
    if (info != 0 || found != m) throw NoConvergence("dstevr failed");
    r.values.resize(m);
    r.m = m;
    return r;
}

} // namespace grushin
