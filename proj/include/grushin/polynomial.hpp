#pragma once

#include <complex>
#include <vector>

namespace grushin {

struct Polynomial {
    // coeffs[n] multiplies z^n
    std::vector<std::complex<double>> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::vector<std::complex<double>> c) : coeffs(std::move(c)) { trim(); }

    void trim() {
        while (!coeffs.empty() && coeffs.back() == std::complex<double>(0)) coeffs.pop_back();
    }
    bool is_zero() const { return coeffs.empty(); }
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    std::complex<double> operator()(std::complex<double> z) const {
        std::complex<double> s = 0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * z + *it;
        return s;
    }
    // order of the zero at the origin; -1 for the zero polynomial
    int zero_order() const {
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (coeffs[i] != std::complex<double>(0)) return static_cast<int>(i);
        return -1;
    }
};

} // namespace grushin
