#pragma once

// Definitional Gowers sums. Test-only; shares no code with gowers.hpp.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nilcalc::oracle {

using cld = std::complex<long double>;

namespace naive_detail {

struct Walker {
    const std::vector<std::complex<double>>& f;
    std::vector<std::size_t> support;
    long M;
    int d;
    cld total{0.0L, 0.0L};

    // pts[w] = x + w.h for the first i directions; bit l of w selects h_{l+1}.
    void step(std::vector<long>& pts, int i)
    {
        if (i == d) {
            cld prod{1.0L, 0.0L};
            for (std::size_t w = 0; w < pts.size(); ++w) {
                std::complex<double> v = f[static_cast<std::size_t>(pts[w])];
                cld z(v.real(), v.imag());
                prod *= (__builtin_popcountll(w) % 2) ? std::conj(z) : z;
            }
            total += prod;
            return;
        }
        const std::size_t half = pts.size();
        pts.resize(2 * half);
        // Every nonzero term has x + h_{i+1} in the support, so h_{i+1} ranges over support - x.
        for (std::size_t y : support) {
            const long h = static_cast<long>(y) - pts[0];
            bool alive = true;
            for (std::size_t w = 0; w < half; ++w) {
                long p = ((pts[w] + h) % M + M) % M;
                if (f[static_cast<std::size_t>(p)] == std::complex<double>(0.0, 0.0)) {
                    alive = false;
                    break;
                }
                pts[half + w] = p;
            }
            if (alive) step(pts, i + 1);
        }
        pts.resize(half);
    }
};

} // namespace naive_detail

/// E_{x, h_1..h_d in Z_M} of the 2^d-fold conjugated product. Complex on purpose.
inline cld naive_power_average(const std::vector<std::complex<double>>& f, int d)
{
    if (d < 1) throw std::invalid_argument("naive_power_average: d >= 1");
    const long M = static_cast<long>(f.size());
    naive_detail::Walker w{f, {}, M, d};
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] != std::complex<double>(0.0, 0.0)) w.support.push_back(i);
    std::vector<long> pts;
    for (std::size_t x : w.support) {
        pts.assign(1, static_cast<long>(x));
        w.step(pts, 0);
    }
    long double denom = 1.0L;
    for (int i = 0; i <= d; ++i) denom *= static_cast<long double>(M);
    return w.total / denom;
}

inline long double naive_group_norm(const std::vector<std::complex<double>>& f, int d)
{
    long double a = naive_power_average(f, d).real();
    if (a < 0) a = 0;
    return std::pow(a, 1.0L / static_cast<long double>(1 << d));
}

/// Zero-extends values on [N] (values[0] is n = 1) into Z_M and normalizes by 1_[N].
inline long double naive_u_norm(const std::vector<std::complex<double>>& values, int d, long M)
{
    std::vector<std::complex<double>> f(static_cast<std::size_t>(M)), one(static_cast<std::size_t>(M));
    for (std::size_t n = 0; n < values.size(); ++n) {
        f[(n + 1) % static_cast<std::size_t>(M)] = values[n];
        one[(n + 1) % static_cast<std::size_t>(M)] = 1.0;
    }
    return naive_group_norm(f, d) / naive_group_norm(one, d);
}

} // namespace nilcalc::oracle
