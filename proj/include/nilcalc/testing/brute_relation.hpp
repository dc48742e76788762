#pragma once

#include "nilcalc/scalar.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <tuple>
#include <vector>

namespace nilcalc::oracle {

/// All of [-H, H]^m sorted by (|a|_inf, |a|_1, lex), first nonzero positive;
/// exact checks only. Cost (2H+1)^m, so keep m small.
inline std::optional<std::vector<long>> brute_relation(const std::vector<TorusPoint>& xs, const Rational& eps, long H)
{
    const std::size_t m = xs.size();
    if (m == 0) return std::nullopt;
    std::vector<std::tuple<long, long, std::vector<long>>> all;
    std::vector<long> a(m, -H);
    while (true) {
        long inf = 0, l1 = 0;
        std::size_t first = 0;
        for (long v : a) {
            inf = std::max(inf, std::labs(v));
            l1 += std::labs(v);
        }
        while (first < m && a[first] == 0) ++first;
        if (inf > 0 && a[first] > 0) all.emplace_back(inf, l1, a);
        std::size_t i = m;
        while (i > 0 && a[i - 1] == H) a[--i] = -H;
        if (i == 0) break;
        ++a[i - 1];
    }
    std::sort(all.begin(), all.end());
    for (const auto& [inf, l1, v] : all) {
        Rational t;
        for (std::size_t i = 0; i < m; ++i) t += Rational(v[i]) * xs[i].value();
        if (torus_norm(t) <= eps) return v;
    }
    return std::nullopt;
}

} // namespace nilcalc::oracle
