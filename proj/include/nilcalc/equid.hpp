#pragma once

#include "nilcalc/nilseq.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nilcalc {

// ---------------------------------------------------------------------------
// Weyl sums. Phases are exact; only the final mean is floating point.

namespace equid_detail {

inline double mean_modulus(const std::vector<std::complex<double>>& zs)
{
    if (zs.empty()) return 0.0;
    return std::abs(pairwise_sum(zs) / static_cast<double>(zs.size()));
}

} // namespace equid_detail

/// |E_{n in [N]} e(c_0 + c_1 n + ... + c_d n^d)|.
inline double weyl_sum(const std::vector<Rational>& coeffs, long N)
{
    std::vector<std::complex<double>> zs;
    zs.reserve(static_cast<std::size_t>(N));
    for (long n = 1; n <= N; ++n) {
        Rational acc, p(1);
        for (const auto& c : coeffs) {
            acc += c * p;
            p *= Rational(n);
        }
        zs.push_back(expi(acc));
    }
    return equid_detail::mean_modulus(zs);
}

/// |E_{n in [N]} e(xi(g(n)))|.
inline double weyl_sum(const PolySeq& g, const HorizontalChar& xi, long N)
{
    if (g.domain_dim() != 1) throw std::invalid_argument("weyl_sum: one-dimensional domain required");
    std::vector<std::complex<double>> zs;
    zs.reserve(static_cast<std::size_t>(N));
    for (long n = 1; n <= N; ++n) zs.push_back(expi(xi.lift(g({n}))));
    return equid_detail::mean_modulus(zs);
}

// ---------------------------------------------------------------------------
// Obstruction search: a nontrivial horizontal character along which the orbit moves slowly.

/// Integer vectors of height exactly h whose first nonzero entry is positive,
/// in ascending lexicographic order. xi and -xi have the same smoothness.
inline std::vector<std::vector<long>> canonical_vectors(int m, long h)
{
    std::vector<std::vector<long>> out;
    std::vector<long> v(static_cast<std::size_t>(m), -h);
    while (true) {
        long ht = 0;
        int first = 0;
        for (int i = 0; i < m; ++i) ht = std::max(ht, std::abs(v[static_cast<std::size_t>(i)]));
        while (first < m && v[static_cast<std::size_t>(first)] == 0) ++first;
        if (ht == h && first < m && v[static_cast<std::size_t>(first)] > 0) out.push_back(v);
        int i = m - 1;
        while (i >= 0 && v[static_cast<std::size_t>(i)] == h) v[static_cast<std::size_t>(i--)] = -h;
        if (i < 0) break;
        ++v[static_cast<std::size_t>(i)];
    }
    return out;
}

struct ObstructionReport {
    bool obstruction = false;
    std::optional<HorizontalChar> witness;
    /// max_{1 <= n < N} |xi(g(n+1)) - xi(g(n))| on the torus, for the witness.
    std::optional<Rational> smoothness;
    long height = 0;
    Rational C;
    long N = 0;
    std::size_t searched = 0;

    std::string verdict() const { return obstruction ? "obstruction" : "no-obstruction-found"; }
    std::string str() const
    {
        std::ostringstream os;
        os << verdict() << " (H=" << height << ", C=" << C << ", N=" << N << ", searched " << searched << ")";
        if (witness) {
            os << " xi=(";
            for (std::size_t i = 0; i < witness->coeffs().size(); ++i) os << (i ? "," : "") << witness->coeffs()[i];
            os << ") smoothness=" << *smoothness;
        }
        return os.str();
    }
};

constexpr int max_horizontal_search_dim = 6;

inline ObstructionReport leibman_test(const PolySeq& g, long N, long H = 10, const Rational& C = Rational(10))
{
    if (g.domain_dim() != 1) throw std::invalid_argument("leibman_test: one-dimensional domain required");
    if (N < 2) throw std::invalid_argument("leibman_test: N >= 2");
    if (H < 1) throw std::invalid_argument("leibman_test: H >= 1");
    const auto& s = g.schema();
    const auto& hpos = s->horizontal_positions();
    const int m = static_cast<int>(hpos.size());
    if (m > max_horizontal_search_dim)
        throw std::invalid_argument("leibman_test: " + std::to_string(m) + " horizontal generators exceed the enumeration cap of "
                                    + std::to_string(max_horizontal_search_dim));

    ObstructionReport rep;
    rep.height = H;
    rep.C = C;
    rep.N = N;

    // Increments of the horizontal coordinates, exact and as doubles in I0.
    std::vector<std::vector<Rational>> inc(static_cast<std::size_t>(N - 1));
    std::vector<std::vector<double>> inc_d(static_cast<std::size_t>(N - 1));
    GroupElement prev = g({1});
    for (long n = 1; n < N; ++n) {
        GroupElement next = g({n + 1});
        auto& row = inc[static_cast<std::size_t>(n - 1)];
        auto& row_d = inc_d[static_cast<std::size_t>(n - 1)];
        for (int p : hpos) {
            row.push_back(next[p] - prev[p]);
            row_d.push_back(signed_frac(row.back()).to_double());
        }
        prev = std::move(next);
    }

    const Rational bound = C / Rational(N);
    const double bound_d = bound.to_double() + 1e-9;
    for (long h = 1; h <= H; ++h) {
        for (const auto& xi : canonical_vectors(m, h)) {
            ++rep.searched;
            bool close = true;
            for (const auto& row : inc_d) {
                double t = 0;
                for (int i = 0; i < m; ++i) t += static_cast<double>(xi[static_cast<std::size_t>(i)]) * row[static_cast<std::size_t>(i)];
                t -= std::round(t);
                if (std::abs(t) > bound_d) {
                    close = false;
                    break;
                }
            }
            if (!close) continue;
            Rational worst;
            for (const auto& row : inc) {
                Rational t;
                for (int i = 0; i < m; ++i) t += Rational(xi[static_cast<std::size_t>(i)]) * row[static_cast<std::size_t>(i)];
                worst = std::max(worst, torus_norm(t));
            }
            if (worst <= bound) {
                rep.obstruction = true;
                rep.witness = HorizontalChar(s, xi);
                rep.smoothness = worst;
                return rep;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Empirical distribution against Haar measure. Every nontrivial character below
// has Haar integral 0, so its empirical average is the discrepancy.

struct CharacterAverage {
    bool vertical = false;
    std::vector<long> coeffs;
    double average = 0;

    std::string label() const
    {
        std::ostringstream os;
        os << (vertical ? "vertical(" : "horizontal(");
        for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? "," : "") << coeffs[i];
        os << ")";
        return os.str();
    }
};

struct EmpiricalReport {
    long N = 0;
    long char_height = 0;
    std::vector<CharacterAverage> averages;
    double max_average = 0;
    std::string worst;
    std::size_t flagged = 0;

    std::string str() const
    {
        std::ostringstream os;
        os.precision(15);
        os << "max |average| = " << max_average << " at " << worst << " over " << averages.size() << " characters (N=" << N
           << ", height " << char_height << ")";
        return os.str();
    }
};

inline EmpiricalReport empirical_distribution_test(const PolySeq& g, long N, long char_height)
{
    if (g.domain_dim() != 1) throw std::invalid_argument("empirical_distribution_test: one-dimensional domain required");
    if (N < 1 || char_height < 1) throw std::invalid_argument("empirical_distribution_test: N >= 1 and char_height >= 1");
    const auto& s = g.schema();
    std::vector<GroupElement> orbit;
    orbit.reserve(static_cast<std::size_t>(N));
    for (long n = 1; n <= N; ++n) orbit.push_back(g({n}));

    EmpiricalReport rep;
    rep.N = N;
    rep.char_height = char_height;
    auto record = [&](CharacterAverage a) {
        if (rep.averages.empty() || a.average > rep.max_average) {
            rep.max_average = a.average;
            rep.worst = a.label();
        }
        rep.averages.push_back(std::move(a));
    };

    const int m = static_cast<int>(s->horizontal_positions().size());
    for (long h = 1; h <= char_height; ++h)
        for (const auto& xi : canonical_vectors(m, h)) {
            HorizontalChar chi(s, xi);
            std::vector<std::complex<double>> zs;
            zs.reserve(orbit.size());
            for (const auto& x : orbit) zs.push_back(expi(chi.lift(x)));
            record({false, xi, equid_detail::mean_modulus(zs)});
        }

    // Vertical characters act through the single-chart nilcharacter, which
    // transforms by e(eta) along the top group and so integrates to 0.
    const int v = static_cast<int>(s->positions(s->top_index()).size());
    for (long h = 1; h <= char_height; ++h)
        for (const auto& eta : canonical_vectors(v, h)) {
            auto spec = unsmoothed_spec(g, VerticalChar(s, s->top_index(), eta));
            std::vector<std::complex<double>> zs;
            zs.reserve(orbit.size());
            for (const auto& x : orbit) {
                auto val = eval_F(spec, x);
                if (val.flagged) ++rep.flagged;
                zs.push_back(val.value[0].value());
            }
            record({true, eta, equid_detail::mean_modulus(zs)});
        }
    return rep;
}

} // namespace nilcalc
