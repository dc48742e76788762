#include "nilcalc/bracket.hpp"
#include "nilcalc/equid.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nilcalc;
using support::q;

namespace {

PolySeq linear_torus_orbit(const Rational& a)
{
    auto s = catalog("torus(1,1)");
    return fit_orbit(s, 1, [&](const Point& n) { return GroupElement::basis(s, 0, a * Rational(n[0])); });
}

/// coords[i][j] is the n^j coefficient of coordinate i.
PolySeq torus_orbit(const std::vector<std::vector<Rational>>& coords)
{
    const int k = static_cast<int>(coords.size());
    const int d = static_cast<int>(coords.front().size()) - 1;
    auto s = catalog("torus(" + std::to_string(k) + "," + std::to_string(d) + ")");
    return fit_orbit(s, 1, [&](const Point& n) {
        std::vector<Rational> t;
        for (const auto& c : coords) {
            Rational acc, p(1);
            for (const auto& cj : c) {
                acc += cj * p;
                p *= Rational(n[0]);
            }
            t.push_back(acc);
        }
        return GroupElement(s, t);
    });
}

double geometric_oracle(const Rational& theta, long N)
{
    const double t = signed_frac(theta).to_double();
    if (t == 0.0) return 1.0;
    return std::abs(std::sin(M_PI * t * static_cast<double>(N)) / (static_cast<double>(N) * std::sin(M_PI * t)));
}

/// Every xi in [-H, H]^m \ 0 with exact increments; no sign reduction, no float filter.
std::optional<std::vector<long>> brute_force_obstruction(const PolySeq& g, long N, long H, const Rational& C)
{
    const auto& hpos = g.schema()->horizontal_positions();
    const int m = static_cast<int>(hpos.size());
    std::vector<GroupElement> orbit;
    for (long n = 1; n <= N; ++n) orbit.push_back(g({n}));
    std::vector<long> xi(static_cast<std::size_t>(m), -H);
    while (true) {
        bool nonzero = false;
        for (long v : xi) nonzero |= v != 0;
        if (nonzero) {
            bool ok = true;
            for (long n = 0; n + 1 < N && ok; ++n) {
                Rational t;
                for (int i = 0; i < m; ++i) t += Rational(xi[static_cast<std::size_t>(i)]) * (orbit[static_cast<std::size_t>(n + 1)][hpos[static_cast<std::size_t>(i)]] - orbit[static_cast<std::size_t>(n)][hpos[static_cast<std::size_t>(i)]]);
                ok = torus_norm(t) * Rational(N) <= C;
            }
            if (ok) return xi;
        }
        int i = m - 1;
        while (i >= 0 && xi[static_cast<std::size_t>(i)] == H) xi[static_cast<std::size_t>(i--)] = -H;
        if (i < 0) return std::nullopt;
        ++xi[static_cast<std::size_t>(i)];
    }
}

const Rational golden(14930352L, 24157817L);
const Rational silver(22619537L, 54608393L);

} // namespace

// --- Weyl sums ----------------------------------------------------------------

TEST(WeylSum, Examples)
{
    EXPECT_NEAR(weyl_sum({q(0), q(1, 2)}, 64), 0.0, 1e-14);
    EXPECT_NEAR(weyl_sum({q(0)}, 64), 1.0, 1e-15);
    EXPECT_NEAR(weyl_sum({q(0), q(89, 144)}, 144), geometric_oracle(q(89, 144), 144), 1e-12);
    auto g = linear_torus_orbit(q(5, 13));
    EXPECT_NEAR(weyl_sum(g, HorizontalChar(g.schema(), {0}), 50), 1.0, 1e-15);
    EXPECT_NEAR(weyl_sum(g, HorizontalChar(g.schema(), {13}), 50), 1.0, 1e-12);
}

TEST(WeylSum, LinearPhasesMatchGeometricSeries)
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<long> Ns(1, 2000);
    for (int t = 0; t < 500; ++t) {
        Rational a = sample_rational(rng, 1, 100000);
        long N = Ns(rng);
        ASSERT_NEAR(weyl_sum({q(0), a}, N), geometric_oracle(a, N), 1e-12) << a << " N=" << N;
    }
}

// --- obstruction search --------------------------------------------------------

TEST(Leibman, CanonicalVectors)
{
    auto v1 = canonical_vectors(1, 3);
    EXPECT_EQ(v1, (std::vector<std::vector<long>>{{3}}));
    auto v2 = canonical_vectors(2, 1);
    EXPECT_EQ(v2, (std::vector<std::vector<long>>{{0, 1}, {1, -1}, {1, 0}, {1, 1}}));
    std::size_t total = 0;
    for (long h = 1; h <= 4; ++h) total += canonical_vectors(3, h).size();
    EXPECT_EQ(total, (9u * 9u * 9u - 1u) / 2u);
}

TEST(Leibman, PeriodicOrbit)
{
    auto rep = leibman_test(linear_torus_orbit(q(1, 3)), 100, 5, q(1));
    ASSERT_TRUE(rep.obstruction);
    EXPECT_EQ(rep.witness->coeffs(), std::vector<long>{3});
    EXPECT_EQ(*rep.smoothness, q(0));
    EXPECT_EQ(rep.verdict(), "obstruction");
}

TEST(Leibman, NearHalf)
{
    for (long N : {100L, 1000L}) {
        auto rep = leibman_test(linear_torus_orbit(q(1, 2) + Rational(1, 7 * N)), N, 5, q(1));
        ASSERT_TRUE(rep.obstruction);
        EXPECT_EQ(rep.witness->coeffs(), std::vector<long>{2});
        EXPECT_EQ(*rep.smoothness, Rational(2, 7 * N));
        EXPECT_LE(*rep.smoothness * Rational(N), q(1));
    }
}

TEST(Leibman, GenericFrequencyHasNoObstruction)
{
    const long N = 1000;
    for (const Rational& a : {golden, silver}) {
        ASSERT_GT(a.denominator(), N * N);
        auto g = linear_torus_orbit(a);
        auto rep = leibman_test(g, N, 10, q(10));
        EXPECT_FALSE(rep.obstruction) << rep.str();
        EXPECT_EQ(rep.searched, 10u);
        EXPECT_FALSE(brute_force_obstruction(g, N, 10, q(10)).has_value());
    }
}

TEST(Leibman, AgreesWithBruteForceOnHeisenberg)
{
    // Dirichlet forces a height-10 witness for two frequencies once C/N >= 1/100.
    auto g = heisenberg_bracket_spec(silver, golden).orbit;
    auto rep = leibman_test(g, 1000, 10, q(10));
    ASSERT_TRUE(rep.obstruction);
    EXPECT_EQ(rep.witness->coeffs(), (std::vector<long>{3, -2}));
    auto brute = brute_force_obstruction(g, 1000, 10, q(10));
    ASSERT_TRUE(brute.has_value());
    auto none = leibman_test(g, 4096, 4, q(1));
    EXPECT_EQ(none.obstruction, brute_force_obstruction(g, 4096, 4, q(1)).has_value());
}

TEST(Leibman, Errors)
{
    EXPECT_THROW(leibman_test(linear_torus_orbit(q(1, 3)), 1, 5, q(1)), std::invalid_argument);
    auto s = catalog("torus(7,1)");
    auto g = fit_orbit(s, 1, [&](const Point& n) { return GroupElement::basis(s, 0, Rational(n[0], 3)); });
    EXPECT_THROW(leibman_test(g, 10, 2, q(1)), std::invalid_argument);
    auto a = catalog("appC_multidegree");
    EXPECT_THROW(leibman_test(PolySeq::constant(GroupElement::identity(a), 2), 10, 2, q(1)), std::invalid_argument);
}

// --- empirical distribution -------------------------------------------------------

TEST(Empirical, PeriodicOrbitPullback)
{
    auto rep = empirical_distribution_test(linear_torus_orbit(q(1, 3)), 300, 3);
    double at3 = -1;
    for (const auto& c : rep.averages)
        if (!c.vertical && c.coeffs == std::vector<long>{3}) at3 = c.average;
    EXPECT_NEAR(at3, 1.0, 1e-12);
    EXPECT_NEAR(rep.max_average, 1.0, 1e-12);
}

TEST(Empirical, ConstantOrbit)
{
    auto s = catalog("heisenberg");
    auto g = PolySeq::constant(GroupElement(s, {q(1, 5), q(2, 7), q(1, 11)}), 1);
    auto rep = empirical_distribution_test(g, 64, 2);
    ASSERT_FALSE(rep.averages.empty());
    for (const auto& c : rep.averages) EXPECT_NEAR(c.average, 1.0, 1e-12) << c.label();
}

TEST(Empirical, GenericHeisenbergOrbit)
{
    auto g = heisenberg_bracket_spec(silver, golden).orbit;
    auto rep = empirical_distribution_test(g, 4096, 3);
    EXPECT_EQ(rep.averages.size(), 24u + 3u);
    EXPECT_LE(rep.max_average, 0.15) << rep.str();
    // pre-registered run
    EXPECT_NEAR(rep.max_average, 0.019129286643011, 1e-9);
    EXPECT_EQ(rep.worst, "vertical(2)");
}

// --- consistency of the two criteria -----------------------------------------------

namespace {

std::vector<PolySeq> consistency_suite(long N)
{
    std::vector<PolySeq> suite;
    for (const Rational& a : {q(1, 3), q(2, 5), q(1, 2) + Rational(1, 7 * N), q(3, 7), q(1, 4) + Rational(1, 9 * N), q(5, 8)})
        suite.push_back(linear_torus_orbit(a));
    suite.push_back(torus_orbit({{q(0), golden, q(1, 3)}}));
    suite.push_back(torus_orbit({{q(0), q(1, 5), q(1, 2)}}));
    suite.push_back(torus_orbit({{q(1, 7), q(0), q(2, 7)}}));
    suite.push_back(torus_orbit({{q(0), q(1, 3)}, {q(0), golden}}));
    suite.push_back(torus_orbit({{q(0), golden}, {q(0), golden + q(1, 2)}}));
    suite.push_back(torus_orbit({{q(0), silver}, {q(0), q(2, 9)}}));
    suite.push_back(torus_orbit({{q(0), golden}, {q(0), silver}}));
    for (const auto& [a, b] : std::vector<std::pair<Rational, Rational>>{
             {q(1, 3), golden}, {golden, q(1, 4)}, {q(1, 5), q(2, 5)}, {golden, golden}, {silver, golden}, {q(1, 6), q(1, 6)}, {q(3, 10), silver}})
        suite.push_back(heisenberg_bracket_spec(a, b).orbit);
    return suite;
}

} // namespace

TEST(EquidConsistency, ObstructionImpliesLargeAverage)
{
    // Witness phases stay in an arc of C turns, so the average is at least cos(pi C) >= 1/4 once C <= 0.419.
    const long N = 256, H = 10;
    const Rational C(1, 4);
    ASSERT_GE(Rational(N), Rational(64) * C);
    auto suite = consistency_suite(N);
    ASSERT_EQ(suite.size(), 20u);
    int obstructions = 0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        auto lt = leibman_test(suite[i], N, H, C);
        if (!lt.obstruction) continue;
        ++obstructions;
        auto emp = empirical_distribution_test(suite[i], N, H);
        EXPECT_GE(emp.max_average, 0.25) << "case " << i << ": " << lt.str() << " / " << emp.str();
    }
    EXPECT_GE(obstructions, 14);
}

TEST(EquidConsistency, LargerConstantFailsOnlyThroughDrift)
{
    // At C = 1 a witness may wind once around the circle over [N] and average to nearly 0.
    const long N = 256, H = 10;
    const Rational C(1);
    auto suite = consistency_suite(N);
    int violations = 0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        auto lt = leibman_test(suite[i], N, H, C);
        if (!lt.obstruction) continue;
        auto emp = empirical_distribution_test(suite[i], N, H);
        if (emp.max_average >= 0.25) continue;
        ++violations;
        EXPECT_GT((*lt.smoothness * Rational(N - 1)).to_double(), 0.419) << "case " << i << ": " << lt.str();
    }
    EXPECT_EQ(violations, 1);
}

// --- torus suite against the classical Weyl coefficient condition --------------------

namespace {

// a + sum_j q_j r_j with r_j = sqrt(2), sqrt(3), sqrt(5), sqrt(7), which are
// linearly independent over Q together with 1.
struct Symbolic {
    Rational rational;
    std::array<long, 4> irr{};
};

Rational sqrt_approx(int k)
{
    static const double roots[4] = {std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0), std::sqrt(7.0)};
    const long den = 1000000000000L;
    return Rational(mpz_class(static_cast<long>(std::llround(roots[k] * 1e12))), mpz_class(den));
}

Rational numeric(const Symbolic& s)
{
    Rational out = s.rational;
    for (int k = 0; k < 4; ++k)
        if (s.irr[static_cast<std::size_t>(k)]) out += Rational(s.irr[static_cast<std::size_t>(k)]) * sqrt_approx(k);
    return out;
}

/// Smallest height of a nonzero xi for which n -> xi.g(n) - xi.g(0) is integer-valued,
/// read off the forward differences at 0 (the binomial-basis coefficients).
std::optional<long> weyl_witness_height(const std::vector<std::vector<Symbolic>>& c, long max_height)
{
    const int m = static_cast<int>(c.size());
    const int d = static_cast<int>(c.front().size()) - 1;
    // vals[i][t] = coordinate i at n = t, symbolically.
    std::vector<std::vector<Symbolic>> vals(static_cast<std::size_t>(m), std::vector<Symbolic>(static_cast<std::size_t>(d + 1)));
    for (int i = 0; i < m; ++i)
        for (int t = 0; t <= d; ++t) {
            Symbolic& v = vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
            long p = 1;
            for (int j = 0; j <= d; ++j) {
                const auto& cij = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                v.rational += Rational(p) * cij.rational;
                for (int k = 0; k < 4; ++k) v.irr[static_cast<std::size_t>(k)] += p * cij.irr[static_cast<std::size_t>(k)];
                p *= t;
            }
        }
    std::optional<long> best;
    std::vector<long> xi(static_cast<std::size_t>(m), -max_height);
    while (true) {
        long h = 0;
        for (long v : xi) h = std::max(h, std::abs(v));
        if (h > 0 && (!best || h < *best)) {
            std::vector<Symbolic> diff(static_cast<std::size_t>(d + 1));
            for (int t = 0; t <= d; ++t)
                for (int i = 0; i < m; ++i) {
                    const auto& v = vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
                    auto& out = diff[static_cast<std::size_t>(t)];
                    out.rational += Rational(xi[static_cast<std::size_t>(i)]) * v.rational;
                    for (int k = 0; k < 4; ++k) out.irr[static_cast<std::size_t>(k)] += xi[static_cast<std::size_t>(i)] * v.irr[static_cast<std::size_t>(k)];
                }
            bool integral = true;
            for (int j = 1; j <= d; ++j) {
                for (int t = d; t >= j; --t) {
                    auto& a = diff[static_cast<std::size_t>(t)];
                    const auto& b = diff[static_cast<std::size_t>(t - 1)];
                    a.rational -= b.rational;
                    for (int k = 0; k < 4; ++k) a.irr[static_cast<std::size_t>(k)] -= b.irr[static_cast<std::size_t>(k)];
                }
                const auto& dj = diff[static_cast<std::size_t>(j)];
                for (long v : dj.irr) integral &= v == 0;
                integral &= dj.rational.is_integer();
            }
            if (integral) best = h;
        }
        int i = m - 1;
        while (i >= 0 && xi[static_cast<std::size_t>(i)] == max_height) xi[static_cast<std::size_t>(i--)] = -max_height;
        if (i < 0) return best;
        ++xi[static_cast<std::size_t>(i)];
    }
}

} // namespace

TEST(EquidTorusSuite, MatchesWeylCoefficientCondition)
{
    const long N = 2048, H = 10;
    std::mt19937_64 rng(32);
    const std::vector<Rational> rationals = {q(0), q(1, 2), q(1, 3), q(2, 5), q(1, 4)};
    std::uniform_int_distribution<int> pick_r(0, static_cast<int>(rationals.size()) - 1), pick_k(0, 3), pick_q(-1, 1), pick_dim(1, 2), coin(0, 2);
    int cases = 0, equidistributed = 0;
    while (cases < 50) {
        const int m = pick_dim(rng), d = pick_dim(rng);
        std::vector<std::vector<Symbolic>> c(static_cast<std::size_t>(m), std::vector<Symbolic>(static_cast<std::size_t>(d + 1)));
        for (auto& row : c)
            for (auto& s : row) {
                s.rational = rationals[static_cast<std::size_t>(pick_r(rng))];
                if (coin(rng) == 0) s.irr[static_cast<std::size_t>(pick_k(rng))] = pick_q(rng);
            }
        // Classical condition, searched far beyond H; keep cases whose verdict H already decides.
        auto witness = weyl_witness_height(c, 3 * H);
        if (witness && *witness > H) continue;
        std::vector<std::vector<Rational>> numeric_c;
        for (const auto& row : c) {
            std::vector<Rational> r;
            for (const auto& s : row) r.push_back(numeric(s));
            numeric_c.push_back(r);
        }
        auto rep = leibman_test(torus_orbit(numeric_c), N, H, q(1));
        EXPECT_EQ(rep.obstruction, witness.has_value()) << "case " << cases << ": " << rep.str();
        if (rep.obstruction) {
            EXPECT_EQ(rep.witness->height(), *witness);
        }
        if (!witness) ++equidistributed;
        ++cases;
    }
    EXPECT_GE(equidistributed, 10);
    EXPECT_LE(equidistributed, 40);
}
