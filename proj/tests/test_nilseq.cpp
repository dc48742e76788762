#include "nilcalc/nilseq.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nilcalc;
using support::el;
using support::q;

namespace {

// Taylor form of n -> e2^{beta n} e1^{alpha n}.
PolySeq heis_linear(const SchemaPtr& s, const Rational& a, const Rational& b)
{
    return PolySeq::make(s, 1, {{{0}, GroupElement::identity(s)}, {{1}, el(s, {a, b, -a * b})}, {{2}, el(s, {0, 0, -a * b})}});
}

VerticalChar heis_eta(const SchemaPtr& s, long c = -1) { return VerticalChar(s, FiltIndex::degree(2), {c}); }

Rational random_frequency(std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> den(10001, 99991);
    long d = den(rng);
    std::uniform_int_distribution<long> num(-d, d);
    return Rational(num(rng), d);
}

// Embeds a pair of Taylor forms into the product schema.
PolySeq product_orbit(const SchemaPtr& p, const PolySeq& a, const PolySeq& b)
{
    PolySeq::Coeffs c;
    for (const auto& j : a.J()) {
        Coords t = a.coeff(j).coords();
        const Coords u = b.coeff(j).coords();
        t.insert(t.end(), u.begin(), u.end());
        c.emplace_back(j, GroupElement(p, t));
    }
    return PolySeq::make(p, 1, c);
}

} // namespace

// --- atlas ------------------------------------------------------------------

TEST(Atlas, GridCoversAndNormalizes)
{
    for (int h : {1, 2, 3}) {
        auto a = SmoothingAtlas::grid(h);
        auto rep = a.verify();
        EXPECT_TRUE(rep.pass) << h << ": " << rep.detail;
        EXPECT_LE(rep.max_weight_error, 1e-12);
    }
    EXPECT_EQ(SmoothingAtlas::grid(2).charts(), 64u);
    EXPECT_EQ(SmoothingAtlas::grid(1).charts(), 6u);
    EXPECT_TRUE(SmoothingAtlas::grid(2, q(1, 8)).verify().pass);
}

TEST(Atlas, Rejections)
{
    EXPECT_THROW(SmoothingAtlas::grid(2, q(1, 5)), std::invalid_argument);
    EXPECT_THROW(SmoothingAtlas::grid(6), std::invalid_argument);
    EXPECT_EQ(SmoothingAtlas::single_chart(6).charts(), 1u);
}

TEST(Atlas, ProductWeightsMultiply)
{
    auto a = SmoothingAtlas::grid(1), b = SmoothingAtlas::grid(2);
    auto p = SmoothingAtlas::product(a, b);
    EXPECT_EQ(p.charts(), a.charts() * b.charts());
    std::vector<Rational> y{q(1, 7), q(-2, 9), q(3, 11)};
    auto wa = a.weights({y[0]}), wb = b.weights({y[1], y[2]}), wp = p.weights(y);
    for (std::size_t i = 0; i < wa.size(); ++i)
        for (std::size_t j = 0; j < wb.size(); ++j) EXPECT_EQ(wp[i * wb.size() + j], wa[i] * wb[j]);
    EXPECT_TRUE(p.verify().pass);
}

// --- evaluation -------------------------------------------------------------

TEST(Nilchar, HeisenbergUnsmoothedExample)
{
    auto s = catalog("heisenberg");
    auto spec = unsmoothed_spec(heis_linear(s, q(2, 7), q(3, 5)), heis_eta(s));
    auto v = eval_nilchar(spec, {4});
    ASSERT_EQ(v.value.dim(), 1u);
    EXPECT_FALSE(v.flagged);
    EXPECT_EQ(v.value, phase(q(12, 35)));
}

TEST(Nilchar, HeisenbergBracketUnsmoothed)
{
    auto s = catalog("heisenberg");
    std::mt19937_64 rng(1);
    for (int t = 0; t < 10; ++t) {
        Rational a = random_frequency(rng), b = random_frequency(rng);
        auto spec = unsmoothed_spec(heis_linear(s, a, b), heis_eta(s));
        for (long n = 1; n <= 300; ++n) {
            auto v = eval_nilchar(spec, {n});
            if (v.flagged) continue;
            Rational an = a * Rational(n), bn = b * Rational(n);
            ASSERT_EQ(v.value, phase(signed_frac(an) * bn)) << n;
        }
    }
}

TEST(Nilchar, MultiChartComponents)
{
    // Chart with e1-offset theta: component phase {alpha n - theta} beta n + theta beta n.
    auto s = catalog("heisenberg");
    Rational a = q(2, 7), b = q(3, 5);
    auto spec = smoothed_spec(heis_linear(s, a, b), heis_eta(s));
    EXPECT_EQ(spec.output_dim(), 64u);
    for (long n = 1; n <= 40; ++n) {
        auto v = eval_nilchar(spec, {n}).value;
        int nonzero = 0;
        for (std::size_t k = 0; k < v.dim(); ++k) {
            if (v[k].modulus == 0.0) continue;
            ++nonzero;
            Rational theta = spec.atlas.center(k)[0];
            Rational an = a * Rational(n), bn = b * Rational(n);
            EXPECT_EQ(v[k].phase, TorusPoint(signed_frac(an - theta) * bn + theta * bn)) << n << " chart " << k;
        }
        EXPECT_GT(nonzero, 0);
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    }
}

TEST(Nilchar, ConstantOrbitIsFixed)
{
    auto s = catalog("heisenberg");
    auto spec = smoothed_spec(PolySeq::identity(s, 1), heis_eta(s));
    auto v0 = eval_nilchar(spec, {0}).value;
    for (long n = 1; n <= 20; ++n) EXPECT_EQ(eval_nilchar(spec, {n}).value, v0);
    EXPECT_NEAR(v0.norm(), 1.0, 1e-12);
}

TEST(Nilchar, UnitNormAcrossCatalog)
{
    std::mt19937_64 rng(2);
    for (const auto& ref : support::catalog_refs()) {
        auto s = catalog(ref);
        int k = support::natural_k(s);
        auto d = s->top_index();
        std::vector<long> c(s->positions(d).size());
        for (auto& x : c) x = std::uniform_int_distribution<long>(-3, 3)(rng);
        auto g = support::random_polyseq(s, k, rng);
        VerticalChar eta(s, d, c);
        int h = static_cast<int>(chart_positions(*s, d).size());
        NilcharSpec spec = h <= 3 ? smoothed_spec(g, eta) : unsmoothed_spec(g, eta);
        std::uniform_int_distribution<long> pick(-50, 50);
        for (int t = 0; t < 30; ++t) {
            Point n(static_cast<std::size_t>(k));
            for (auto& x : n) x = pick(rng);
            EXPECT_NEAR(eval_nilchar(spec, n).value.norm(), 1.0, 1e-12) << ref;
        }
    }
}

TEST(Nilchar, WellDefinedOnCosets)
{
    std::mt19937_64 rng(4);
    for (const char* ref : {"heisenberg", "universal([2],(3,3))", "free2step(3)", "universal([1,1],(4,3))"}) {
        auto s = catalog(ref);
        auto d = s->top_index();
        std::vector<long> c(s->positions(d).size(), 1);
        auto g = PolySeq::identity(s, 1);
        VerticalChar eta(s, d, c);
        for (const auto& spec : {smoothed_spec(g, eta), unsmoothed_spec(g, eta)}) {
            for (int t = 0; t < 30; ++t) {
                auto x = sample_element(s, rng, 2, 7);
                Coords gc(static_cast<std::size_t>(s->dim()));
                for (auto& v : gc) v = Rational(std::uniform_int_distribution<long>(-3, 3)(rng));
                auto gamma = GroupElement(s, gc);
                auto a = eval_F(spec, x), b = eval_F(spec, mul(x, gamma));
                EXPECT_EQ(a.value, b.value) << ref;
            }
        }
    }
}

TEST(Nilchar, SpecValidation)
{
    auto s = catalog("heisenberg");
    auto g = PolySeq::identity(s, 1);
    EXPECT_THROW(unsmoothed_spec(g, VerticalChar(s, FiltIndex::degree(1), {1, 0, 0})), std::invalid_argument);
    NilcharSpec bad{s, g, heis_eta(s), SmoothingAtlas::grid(1)};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

// --- equivariance -----------------------------------------------------------

TEST(Equivariance, CentralShiftIsExactPhase)
{
    auto s = catalog("heisenberg");
    for (long c : {1L, -1L}) {
        auto spec = smoothed_spec(heis_linear(s, q(2, 7), q(3, 5)), heis_eta(s, c));
        auto x = el(s, {q(1, 5), q(-2, 7), q(3, 4)});
        auto shifted_v = eval_F(spec, mul(GroupElement::basis(s, 2, q(1, 3)), x)).value;
        EXPECT_EQ(shifted_v, eval_F(spec, x).value.rotated(TorusPoint(Rational(c) * q(1, 3))));
        auto rep = verify_equivariance(spec, 200);
        EXPECT_TRUE(rep.exact);
        EXPECT_LT(rep.max_discrepancy, 1e-12);
    }
}

TEST(Equivariance, TrivialEtaIsInvariant)
{
    auto s = catalog("heisenberg");
    auto spec = smoothed_spec(PolySeq::identity(s, 1), heis_eta(s, 0));
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        auto x = sample_element(s, rng, 2, 9);
        auto z = GroupElement::basis(s, 2, sample_rational(rng, 3, 9));
        EXPECT_EQ(eval_F(spec, mul(z, x)).value, eval_F(spec, x).value);
    }
}

TEST(Equivariance, WrongEtaIsDetected)
{
    auto s = catalog("heisenberg");
    auto spec = smoothed_spec(PolySeq::identity(s, 1), heis_eta(s, -1));
    auto rep = verify_equivariance(spec, 50, 3, heis_eta(s, 2));
    EXPECT_FALSE(rep.exact);
    EXPECT_GT(rep.max_discrepancy, 1e-3);
}

TEST(Equivariance, HigherStepCatalog)
{
    std::mt19937_64 rng(8);
    for (const char* ref : {"universal([2],(4,4))", "universal([2,1],(3,2))", "heisenberg_degrank32", "appC_multidegree"}) {
        auto s = catalog(ref);
        auto d = s->top_index();
        std::vector<long> c(s->positions(d).size());
        for (auto& x : c) x = std::uniform_int_distribution<long>(-2, 2)(rng);
        int k = support::natural_k(s);
        VerticalChar eta(s, d, c);
        int h = static_cast<int>(chart_positions(*s, d).size());
        auto g = PolySeq::identity(s, k);
        auto spec = h <= 3 ? smoothed_spec(g, eta) : unsmoothed_spec(g, eta);
        auto rep = verify_equivariance(spec, 40);
        EXPECT_TRUE(rep.exact) << ref;
    }
}

// --- products ---------------------------------------------------------------

TEST(Nilchar, TensorMatchesProductGroup)
{
    std::mt19937_64 rng(10);
    for (const char* other : {"heisenberg", "torus(1,2)"}) {
        auto A = catalog("heisenberg"), B = catalog(other);
        auto P = catalog(std::string("product(heisenberg,") + other + ")");
        auto ga = support::random_polyseq(A, 1, rng, 3, 11), gb = support::random_polyseq(B, 1, rng, 3, 11);
        VerticalChar ea(A, FiltIndex::degree(2), {-1});
        VerticalChar eb(B, FiltIndex::degree(2), std::vector<long>(B->positions(FiltIndex::degree(2)).size(), 2));
        auto sa = smoothed_spec(ga, ea), sb = smoothed_spec(gb, eb);
        std::vector<long> pc = ea.coeffs();
        pc.insert(pc.end(), eb.coeffs().begin(), eb.coeffs().end());
        NilcharSpec sp{P, product_orbit(P, ga, gb), VerticalChar(P, FiltIndex::degree(2), pc), SmoothingAtlas::product(sa.atlas, sb.atlas)};
        sp.validate();
        for (long n = -20; n <= 60; ++n) {
            auto t = tensor(eval_nilchar(sa, {n}).value, eval_nilchar(sb, {n}).value);
            ASSERT_EQ(eval_nilchar(sp, {n}).value, t) << other << " n=" << n;
            EXPECT_NEAR(t.norm(), 1.0, 1e-12);
        }
    }
}

// --- linear lift ------------------------------------------------------------

TEST(LinearLift, Examples)
{
    TorusPoint a(q(1, 7)), b(q(1, 3)), c(q(0));
    EXPECT_EQ(linear_lift_eval(a, b, TorusPoint(q(2, 5)), 0), TorusPoint(q(2, 5)));
    EXPECT_EQ(linear_lift_eval(a, b, TorusPoint(q(2, 5)), 1), TorusPoint(q(1, 7) + q(1, 3) + q(2, 5)));
    EXPECT_EQ(linear_lift_eval(a, b, c, 6), TorusPoint(q(0)));
}

TEST(LinearLift, MatchesClosedForm)
{
    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
        TorusPoint a(random_frequency(rng)), b(random_frequency(rng)), c(random_frequency(rng));
        auto orbit = linear_lift_orbit(a, b, c, 500);
        ASSERT_EQ(orbit.size(), 501u);
        for (long n = 0; n <= 500; ++n) ASSERT_EQ(orbit[static_cast<std::size_t>(n)], linear_lift_closed(a, b, c, n)) << n;
    }
}
