#include "nilcalc/catalog.hpp"
#include "nilcalc/nilgroup.hpp"
#include "nilcalc/testing/word_collect.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nilcalc;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

GroupElement el(const SchemaPtr& s, std::vector<Rational> t) { return GroupElement(s, std::move(t)); }

const std::vector<std::string>& catalog_refs()
{
    static const std::vector<std::string> refs = {
        "torus(2,3)",
        "heisenberg",
        "heisenberg_degrank32",
        "free2step(3)",
        "appC_multidegree",
        "universal([2],(3,3))",
        "universal([2],(4,4))",
        "universal([2,1],(3,2))",
        "universal([1,1],(4,3))",
        "product(heisenberg,torus(1,2))",
    };
    return refs;
}

} // namespace

// --- FiltIndex --------------------------------------------------------------

TEST(FiltIndex, ParseAndPrint)
{
    EXPECT_EQ(FiltIndex::parse("2"), FiltIndex::degree(2));
    EXPECT_EQ(FiltIndex::parse("(3, 2)"), FiltIndex::degree_rank(3, 2));
    EXPECT_EQ(FiltIndex::parse("[1,0]"), FiltIndex::multi({1, 0}));
    EXPECT_EQ(FiltIndex::degree_rank(3, 2).str(), "(3,2)");
    EXPECT_EQ(FiltIndex::multi({0, 1}).str(), "[0,1]");
    EXPECT_THROW(FiltIndex::parse("(1,2)"), std::invalid_argument);
    EXPECT_THROW(FiltIndex::parse("x"), std::invalid_argument);
}

TEST(FiltIndex, OrderAndAddition)
{
    EXPECT_TRUE(filt_leq(FiltIndex::degree_rank(2, 2), FiltIndex::degree_rank(3, 0)));
    EXPECT_FALSE(filt_leq(FiltIndex::degree_rank(3, 0), FiltIndex::degree_rank(2, 2)));
    EXPECT_TRUE(filt_leq(FiltIndex::multi({0, 1}), FiltIndex::multi({1, 1})));
    EXPECT_FALSE(filt_leq(FiltIndex::multi({1, 0}), FiltIndex::multi({0, 1})));
    EXPECT_FALSE(filt_leq(FiltIndex::multi({0, 1}), FiltIndex::multi({1, 0})));
    EXPECT_EQ(FiltIndex::degree_rank(1, 1) + FiltIndex::degree_rank(2, 1), FiltIndex::degree_rank(3, 2));
    EXPECT_EQ(FiltIndex::degree_rank(1, 2).normalized(), FiltIndex::degree_rank(2, 0));
    // zero is minimal
    for (auto i : {FiltIndex::degree_rank(0, 0), FiltIndex::degree_rank(1, 0), FiltIndex::degree_rank(4, 3)})
        EXPECT_TRUE(filt_leq(FiltIndex::degree_rank(0, 0), i));
}

// --- mul ------------------------------------------------------------------

TEST(Mul, TorusIsAbelianAddition)
{
    auto T = catalog("torus(2,1)");
    EXPECT_EQ(mul(el(T, {q(1, 3), q(1, 4)}), el(T, {q(1, 3), q(1, 2)})), el(T, {q(2, 3), q(3, 4)}));
}

TEST(Mul, HeisenbergCollectionFormula)
{
    auto H = catalog("heisenberg");
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        auto a = sample_element(H, rng), b = sample_element(H, rng);
        auto z = mul(a, b);
        EXPECT_EQ(z, el(H, {a[0] + b[0], a[1] + b[1], a[2] + b[2] - a[1] * b[0]}));
    }
}

TEST(Mul, Identity)
{
    for (const auto& ref : catalog_refs()) {
        auto S = catalog(ref);
        std::mt19937_64 rng(2);
        auto x = sample_element(S, rng);
        EXPECT_EQ(mul(x, GroupElement::identity(S)), x) << ref;
        EXPECT_EQ(mul(GroupElement::identity(S), x), x) << ref;
    }
}

TEST(Mul, SchemaMismatchThrows)
{
    auto H = catalog("heisenberg");
    auto T = catalog("torus(3,1)");
    EXPECT_THROW(mul(GroupElement::identity(H), GroupElement::identity(T)), std::invalid_argument);
}

TEST(Mul, ClosedFormAgreesWithBch)
{
    for (const auto& ref : catalog_refs()) {
        auto S = catalog(ref);
        if (!S->uses_class2_formula()) continue;
        std::mt19937_64 rng(3);
        for (int i = 0; i < 100; ++i) {
            auto x = sample_element(S, rng), y = sample_element(S, rng);
            Rational t = sample_rational(rng, 3, 7);
            EXPECT_EQ(mul(x, y), mul_via_lie(x, y)) << ref;
            EXPECT_EQ(power(x, t), power_via_lie(x, t)) << ref;
        }
    }
}

TEST(Mul, AgreesWithWordRewritingOracle)
{
    for (const auto& ref : catalog_refs()) {
        auto S = catalog(ref);
        oracle::WordCollector oracle(S);
        std::mt19937_64 rng(4);
        long bound = S->dim() > 6 ? 2 : 3;
        for (int i = 0; i < 500; ++i) {
            auto x = sample_element(S, rng, bound, 1), y = sample_element(S, rng, bound, 1);
            ASSERT_EQ(mul(x, y).coords(), oracle.mul(x.coords(), y.coords())) << ref << " " << x << " " << y;
        }
    }
}

// --- power -----------------------------------------------------------------

TEST(Power, Examples)
{
    auto H = catalog("heisenberg");
    EXPECT_EQ(power(GroupElement::basis(H, 0, q(1, 2)), q(2)), GroupElement::basis(H, 0));
    EXPECT_EQ(power(el(H, {q(1), q(1), q(0)}), q(2)), el(H, {q(2), q(2), q(-1)}));
    std::mt19937_64 rng(5);
    auto x = sample_element(H, rng);
    EXPECT_TRUE(power(x, q(0)).is_identity());
}

TEST(Power, MatchesRepeatedMul)
{
    for (const auto& ref : catalog_refs()) {
        auto S = catalog(ref);
        std::mt19937_64 rng(6);
        for (int i = 0; i < 20; ++i) {
            auto x = sample_element(S, rng);
            GroupElement acc = GroupElement::identity(S);
            for (int n = 1; n <= 4; ++n) {
                acc = mul(acc, x);
                EXPECT_EQ(power(x, q(n)), acc) << ref;
            }
            EXPECT_EQ(power(x, q(-1)), inverse(x));
            EXPECT_TRUE(mul(x, inverse(x)).is_identity());
        }
    }
}

TEST(Power, AdditiveOnBasisWords)
{
    for (const auto& ref : catalog_refs()) {
        auto S = catalog(ref);
        std::mt19937_64 rng(7);
        for (int k = 0; k < S->dim(); ++k) {
            auto x = GroupElement::basis(S, k, sample_rational(rng, 2, 5));
            Rational s = sample_rational(rng, 3, 4), t = sample_rational(rng, 3, 4);
            EXPECT_EQ(power(x, s + t), mul(power(x, s), power(x, t))) << ref;
        }
        // General elements: integer exponents.
        for (int i = 0; i < 10; ++i) {
            auto x = sample_element(S, rng);
            EXPECT_EQ(power(x, q(5)), mul(power(x, q(2)), power(x, q(3)))) << ref;
            EXPECT_EQ(power(x, q(-2)), mul(power(x, q(1)), power(x, q(-3)))) << ref;
        }
    }
}

TEST(Power, RationalRootsCompose)
{
    auto S = catalog("universal([2],(4,4))");
    std::mt19937_64 rng(8);
    for (int i = 0; i < 10; ++i) {
        auto x = sample_element(S, rng);
        EXPECT_EQ(power(power(x, q(1, 3)), q(3)), x);
        EXPECT_EQ(power(power(x, q(2, 5)), q(5, 2)), x);
    }
}

// --- commutator ---------------------------------------------------------------

TEST(Commutator, Examples)
{
    auto H = catalog("heisenberg");
    std::mt19937_64 rng(9);
    for (int i = 0; i < 20; ++i) {
        Rational s = sample_rational(rng, 4, 6), t = sample_rational(rng, 4, 6);
        EXPECT_EQ(commutator(GroupElement::basis(H, 0, s), GroupElement::basis(H, 1, t)), el(H, {q(0), q(0), s * t}));
    }
    EXPECT_EQ(commutator(GroupElement::basis(H, 0), GroupElement::basis(H, 1)), GroupElement::basis(H, 2));
    auto x = sample_element(H, rng);
    EXPECT_TRUE(commutator(x, x).is_identity());
    auto T = catalog("torus(3,2)");
    EXPECT_TRUE(commutator(sample_element(T, rng), sample_element(T, rng)).is_identity());
}

TEST(Commutator, TwoStepGroupsSpannedByBasisCommutators)
{
    for (const auto& ref : catalog_refs()) {
        auto S = catalog(ref);
        if (S->nilpotency_class() != 2) continue;
        std::vector<Coords> span;
        for (const auto& [ij, w] : S->table()) span.push_back(w);
        std::vector<Coords> indep = span;
        linalg::echelon(indep);
        std::mt19937_64 rng(10);
        for (int i = 0; i < 50; ++i) {
            auto c = commutator(sample_element(S, rng), sample_element(S, rng));
            EXPECT_TRUE(linalg::solve_in_span(indep, c.coords()).has_value()) << ref;
        }
    }
}

// --- reduce_mod_lattice -----------------------------------------------------------

TEST(Reduce, Examples)
{
    auto H = catalog("heisenberg");
    auto r1 = reduce_mod_lattice(el(H, {q(5, 4), q(0), q(0)}));
    EXPECT_EQ(r1.reduced, el(H, {q(1, 4), q(0), q(0)}));
    auto r2 = reduce_mod_lattice(el(H, {q(8, 7), q(12, 5), q(-96, 35)}));
    EXPECT_EQ(r2.reduced, el(H, {q(1, 7), q(2, 5), q(-12, 35)}));
    EXPECT_EQ(r2.reduced[2], signed_frac(-signed_frac(q(8, 7)) * q(12, 5)));
    auto x = el(H, {q(1, 3), q(-1, 5), q(1, 2)});
    auto r3 = reduce_mod_lattice(x);
    EXPECT_EQ(r3.reduced, x);
    EXPECT_TRUE(r3.gamma.is_identity());
}

TEST(Reduce, IsCosetReduction)
{
    for (const auto& ref : catalog_refs()) {
        auto S = catalog(ref);
        std::mt19937_64 rng(12);
        for (int i = 0; i < 50; ++i) {
            auto x = sample_element(S, rng, 6, 7);
            auto r = reduce_mod_lattice(x);
            EXPECT_EQ(mul(r.reduced, r.gamma), x) << ref;
            EXPECT_TRUE(r.gamma.is_integral()) << ref;
            EXPECT_TRUE(in_fundamental_domain(r.reduced)) << ref;
            auto again = reduce_mod_lattice(r.reduced);
            EXPECT_EQ(again.reduced, r.reduced);
            EXPECT_TRUE(again.gamma.is_identity());
            // Invariance under the lattice.
            auto g = sample_element(S, rng, 3, 1);
            EXPECT_EQ(reduce_mod_lattice(mul(x, g)).reduced, r.reduced) << ref;
        }
    }
}

// --- verify_schema ------------------------------------------------------------------

TEST(VerifySchema, CatalogPasses)
{
    for (const auto& ref : catalog_refs()) {
        auto rep = verify_schema(catalog(ref));
        EXPECT_TRUE(rep.pass) << ref << ": " << rep.axiom << " " << rep.detail;
        EXPECT_GT(rep.checks, 400);
    }
}

TEST(VerifySchema, MisplacedCommutatorIsReported)
{
    SchemaDef def = heisenberg_def();
    def.name = "heisenberg-bad";
    def.filtration = {{FiltIndex::degree(0), {0, 1, 2}}, {FiltIndex::degree(1), {0, 1, 2}}};
    auto rep = verify_schema(make_schema(def));
    ASSERT_FALSE(rep.pass);
    EXPECT_EQ(rep.axiom, "filtration-inclusion");
    EXPECT_EQ(rep.witness, (std::vector<std::string>{"e1", "e2"}));
}

TEST(VerifySchema, BrokenNestingAndLattice)
{
    SchemaDef def = heisenberg_def();
    def.filtration = {{FiltIndex::degree(0), {0, 1, 2}}, {FiltIndex::degree(1), {0, 2}}, {FiltIndex::degree(2), {1, 2}}};
    auto rep = verify_schema(make_schema(def));
    ASSERT_FALSE(rep.pass);
    EXPECT_EQ(rep.axiom, "nesting");

    SchemaDef half = heisenberg_def();
    half.commutators[{0, 1}] = Coords{q(0), q(0), q(1, 2)};
    auto rep2 = verify_schema(make_schema(half));
    ASSERT_FALSE(rep2.pass);
    EXPECT_EQ(rep2.axiom, "lattice-closure");
}

TEST(VerifySchema, TorusAnyDegree)
{
    for (int d = 0; d <= 4; ++d) EXPECT_TRUE(verify_schema(make_schema(torus_def(3, d))).pass);
}

TEST(MakeSchema, RejectsMalformedTables)
{
    SchemaDef bad = heisenberg_def();
    bad.commutators[{1, 2}] = Coords{q(1), q(0), q(0)};
    EXPECT_THROW(make_schema(bad), std::invalid_argument);

    // Free 5-step algebra on two generators is beyond the class cap.
    SchemaDef deep;
    deep.name = "deep";
    deep.basis = {"x", "y", "a", "b", "c", "d"};
    auto w = [](int k) {
        Coords v(6);
        v[static_cast<std::size_t>(k)] = 1;
        return v;
    };
    deep.commutators[{0, 1}] = w(2);
    deep.commutators[{0, 2}] = w(3);
    deep.commutators[{0, 3}] = w(4);
    deep.commutators[{0, 4}] = w(5);
    deep.filtration = {{FiltIndex::degree(0), {0, 1, 2, 3, 4, 5}}};
    EXPECT_THROW(make_schema(deep), std::invalid_argument);
}

// --- catalog ----------------------------------------------------------------------

TEST(Catalog, Heisenberg)
{
    auto H = catalog("heisenberg");
    EXPECT_EQ(H->dim(), 3);
    EXPECT_EQ(H->nilpotency_class(), 2);
    EXPECT_EQ(H->top_index(), FiltIndex::degree(2));
    EXPECT_EQ(H->horizontal_positions(), (std::vector<int>{0, 1}));
}

TEST(Catalog, AppCRelations)
{
    auto A = catalog("appC_multidegree");
    EXPECT_EQ(A->dim(), 7);
    const int a1 = A->position("a1"), a2 = A->position("a2"), b1 = A->position("b1"), b2 = A->position("b2"),
              c12 = A->position("c12");
    auto e = [&](int k) { return GroupElement::basis(A, k); };
    EXPECT_EQ(commutator(e(a1), e(b2)), e(c12));
    EXPECT_EQ(commutator(e(a2), e(b1)), GroupElement::basis(A, c12, q(-1)));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if ((i == a1 && j == b2) || (i == b2 && j == a1) || (i == a2 && j == b1) || (i == b1 && j == a2)) continue;
            EXPECT_TRUE(commutator(e(i), e(j)).is_identity()) << i << " " << j;
        }
    EXPECT_EQ(A->top_index(), FiltIndex::multi({1, 1}));
}

TEST(Catalog, TorusFiltration)
{
    for (int d = 1; d <= 4; ++d) {
        auto T = catalog("torus(1," + std::to_string(d) + ")");
        EXPECT_EQ(T->dim(), 1);
        for (int i = 0; i <= d; ++i) EXPECT_EQ(T->positions(FiltIndex::degree(i)).size(), 1u);
        EXPECT_TRUE(T->positions(FiltIndex::degree(d + 1)).empty());
    }
}

TEST(Catalog, UniversalMatchesKnownGroups)
{
    // G^{(2,0)} of degree-rank (2,2) is the Heisenberg group.
    auto U = catalog("universal([2],(2,2))");
    EXPECT_EQ(U->dim(), 3);
    EXPECT_EQ(U->table().size(), 1u);
    // Dropping the rank to (2,1) kills the commutator.
    EXPECT_EQ(catalog("universal([2],(2,1))")->dim(), 2);
    EXPECT_EQ(catalog("universal([2],(2,1))")->nilpotency_class(), 1);
    // G^{(1,1)} of degree-rank (3,2) matches the Example filtration on Heisenberg,
    // with the degree-2 generator playing e1.
    auto V = catalog("universal([1,1],(3,2))");
    auto H32 = catalog("heisenberg_degrank32");
    ASSERT_EQ(V->dim(), 3);
    for (const auto& [idx, pos] : H32->filtration()) EXPECT_EQ(V->positions(idx).size(), pos.size()) << idx.str();
    // free 3-step on 2 generators has dimension 5, free 4-step has 8
    EXPECT_EQ(catalog("universal([2],(3,3))")->dim(), 5);
    EXPECT_EQ(catalog("universal([2],(3,3))")->nilpotency_class(), 3);
    EXPECT_EQ(catalog("universal([2],(4,4))")->dim(), 8);
    EXPECT_EQ(catalog("universal([2],(4,4))")->nilpotency_class(), 4);
    // rank (3,2) removes the triple commutators of degree-1 generators
    EXPECT_EQ(catalog("universal([2],(3,2))")->dim(), 3);
    EXPECT_THROW(catalog("universal([4],(4,4))"), std::invalid_argument);
}

TEST(Catalog, ProductAndErrors)
{
    auto P = catalog("product(heisenberg,torus(1,2))");
    EXPECT_EQ(P->dim(), 4);
    EXPECT_EQ(P->positions(FiltIndex::degree(2)).size(), 2u);
    EXPECT_EQ(catalog("product(heisenberg,heisenberg)")->basis()[0], "e1.1");
    EXPECT_THROW(catalog("klein"), std::invalid_argument);
    EXPECT_THROW(catalog("torus(2)"), std::invalid_argument);
    EXPECT_THROW(catalog("product(heisenberg,appC_multidegree)"), std::invalid_argument);
    EXPECT_THROW(catalog("free2step(5)"), std::invalid_argument);
}

TEST(Catalog, DegreeRankRefinementOfHeisenberg)
{
    auto R = as_degree_rank(catalog("heisenberg"));
    EXPECT_EQ(R->positions(FiltIndex::degree_rank(1, 1)).size(), 3u);
    EXPECT_EQ(R->positions(FiltIndex::degree_rank(1, 2)), (std::vector<int>{2}));
    EXPECT_EQ(R->positions(FiltIndex::degree_rank(2, 2)), (std::vector<int>{2}));
    EXPECT_TRUE(R->positions(FiltIndex::degree_rank(3, 0)).empty());
    EXPECT_TRUE(verify_schema(R).pass);
}
