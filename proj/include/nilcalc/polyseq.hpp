#pragma once

// Polynomial maps Z^k -> G held in Taylor form
//   g(n) = prod_{j in J} g_j^{binom(n, j)},
// the product taken in graded order on J (total degree ascending, then
// lexicographically descending), so g_0 is the leftmost factor.
//
// The coefficient g_j lives in G_{idx(j)} where idx maps a multi-index to the
// schema's index set: |j| for degree, (|j|, 0) for degree-rank, j itself for
// multidegree (then k equals the index arity).

#include "nilcalc/catalog.hpp"
#include "nilcalc/nilgroup.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilcalc {

using MultiIndex = std::vector<int>;
using Point = std::vector<long>;

inline std::string point_str(const Point& n)
{
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < n.size(); ++i) os << (i ? "," : "") << n[i];
    os << ")";
    return os.str();
}

/// binom(n_1, j_1) ... binom(n_k, j_k) for arbitrary integers n_i.
inline mpz_class binom(const Point& n, const MultiIndex& j)
{
    mpz_class out = 1, b, base;
    for (std::size_t i = 0; i < n.size(); ++i) {
        base = n[i];
        mpz_bin_ui(b.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(j[i]));
        out *= b;
        if (out == 0) break;
    }
    return out;
}

inline bool graded_less(const MultiIndex& a, const MultiIndex& b)
{
    int sa = 0, sb = 0;
    for (int x : a) sa += x;
    for (int x : b) sb += x;
    if (sa != sb) return sa < sb;
    return a > b;
}

inline bool multi_leq(const MultiIndex& a, const MultiIndex& b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

/// Filtration index of the coefficient slot j.
inline FiltIndex slot_index(const NilSchema& s, const MultiIndex& j)
{
    int t = 0;
    for (int x : j) t += x;
    switch (s.kind()) {
    case FiltKind::degree: return FiltIndex::degree(t);
    case FiltKind::degree_rank: return FiltIndex::degree_rank(t, 0);
    case FiltKind::multidegree: return FiltIndex::multi(j);
    }
    return FiltIndex::degree(t);
}

inline void check_domain(const NilSchema& s, int k)
{
    if (k < 1) throw std::invalid_argument("polyseq: domain dimension must be positive");
    if (s.kind() == FiltKind::multidegree && k != s.index_arity())
        throw std::invalid_argument("polyseq: multidegree schema " + s.name() + " needs domain dimension " +
                                    std::to_string(s.index_arity()));
}

/// The largest sensible J: every j whose slot group is nontrivial.
inline std::vector<MultiIndex> default_J(const SchemaPtr& s, int k)
{
    check_domain(*s, k);
    int bound = 0;
    for (const auto& [idx, pos] : s->filtration())
        if (!pos.empty()) bound = std::max(bound, idx.total());
    std::vector<MultiIndex> out;
    MultiIndex j(static_cast<std::size_t>(k), 0);
    for (;;) {
        int t = 0;
        for (int x : j) t += x;
        if (t <= bound && (t == 0 || !s->positions(slot_index(*s, j)).empty())) out.push_back(j);
        std::size_t a = 0;
        while (a < j.size() && ++j[a] > bound) j[a++] = 0;
        if (a == j.size()) break;
    }
    std::sort(out.begin(), out.end(), graded_less);
    return out;
}

class PolySeq {
public:
    using Coeffs = std::vector<std::pair<MultiIndex, GroupElement>>;

    /// Validating constructor: J (the keys) must be a downset containing 0 and
    /// every g_j must lie in G_{idx(j)}.
    static PolySeq make(SchemaPtr s, int k, Coeffs coeffs)
    {
        PolySeq g = unchecked(std::move(s), k, std::move(coeffs));
        for (const auto& [j, x] : g.c_)
            if (!g.s_->in_subgroup(x.coords(), slot_index(*g.s_, j)))
                throw std::invalid_argument("polyseq: coefficient " + point_str(Point(j.begin(), j.end())) + " = " +
                                            x.str() + " is not in G_" + slot_index(*g.s_, j).str());
        return g;
    }

    /// Only the shape of J is checked; coefficients may leave their slots.
    static PolySeq unchecked(SchemaPtr s, int k, Coeffs coeffs)
    {
        if (!s) throw std::invalid_argument("polyseq: null schema");
        check_domain(*s, k);
        PolySeq g;
        g.s_ = std::move(s);
        g.k_ = k;
        std::sort(coeffs.begin(), coeffs.end(), [](const auto& a, const auto& b) { return graded_less(a.first, b.first); });
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const auto& [j, x] = coeffs[i];
            if (static_cast<int>(j.size()) != k) throw std::invalid_argument("polyseq: multi-index of wrong length");
            for (int v : j)
                if (v < 0) throw std::invalid_argument("polyseq: negative multi-index");
            if (x.schema() != g.s_) throw std::invalid_argument("polyseq: coefficient on a different schema");
            if (i && coeffs[i - 1].first == j) throw std::invalid_argument("polyseq: repeated multi-index");
        }
        g.c_ = std::move(coeffs);
        if (g.c_.empty() || g.c_.front().first != MultiIndex(static_cast<std::size_t>(k), 0))
            throw std::invalid_argument("polyseq: J must contain 0");
        for (const auto& [j, x] : g.c_)
            for (std::size_t a = 0; a < j.size(); ++a) {
                if (j[a] == 0) continue;
                MultiIndex d = j;
                --d[a];
                if (!g.has(d)) throw std::invalid_argument("polyseq: J is not a downset");
            }
        return g;
    }

    static PolySeq constant(const GroupElement& x, int k)
    {
        return make(x.schema(), k, {{MultiIndex(static_cast<std::size_t>(k), 0), x}});
    }

    static PolySeq identity(const SchemaPtr& s, int k) { return constant(GroupElement::identity(s), k); }

    const SchemaPtr& schema() const { return s_; }
    int domain_dim() const { return k_; }
    const Coeffs& coeffs() const { return c_; }

    std::vector<MultiIndex> J() const
    {
        std::vector<MultiIndex> out;
        for (const auto& [j, x] : c_) out.push_back(j);
        return out;
    }

    bool has(const MultiIndex& j) const
    {
        for (const auto& [i, x] : c_)
            if (i == j) return true;
        return false;
    }

    GroupElement coeff(const MultiIndex& j) const
    {
        for (const auto& [i, x] : c_)
            if (i == j) return x;
        return GroupElement::identity(s_);
    }

    /// Largest component of any j in J.
    int max_component() const
    {
        int d = 0;
        for (const auto& [j, x] : c_)
            for (int v : j) d = std::max(d, v);
        return d;
    }

    GroupElement operator()(const Point& n) const
    {
        if (static_cast<int>(n.size()) != k_) throw std::invalid_argument("polyseq: evaluation point of wrong length");
        GroupElement out = GroupElement::identity(s_);
        for (const auto& [j, x] : c_) {
            mpz_class b = binom(n, j);
            if (b == 0 || x.is_identity()) continue;
            out = mul(out, power(x, Rational(b)));
        }
        return out;
    }

    /// Same map: coefficients agree, absent slots counting as the identity.
    friend bool operator==(const PolySeq& a, const PolySeq& b)
    {
        if (a.s_ != b.s_ || a.k_ != b.k_) return false;
        for (const auto& [j, x] : a.c_)
            if (!(x == b.coeff(j))) return false;
        for (const auto& [j, x] : b.c_)
            if (!(x == a.coeff(j))) return false;
        return true;
    }

    std::string str() const
    {
        std::ostringstream os;
        os << s_->name() << " k=" << k_;
        for (const auto& [j, x] : c_) os << " g" << point_str(Point(j.begin(), j.end())) << "=" << x.str();
        return os.str();
    }

private:
    PolySeq() = default;
    SchemaPtr s_;
    int k_ = 1;
    Coeffs c_;
};

inline GroupElement eval(const PolySeq& g, const Point& n) { return g(n); }

/// Raised when samples admit no Taylor form on the requested J.
class TaylorFitError : public std::runtime_error {
public:
    TaylorFitError(Point n, const std::string& what) : std::runtime_error(what), point(std::move(n)) {}
    Point point;
};

/// Grid {0..d}^k.
inline std::vector<Point> box_grid(int k, int d)
{
    std::vector<Point> out;
    Point n(static_cast<std::size_t>(k), 0);
    for (;;) {
        out.push_back(n);
        std::size_t a = 0;
        while (a < n.size() && ++n[a] > d) n[a++] = 0;
        if (a == n.size()) break;
    }
    return out;
}

/// Solves for the Taylor coefficients slot by slot in graded order, then
/// checks every supplied sample against the fitted form.
inline PolySeq taylor_extract(const std::map<Point, GroupElement>& samples, const SchemaPtr& s, std::vector<MultiIndex> J,
                              bool require_membership = true)
{
    if (J.empty()) throw std::invalid_argument("taylor_extract: empty J");
    const int k = static_cast<int>(J.front().size());
    std::sort(J.begin(), J.end(), graded_less);
    PolySeq::Coeffs found;
    for (const auto& j : J) {
        Point n(j.begin(), j.end());
        auto it = samples.find(n);
        if (it == samples.end()) throw std::invalid_argument("taylor_extract: missing sample at " + point_str(n));
        GroupElement prefix = GroupElement::identity(s);
        for (const auto& [i, x] : found) {
            mpz_class b = binom(n, i);
            if (b != 0) prefix = mul(prefix, power(x, Rational(b)));
        }
        found.emplace_back(j, mul(inverse(prefix), it->second));
    }
    PolySeq g = require_membership ? PolySeq::make(s, k, found) : PolySeq::unchecked(s, k, found);
    for (const auto& [n, x] : samples)
        if (!(g(n) == x))
            throw TaylorFitError(n, "taylor_extract: no Taylor form on J fits the sample at " + point_str(n) + ": expected " +
                                        x.str() + ", fitted " + g(n).str());
    return g;
}

namespace polyseq_detail {

inline std::vector<MultiIndex> merged_J(std::initializer_list<const PolySeq*> gs)
{
    const PolySeq& g0 = **gs.begin();
    std::vector<MultiIndex> J = default_J(g0.schema(), g0.domain_dim());
    for (const PolySeq* g : gs)
        for (const auto& j : g->J())
            if (std::find(J.begin(), J.end(), j) == J.end()) J.push_back(j);
    return J;
}

inline int grid_extent(const std::vector<MultiIndex>& J)
{
    int d = 0;
    for (const auto& j : J)
        for (int v : j) d = std::max(d, v);
    return d;
}

template <class F>
PolySeq fit(const SchemaPtr& s, int k, const std::vector<MultiIndex>& J, F&& f, bool require_membership)
{
    std::map<Point, GroupElement> samples;
    for (const auto& n : box_grid(k, grid_extent(J))) samples.emplace(n, f(n));
    return taylor_extract(samples, s, J, require_membership);
}

inline Point add(Point a, const Point& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

} // namespace polyseq_detail

/// n -> g(n+h) g(n)^{-1}. Membership of the result is checked only when the
/// input itself satisfies it.
inline PolySeq derivative(const PolySeq& g, const Point& h)
{
    if (static_cast<int>(h.size()) != g.domain_dim()) throw std::invalid_argument("derivative: shift of wrong length");
    auto J = polyseq_detail::merged_J({&g});
    return polyseq_detail::fit(
        g.schema(), g.domain_dim(), J, [&](const Point& n) { return mul(g(polyseq_detail::add(n, h)), inverse(g(n))); }, false);
}

/// n -> g(n+h).
inline PolySeq shifted(const PolySeq& g, const Point& h)
{
    if (static_cast<int>(h.size()) != g.domain_dim()) throw std::invalid_argument("shifted: shift of wrong length");
    auto J = polyseq_detail::merged_J({&g});
    return polyseq_detail::fit(g.schema(), g.domain_dim(), J, [&](const Point& n) { return g(polyseq_detail::add(n, h)); }, false);
}

inline PolySeq pointwise_product(const PolySeq& a, const PolySeq& b)
{
    if (a.schema() != b.schema() || a.domain_dim() != b.domain_dim())
        throw std::invalid_argument("pointwise_product: sequences on different schemas or domains");
    auto J = polyseq_detail::merged_J({&a, &b});
    return polyseq_detail::fit(a.schema(), a.domain_dim(), J, [&](const Point& n) { return mul(a(n), b(n)); }, false);
}

inline PolySeq pointwise_inverse(const PolySeq& g)
{
    auto J = polyseq_detail::merged_J({&g});
    return polyseq_detail::fit(g.schema(), g.domain_dim(), J, [&](const Point& n) { return inverse(g(n)); }, false);
}

/// The Taylor form through the samples of f on {0..d}^k, d the largest index in default_J.
template <class F>
PolySeq fit_orbit(const SchemaPtr& s, int k, F&& f)
{
    return polyseq_detail::fit(s, k, default_J(s, k), std::forward<F>(f), true);
}

/// Random Taylor form over default_J with each g_j drawn from its slot group.
inline PolySeq sample_polyseq(const SchemaPtr& s, int k, std::mt19937_64& rng, long bound = 2, long max_den = 4)
{
    PolySeq::Coeffs c;
    for (const auto& j : default_J(s, k)) {
        const auto& pos = s->positions(slot_index(*s, j));
        c.emplace_back(j, pos.empty() ? GroupElement::identity(s) : sample_element(s, rng, bound, max_den, pos));
    }
    return PolySeq::make(s, k, std::move(c));
}

// ---------------------------------------------------------------------------
// Polynomiality
// ---------------------------------------------------------------------------

/// Evaluation cache plus pointwise iterated derivatives.
class DerivativeProbe {
public:
    explicit DerivativeProbe(const PolySeq& g) : g_(g) {}

    const GroupElement& at(const Point& n)
    {
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(n, g_(n)).first->second;
    }

    /// d_{h_1} ... d_{h_m} g (n), peeling the last shift first.
    GroupElement iterated(const Point& n, const std::vector<Point>& hs, std::size_t m)
    {
        if (m == 0) return at(n);
        GroupElement a = iterated(polyseq_detail::add(n, hs[m - 1]), hs, m - 1);
        GroupElement b = iterated(n, hs, m - 1);
        return mul(a, inverse(b));
    }

private:
    const PolySeq& g_;
    std::map<Point, GroupElement> cache_;
};

struct PolyReport {
    bool pass = true;
    int order = 0;
    std::vector<Point> shifts;
    Point base;
    std::string value;
    std::string index;
    long checks = 0;

    std::string str() const
    {
        if (pass) return "pass (" + std::to_string(checks) + " checks)";
        std::string hs;
        for (const auto& h : shifts) hs += (hs.empty() ? "" : " ") + point_str(h);
        return "fail at order " + std::to_string(order) + ", n=" + point_str(base) + ", h=[" + hs + "]: value " + value +
               " not in G_" + index;
    }
};

/// Checks d_{h_1}...d_{h_m} g(n) in G_{i_1+...+i_m} for m <= max_order. A shift
/// has index 1 ((1,0) for degree-rank); for multidegree schemas shifts run
/// along coordinate axes t e_a and carry index e_a. Base points are 0 and
/// one sampled point. Exhaustive over shifts when k*m <= 6, else 500 samples.
inline PolyReport verify_polynomial(const PolySeq& g, int max_order, long h_range, std::uint64_t seed = 7)
{
    const NilSchema& s = *g.schema();
    const int k = g.domain_dim();
    int bound = 0;
    for (const auto& [idx, pos] : s.filtration())
        if (!pos.empty()) bound = std::max(bound, idx.total());
    if (max_order > bound + 1 || max_order < 0)
        throw std::invalid_argument("verify_polynomial: max_order must lie in [0, " + std::to_string(bound + 1) + "]");
    if (h_range < 0) throw std::invalid_argument("verify_polynomial: negative h_range");

    const bool multi = s.kind() == FiltKind::multidegree;
    const long width = 2 * h_range + 1;
    // Choices for a single shift: a full vector, or an (axis, scalar) pair.
    auto shift_of = [&](long code, int& axis) {
        Point h(static_cast<std::size_t>(k), 0);
        if (multi) {
            axis = static_cast<int>(code / width);
            h[static_cast<std::size_t>(axis)] = code % width - h_range;
        } else {
            axis = -1;
            for (int a = 0; a < k; ++a) {
                h[static_cast<std::size_t>(a)] = code % width - h_range;
                code /= width;
            }
        }
        return h;
    };
    long choices = 1;
    if (multi)
        choices = k * width;
    else
        for (int a = 0; a < k; ++a) choices *= width;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> coord(-h_range - 2, h_range + 2);
    std::vector<Point> bases{Point(static_cast<std::size_t>(k), 0)};
    Point extra(static_cast<std::size_t>(k));
    for (auto& x : extra) x = coord(rng);
    bases.push_back(extra);

    DerivativeProbe probe(g);
    PolyReport rep;
    auto check = [&](const std::vector<Point>& hs, const std::vector<int>& axes, const Point& n) {
        FiltIndex idx = FiltIndex::zero(s.kind(), s.index_arity());
        for (int l = 0; l < static_cast<int>(hs.size()); ++l) {
            if (multi) {
                MultiIndex e(static_cast<std::size_t>(k), 0);
                e[static_cast<std::size_t>(axes[static_cast<std::size_t>(l)])] = 1;
                idx = idx + FiltIndex::multi(e);
            } else {
                idx = idx + (s.kind() == FiltKind::degree ? FiltIndex::degree(1) : FiltIndex::degree_rank(1, 0));
            }
        }
        GroupElement v = probe.iterated(n, hs, hs.size());
        ++rep.checks;
        if (s.in_subgroup(v.coords(), idx)) return true;
        rep.pass = false;
        rep.order = static_cast<int>(hs.size());
        rep.shifts = hs;
        rep.base = n;
        rep.value = v.str();
        rep.index = idx.normalized().str();
        return false;
    };

    for (int m = 0; m <= max_order; ++m) {
        std::vector<Point> hs(static_cast<std::size_t>(m));
        std::vector<int> axes(static_cast<std::size_t>(m));
        auto run = [&](const std::vector<long>& codes) {
            for (int l = 0; l < m; ++l) hs[static_cast<std::size_t>(l)] = shift_of(codes[static_cast<std::size_t>(l)], axes[static_cast<std::size_t>(l)]);
            for (const auto& n : bases)
                if (!check(hs, axes, n)) return false;
            return true;
        };
        std::vector<long> codes(static_cast<std::size_t>(m), 0);
        if (k * m <= 6) {
            for (;;) {
                if (!run(codes)) return rep;
                std::size_t a = 0;
                while (a < codes.size() && ++codes[a] == choices) codes[a++] = 0;
                if (a == codes.size()) break;
            }
        } else {
            std::uniform_int_distribution<long> pick(0, choices - 1);
            for (int t = 0; t < 500; ++t) {
                for (auto& c : codes) c = pick(rng);
                if (!run(codes)) return rep;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Host-Kra cubes
// ---------------------------------------------------------------------------

/// Vertices indexed by the bitmask of omega: bit l-1 set iff l in omega.
struct Cube {
    std::vector<FiltIndex> degrees;
    std::vector<GroupElement> vertices;

    int order() const { return static_cast<int>(degrees.size()); }

    void validate() const
    {
        if (degrees.size() > 20) throw std::invalid_argument("cube: order too large");
        if (vertices.size() != (std::size_t{1} << degrees.size()))
            throw std::invalid_argument("cube: expected " + std::to_string(std::size_t{1} << degrees.size()) + " vertices, got " +
                                        std::to_string(vertices.size()));
        for (const auto& v : vertices)
            if (v.schema() != vertices.front().schema()) throw std::invalid_argument("cube: vertices on different schemas");
    }
};

/// iota_{omega_0}(element): element on every vertex containing omega_0.
struct HKGenerator {
    unsigned mask = 0;
    GroupElement element;
};

struct HKResult {
    bool member = false;
    std::vector<HKGenerator> certificate;
    std::string detail;
};

namespace polyseq_detail {

// Member of HK^{degrees[0..m)} for the filtration shifted by `shift`.
inline std::optional<std::vector<HKGenerator>> hk_rec(const std::vector<GroupElement>& v, const std::vector<FiltIndex>& degrees,
                                                      std::size_t m, const FiltIndex& shift, std::string& detail)
{
    const NilSchema& s = *v.front().schema();
    if (m == 0) {
        if (!s.in_subgroup(v.front().coords(), shift)) {
            detail = "face element " + v.front().str() + " is not in G_" + shift.normalized().str();
            return std::nullopt;
        }
        std::vector<HKGenerator> out;
        if (!v.front().is_identity()) out.push_back({0u, v.front()});
        return out;
    }
    const std::size_t half = std::size_t{1} << (m - 1);
    std::vector<GroupElement> front(v.begin(), v.begin() + static_cast<long>(half));
    std::vector<GroupElement> diff;
    for (std::size_t w = 0; w < half; ++w) diff.push_back(mul(v[half + w], inverse(front[w])));
    auto a = hk_rec(front, degrees, m - 1, shift, detail);
    if (!a) return std::nullopt;
    auto b = hk_rec(diff, degrees, m - 1, shift + degrees[m - 1], detail);
    if (!b) return std::nullopt;
    // (front, diff * front) = (id, diff) * (front, front)
    std::vector<HKGenerator> out;
    for (auto& gen : *b) out.push_back({gen.mask | static_cast<unsigned>(half), gen.element});
    for (auto& gen : *a) out.push_back(gen);
    return out;
}

} // namespace polyseq_detail

/// Recursive face splitting: the cube is a member iff its front face is, and
/// the difference face (back * front^{-1}) is a member for the filtration
/// shifted by the last degree.
inline HKResult hk_membership(const Cube& c)
{
    c.validate();
    const NilSchema& s = *c.vertices.front().schema();
    HKResult r;
    auto cert = polyseq_detail::hk_rec(c.vertices, c.degrees, c.degrees.size(), FiltIndex::zero(s.kind(), s.index_arity()), r.detail);
    if (cert) {
        r.member = true;
        r.certificate = std::move(*cert);
    }
    return r;
}

/// Recomputes the cube from the generators and checks each generator's
/// membership in G_{sum of degrees over its mask}.
inline bool check_certificate(const Cube& c, const std::vector<HKGenerator>& cert)
{
    c.validate();
    const SchemaPtr& s = c.vertices.front().schema();
    std::vector<GroupElement> acc(c.vertices.size(), GroupElement::identity(s));
    for (const auto& gen : cert) {
        if (gen.mask >= c.vertices.size()) return false;
        FiltIndex idx = FiltIndex::zero(s->kind(), s->index_arity());
        for (std::size_t l = 0; l < c.degrees.size(); ++l)
            if (gen.mask >> l & 1u) idx = idx + c.degrees[l];
        if (!s->in_subgroup(gen.element.coords(), idx)) return false;
        for (std::size_t w = 0; w < acc.size(); ++w)
            if ((w & gen.mask) == gen.mask) acc[w] = mul(acc[w], gen.element);
    }
    for (std::size_t w = 0; w < acc.size(); ++w)
        if (!(acc[w] == c.vertices[w])) return false;
    return true;
}

/// A parallelepiped n_0 + sum_{l in omega} h_l in the domain Z^k. Higher
/// generators of the domain cube group vanish because (Z^k)_i is trivial for
/// i >= 2 (and off the axes for multidegree).
struct DomainCube {
    Point base;
    std::vector<Point> sides;
    std::vector<int> axes;  // multidegree only: sides[l] is a multiple of e_{axes[l]}

    Point vertex(std::size_t mask) const
    {
        Point n = base;
        for (std::size_t l = 0; l < sides.size(); ++l)
            if (mask >> l & 1u) n = polyseq_detail::add(n, sides[l]);
        return n;
    }
};

/// Random domain cube of order m built from at most six generators; sides
/// not drawn stay zero.
inline DomainCube sample_domain_cube(const NilSchema& s, int k, int m, long range, std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> val(-range, range);
    std::uniform_int_distribution<int> axis(0, k - 1);
    DomainCube d;
    d.base.assign(static_cast<std::size_t>(k), 0);
    d.sides.assign(static_cast<std::size_t>(m), Point(static_cast<std::size_t>(k), 0));
    d.axes.assign(static_cast<std::size_t>(m), 0);
    for (auto& a : d.axes) a = axis(rng);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_int_distribution<int> which(-1, m - 1);
    int gens = count(rng);
    for (int t = 0; t < gens; ++t) {
        int l = which(rng);
        if (l < 0) {
            for (auto& x : d.base) x += val(rng);
        } else if (s.kind() == FiltKind::multidegree) {
            d.sides[static_cast<std::size_t>(l)][static_cast<std::size_t>(d.axes[static_cast<std::size_t>(l)])] += val(rng);
        } else {
            for (auto& x : d.sides[static_cast<std::size_t>(l)]) x += val(rng);
        }
    }
    return d;
}

/// g applied vertexwise, with each side's filtration index as its degree.
inline Cube image_cube(const PolySeq& g, const DomainCube& d)
{
    const NilSchema& s = *g.schema();
    Cube c;
    for (std::size_t l = 0; l < d.sides.size(); ++l) {
        if (s.kind() == FiltKind::multidegree) {
            MultiIndex e(static_cast<std::size_t>(g.domain_dim()), 0);
            e[static_cast<std::size_t>(d.axes[l])] = 1;
            c.degrees.push_back(FiltIndex::multi(e));
        } else {
            c.degrees.push_back(s.kind() == FiltKind::degree ? FiltIndex::degree(1) : FiltIndex::degree_rank(1, 0));
        }
    }
    for (std::size_t w = 0; w < (std::size_t{1} << d.sides.size()); ++w) c.vertices.push_back(g(d.vertex(w)));
    return c;
}

// ---------------------------------------------------------------------------
// Horizontal Taylor coefficients
// ---------------------------------------------------------------------------

/// Positions spanning G_(i,1) but not G_(i,2) in the degree-rank view.
inline std::vector<int> horizontal_slot(const SchemaPtr& dr, int i)
{
    const auto& p1 = dr->positions(FiltIndex::degree_rank(i, 1));
    const auto& p2 = dr->positions(FiltIndex::degree_rank(i, 2));
    std::vector<int> out;
    for (int p : p1)
        if (!std::binary_search(p2.begin(), p2.end(), p)) out.push_back(p);
    return out;
}

/// i-fold d_1 of g at 0, read on the coordinates of G_(i,1) / G_(i,2), mod 1.
/// Degree-filtered schemas are read through their degree-rank refinement.
inline std::vector<TorusPoint> horizontal_taylor(const PolySeq& g, int i)
{
    if (g.domain_dim() != 1) throw std::invalid_argument("horizontal_taylor: needs a one-dimensional domain");
    if (g.schema()->kind() == FiltKind::multidegree) throw std::invalid_argument("horizontal_taylor: needs a degree or degree-rank filtration");
    if (i < 0) throw std::invalid_argument("horizontal_taylor: negative order");
    int bound = 0;
    for (const auto& [idx, pos] : g.schema()->filtration())
        if (!pos.empty()) bound = std::max(bound, idx.total());
    if (i > bound) throw std::invalid_argument("horizontal_taylor: order " + std::to_string(i) + " exceeds degree " + std::to_string(bound));
    SchemaPtr dr = as_degree_rank(g.schema());
    DerivativeProbe probe(g);
    std::vector<Point> hs(static_cast<std::size_t>(i), Point{1});
    GroupElement x = probe.iterated(Point{0}, hs, hs.size());
    std::vector<TorusPoint> out;
    for (int p : horizontal_slot(dr, i)) out.emplace_back(x[p]);
    return out;
}

} // namespace nilcalc
