#pragma once

// Filtered nilpotent Lie groups in coordinates of the second kind.
//
// A point of G is e_0^{t_0} ... e_{m-1}^{t_{m-1}} with exact rational t_k.
// The lattice is the integer-coordinate subgroup. Multiplication goes through
// the triangular Lie algebra u_k = log e_k; class-2 schemas use the closed
// collection formula instead, and the two routes are cross-checked in tests.

#include "nilcalc/lie.hpp"
#include "nilcalc/scalar.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilcalc {

// ---------------------------------------------------------------------------
// Filtration indices
// ---------------------------------------------------------------------------

enum class FiltKind { degree, degree_rank, multidegree };

inline std::string to_string(FiltKind k)
{
    switch (k) {
    case FiltKind::degree: return "degree";
    case FiltKind::degree_rank: return "degree-rank";
    case FiltKind::multidegree: return "multidegree";
    }
    return "?";
}

struct FiltIndex {
    FiltKind kind = FiltKind::degree;
    std::vector<int> v{0};

    static FiltIndex degree(int d) { return {FiltKind::degree, {d}}; }
    static FiltIndex degree_rank(int d, int r) { return {FiltKind::degree_rank, {d, r}}; }
    static FiltIndex multi(std::vector<int> j) { return {FiltKind::multidegree, std::move(j)}; }
    static FiltIndex zero(FiltKind kind, int arity)
    {
        return {kind, std::vector<int>(static_cast<std::size_t>(kind == FiltKind::degree ? 1 : kind == FiltKind::degree_rank ? 2 : arity), 0)};
    }

    int total() const
    {
        if (kind == FiltKind::degree_rank) return v[0];
        int s = 0;
        for (int x : v) s += x;
        return s;
    }

    /// Degree-rank lookups send (d, r) with r > d to (d + 1, 0).
    FiltIndex normalized() const
    {
        if (kind == FiltKind::degree_rank && v[1] > v[0]) return degree_rank(v[0] + 1, 0);
        return *this;
    }

    std::string str() const
    {
        std::ostringstream os;
        if (kind == FiltKind::degree) {
            os << v[0];
            return os.str();
        }
        os << (kind == FiltKind::degree_rank ? "(" : "[");
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << (kind == FiltKind::degree_rank ? ")" : "]");
        return os.str();
    }

    /// Accepts "2", "(3,2)" and "[1,0]".
    static FiltIndex parse(const std::string& text)
    {
        std::string s;
        for (char c : text)
            if (c != ' ') s.push_back(c);
        if (s.empty()) throw std::invalid_argument("FiltIndex: empty");
        auto parse_list = [&](const std::string& inner) {
            std::vector<int> out;
            std::stringstream ss(inner);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (item.empty()) throw std::invalid_argument("FiltIndex: malformed '" + text + "'");
                out.push_back(std::stoi(item));
            }
            return out;
        };
        FiltIndex out;
        if (s.front() == '(' && s.back() == ')') {
            out = {FiltKind::degree_rank, parse_list(s.substr(1, s.size() - 2))};
            if (out.v.size() != 2) throw std::invalid_argument("FiltIndex: degree-rank needs two entries: '" + text + "'");
            if (out.v[1] > out.v[0]) throw std::invalid_argument("FiltIndex: degree-rank needs r <= d: '" + text + "'");
        } else if (s.front() == '[' && s.back() == ']') {
            out = {FiltKind::multidegree, parse_list(s.substr(1, s.size() - 2))};
            if (out.v.empty()) throw std::invalid_argument("FiltIndex: empty multidegree");
        } else {
            std::size_t used = 0;
            int d = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument("FiltIndex: malformed '" + text + "'");
            out = degree(d);
        }
        for (int x : out.v)
            if (x < 0) throw std::invalid_argument("FiltIndex: negative entry in '" + text + "'");
        return out;
    }

    friend FiltIndex operator+(const FiltIndex& a, const FiltIndex& b)
    {
        if (a.kind != b.kind || a.v.size() != b.v.size()) throw std::invalid_argument("FiltIndex: adding indices of different kinds");
        FiltIndex out = a;
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
        return out;
    }
    friend bool operator==(const FiltIndex&, const FiltIndex&) = default;
    // Storage order only; see filt_leq for the filtration order.
    friend bool operator<(const FiltIndex& a, const FiltIndex& b)
    {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.v < b.v;
    }
};

/// The filtration order: numeric, lexicographic, or product order.
inline bool filt_leq(const FiltIndex& a, const FiltIndex& b)
{
    if (a.kind != b.kind || a.v.size() != b.v.size()) return false;
    if (a.kind == FiltKind::multidegree) {
        for (std::size_t i = 0; i < a.v.size(); ++i)
            if (a.v[i] > b.v[i]) return false;
        return true;
    }
    return a.v <= b.v;
}

// ---------------------------------------------------------------------------
// Schemas
// ---------------------------------------------------------------------------

using Filtration = std::vector<std::pair<FiltIndex, std::vector<int>>>;

/// Raw input for a schema. commutators holds either group words
/// ([e_i, e_j] in second-kind coordinates) or Lie brackets, keyed by i < j.
struct SchemaDef {
    enum class Table { group_words, lie_brackets };

    std::string name;
    std::vector<std::string> basis;
    std::map<std::pair<int, int>, Coords> commutators;
    Table table = Table::group_words;
    FiltKind kind = FiltKind::degree;
    Filtration filtration;
};

class NilSchema;
using SchemaPtr = std::shared_ptr<const NilSchema>;

SchemaPtr make_schema(const SchemaDef& def);

class NilSchema {
public:
    const std::string& name() const { return name_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<std::string>& basis() const { return basis_; }
    FiltKind kind() const { return kind_; }
    int index_arity() const { return arity_; }
    int nilpotency_class() const { return lie_.nilpotency_class(); }
    const LieAlgebra& lie() const { return lie_; }
    const Filtration& filtration() const { return filtration_; }

    /// [e_i, e_j] for i < j as second-kind coordinates; zero when they commute.
    const Coords& table_word(int i, int j) const
    {
        auto it = table_.find({i, j});
        return it == table_.end() ? zero_ : it->second;
    }
    const std::map<std::pair<int, int>, Coords>& table() const { return table_; }

    int position(const std::string& label) const
    {
        for (int k = 0; k < dim(); ++k)
            if (basis_[k] == label) return k;
        throw std::invalid_argument("schema " + name_ + ": unknown basis label '" + label + "'");
    }

    bool has_index(const FiltIndex& i) const
    {
        FiltIndex n = i.normalized();
        for (const auto& [idx, pos] : filtration_)
            if (idx == n) return true;
        return false;
    }

    /// Positions spanning G_i. Unlisted indices denote the trivial group.
    const std::vector<int>& positions(const FiltIndex& i) const
    {
        if (i.kind != kind_ || static_cast<int>(i.v.size()) != arity_)
            throw std::invalid_argument("schema " + name_ + ": filtration index " + i.str() + " has the wrong kind");
        FiltIndex n = i.normalized();
        for (const auto& [idx, pos] : filtration_)
            if (idx == n) return pos;
        return empty_;
    }

    bool in_subgroup(const Coords& t, const FiltIndex& i) const
    {
        const auto& pos = positions(i);
        for (int k = 0; k < dim(); ++k)
            if (!t[k].is_zero() && !std::binary_search(pos.begin(), pos.end(), k)) return false;
        return true;
    }

    /// Positions outside the support of every commutator word.
    const std::vector<int>& horizontal_positions() const { return horizontal_; }

    /// The largest listed index whose group is nontrivial. For multidegree
    /// filtrations ties are broken by total degree, then lexicographically.
    FiltIndex top_index() const { return top_; }

    bool uses_class2_formula() const { return lie_.nilpotency_class() <= 2; }

private:
    friend SchemaPtr make_schema(const SchemaDef& def);
    NilSchema() = default;

    std::string name_;
    std::vector<std::string> basis_;
    FiltKind kind_ = FiltKind::degree;
    int arity_ = 1;
    Filtration filtration_;
    std::map<std::pair<int, int>, Coords> table_;
    LieAlgebra lie_;
    std::vector<int> horizontal_;
    FiltIndex top_;
    Coords zero_;
    std::vector<int> empty_;
};

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

class GroupElement {
public:
    GroupElement(SchemaPtr s, Coords t) : s_(std::move(s)), t_(std::move(t))
    {
        if (!s_) throw std::invalid_argument("GroupElement: null schema");
        if (static_cast<int>(t_.size()) != s_->dim())
            throw std::invalid_argument("GroupElement: expected " + std::to_string(s_->dim()) + " coordinates, got "
                                        + std::to_string(t_.size()));
    }

    static GroupElement identity(const SchemaPtr& s) { return GroupElement(s, Coords(static_cast<std::size_t>(s->dim()))); }
    static GroupElement basis(const SchemaPtr& s, int k, const Rational& t = Rational(1))
    {
        Coords c(static_cast<std::size_t>(s->dim()));
        c.at(static_cast<std::size_t>(k)) = t;
        return GroupElement(s, std::move(c));
    }

    const SchemaPtr& schema() const { return s_; }
    const Coords& coords() const { return t_; }
    const Rational& operator[](int k) const { return t_[static_cast<std::size_t>(k)]; }
    int dim() const { return static_cast<int>(t_.size()); }

    bool is_identity() const { return linalg::is_zero(t_); }
    bool is_integral() const
    {
        for (const auto& x : t_)
            if (!x.is_integer()) return false;
        return true;
    }
    std::vector<int> support() const
    {
        std::vector<int> out;
        for (int k = 0; k < dim(); ++k)
            if (!t_[k].is_zero()) out.push_back(k);
        return out;
    }

    std::string str() const
    {
        std::string out = "(";
        for (std::size_t k = 0; k < t_.size(); ++k) out += (k ? ", " : "") + t_[k].str();
        return out + ")";
    }

    friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.s_ == b.s_ && a.t_ == b.t_; }

private:
    SchemaPtr s_;
    Coords t_;
};

inline std::ostream& operator<<(std::ostream& os, const GroupElement& g) { return os << g.str(); }

namespace detail {

inline void require_same(const GroupElement& x, const GroupElement& y)
{
    if (x.schema() != y.schema())
        throw std::invalid_argument("schema mismatch: " + x.schema()->name() + " vs " + y.schema()->name());
}

// sum_{i<j} a_j b_i [e_i, e_j]; the class-2 collection correction.
inline Coords class2_cross(const NilSchema& s, const Coords& a, const Coords& b)
{
    Coords out(a.size());
    for (const auto& [ij, w] : s.table()) {
        const auto& [i, j] = ij;
        if (a[j].is_zero() || b[i].is_zero()) continue;
        linalg::axpy(out, a[j] * b[i], w);
    }
    return out;
}

inline Coords mul_lie(const NilSchema& s, const Coords& x, const Coords& y)
{
    const auto& L = s.lie();
    return L.second_kind_of_log(L.bch(L.log_of_second_kind(x), L.log_of_second_kind(y)));
}

inline Coords power_lie(const NilSchema& s, const Coords& x, const Rational& t)
{
    const auto& L = s.lie();
    return L.second_kind_of_log(linalg::scaled(L.log_of_second_kind(x), t));
}

} // namespace detail

inline GroupElement mul(const GroupElement& x, const GroupElement& y)
{
    detail::require_same(x, y);
    const auto& s = *x.schema();
    if (!s.uses_class2_formula()) return GroupElement(x.schema(), detail::mul_lie(s, x.coords(), y.coords()));
    // e_j^a e_i^b = e_i^b e_j^a [e_i, e_j]^{-ab} for i < j, with central words.
    Coords z = x.coords();
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += y.coords()[k];
    linalg::axpy(z, Rational(-1), detail::class2_cross(s, x.coords(), y.coords()));
    return GroupElement(x.schema(), std::move(z));
}

/// The product through BCH regardless of class. Used to cross-check mul.
inline GroupElement mul_via_lie(const GroupElement& x, const GroupElement& y)
{
    detail::require_same(x, y);
    return GroupElement(x.schema(), detail::mul_lie(*x.schema(), x.coords(), y.coords()));
}

/// x^t = exp(t log x), exact for every rational t.
inline GroupElement power(const GroupElement& x, const Rational& t)
{
    const auto& s = *x.schema();
    if (!s.uses_class2_formula()) return GroupElement(x.schema(), detail::power_lie(s, x.coords(), t));
    // t x + (t - t^2)/2 sum_{i<j} x_i x_j [e_i, e_j]
    Coords z = linalg::scaled(x.coords(), t);
    Rational w = (t - t * t) / Rational(2);
    if (!w.is_zero()) linalg::axpy(z, w, detail::class2_cross(s, x.coords(), x.coords()));
    return GroupElement(x.schema(), std::move(z));
}

inline GroupElement power_via_lie(const GroupElement& x, const Rational& t)
{
    return GroupElement(x.schema(), detail::power_lie(*x.schema(), x.coords(), t));
}

inline GroupElement inverse(const GroupElement& x) { return power(x, Rational(-1)); }

/// [x, y] = x^{-1} y^{-1} x y.
inline GroupElement commutator(const GroupElement& x, const GroupElement& y)
{
    detail::require_same(x, y);
    return mul(mul(inverse(x), inverse(y)), mul(x, y));
}

/// Ordered product of a list, left to right.
inline GroupElement product(const std::vector<GroupElement>& xs)
{
    if (xs.empty()) throw std::invalid_argument("product: empty list");
    GroupElement acc = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) acc = mul(acc, xs[i]);
    return acc;
}

struct Reduction {
    GroupElement reduced;
    GroupElement gamma;
};

/// x = reduced * gamma with gamma in the lattice and every coordinate of
/// reduced in I0. Position i is fixed by right-multiplying e_i^{-k_i}, which
/// leaves positions < i untouched.
inline Reduction reduce_mod_lattice(const GroupElement& x)
{
    const SchemaPtr& s = x.schema();
    GroupElement cur = x;
    GroupElement gamma = GroupElement::identity(s);
    std::vector<mpz_class> ks(static_cast<std::size_t>(s->dim()));
    for (int i = 0; i < s->dim(); ++i) {
        mpz_class k = nearest_integer(cur[i]);
        if (k == 0) continue;
        ks[static_cast<std::size_t>(i)] = k;
        cur = mul(cur, GroupElement::basis(s, i, -Rational(k)));
    }
    // gamma = e_{m-1}^{k_{m-1}} ... e_0^{k_0}
    for (int i = s->dim() - 1; i >= 0; --i)
        if (ks[static_cast<std::size_t>(i)] != 0) gamma = mul(gamma, GroupElement::basis(s, i, Rational(ks[static_cast<std::size_t>(i)])));
    return {cur, gamma};
}

inline bool in_fundamental_domain(const GroupElement& x)
{
    for (const auto& t : x.coords())
        if (signed_frac(t) != t) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------------

/// Integer coefficients on the horizontal positions; a homomorphism G -> T
/// killing commutators and the lattice.
class HorizontalChar {
public:
    HorizontalChar(SchemaPtr s, std::vector<long> coeffs) : s_(std::move(s)), c_(std::move(coeffs))
    {
        if (c_.size() != s_->horizontal_positions().size())
            throw std::invalid_argument("HorizontalChar: expected " + std::to_string(s_->horizontal_positions().size())
                                        + " coefficients");
    }
    const SchemaPtr& schema() const { return s_; }
    const std::vector<long>& coeffs() const { return c_; }
    bool trivial() const
    {
        return std::all_of(c_.begin(), c_.end(), [](long v) { return v == 0; });
    }
    long height() const
    {
        long h = 0;
        for (long v : c_) h = std::max(h, v < 0 ? -v : v);
        return h;
    }
    /// The real lift sum c_k t_k, before reduction mod 1.
    Rational lift(const GroupElement& g) const
    {
        Rational acc;
        const auto& pos = s_->horizontal_positions();
        for (std::size_t i = 0; i < pos.size(); ++i)
            if (c_[i] != 0) acc += Rational(c_[i]) * g[pos[i]];
        return acc;
    }
    TorusPoint operator()(const GroupElement& g) const { return TorusPoint(lift(g)); }

private:
    SchemaPtr s_;
    std::vector<long> c_;
};

/// Integer coefficients on the positions of G_d; a homomorphism G_d -> R
/// sending Gamma_d to Z.
class VerticalChar {
public:
    VerticalChar(SchemaPtr s, FiltIndex d, std::vector<long> coeffs) : s_(std::move(s)), d_(std::move(d)), c_(std::move(coeffs))
    {
        if (c_.size() != s_->positions(d_).size())
            throw std::invalid_argument("VerticalChar: expected " + std::to_string(s_->positions(d_).size())
                                        + " coefficients for G_" + d_.str());
    }
    const SchemaPtr& schema() const { return s_; }
    const FiltIndex& index() const { return d_; }
    const std::vector<long>& coeffs() const { return c_; }
    bool trivial() const
    {
        return std::all_of(c_.begin(), c_.end(), [](long v) { return v == 0; });
    }
    /// eta applied to the G_d-coordinates of g (the other coordinates are ignored).
    Rational operator()(const GroupElement& g) const
    {
        Rational acc;
        const auto& pos = s_->positions(d_);
        for (std::size_t i = 0; i < pos.size(); ++i)
            if (c_[i] != 0) acc += Rational(c_[i]) * g[pos[i]];
        return acc;
    }

private:
    SchemaPtr s_;
    FiltIndex d_;
    std::vector<long> c_;
};


// ---------------------------------------------------------------------------
// Schema construction
// ---------------------------------------------------------------------------

namespace detail {

inline std::string pair_label(const std::vector<std::string>& b, int i, int j) { return "[" + b[i] + ", " + b[j] + "]"; }

inline Coords unit(int m, int k)
{
    Coords v(static_cast<std::size_t>(m));
    v[static_cast<std::size_t>(k)] = 1;
    return v;
}

inline Coords lie_commutator_log(const LieAlgebra& L, const Coords& x, const Coords& y)
{
    return L.bch(L.bch(linalg::scaled(x, -1), linalg::scaled(y, -1)), L.bch(x, y));
}

// Recovers Lie brackets from group words by fixed-point iteration. Every
// correction term of log[e_i, e_j] involves brackets that sit strictly deeper,
// so the iteration stabilises after at most class-many passes.
inline LieAlgebra lie_from_group_words(int m, const std::map<std::pair<int, int>, Coords>& words)
{
    std::map<std::pair<int, int>, Coords> br = words;
    for (int pass = 0; pass < 8; ++pass) {
        LieAlgebra L(m, br);
        if (L.nilpotency_class() > 4) throw std::invalid_argument("schema: nilpotency class exceeds 4");
        bool changed = false;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                Coords got = lie_commutator_log(L, unit(m, i), unit(m, j));
                auto it = words.find({i, j});
                Coords want = it == words.end() ? Coords(static_cast<std::size_t>(m)) : L.log_of_second_kind(it->second);
                if (got == want) continue;
                auto& cur = br[{i, j}];
                if (cur.empty()) cur.assign(static_cast<std::size_t>(m), Rational{});
                for (int k = 0; k < m; ++k) cur[k] += want[k] - got[k];
                changed = true;
            }
        if (!changed) return L;
    }
    throw std::invalid_argument("schema: commutator table is not consistent with any class <= 4 group law");
}

} // namespace detail

inline SchemaPtr make_schema(const SchemaDef& def)
{
    const int m = static_cast<int>(def.basis.size());
    if (m == 0) throw std::invalid_argument("schema " + def.name + ": empty basis");
    {
        std::set<std::string> seen;
        for (const auto& b : def.basis) {
            if (b.empty()) throw std::invalid_argument("schema " + def.name + ": empty basis label");
            if (!seen.insert(b).second) throw std::invalid_argument("schema " + def.name + ": duplicate basis label '" + b + "'");
        }
    }
    std::map<std::pair<int, int>, Coords> given;
    for (const auto& [ij, w] : def.commutators) {
        auto [i, j] = ij;
        if (i < 0 || j >= m || i >= j)
            throw std::invalid_argument("schema " + def.name + ": commutator key (" + std::to_string(i) + "," + std::to_string(j)
                                        + ") must satisfy i < j < dim");
        if (static_cast<int>(w.size()) != m) throw std::invalid_argument("schema " + def.name + ": commutator word has wrong length");
        for (int k = 0; k <= j; ++k)
            if (!w[k].is_zero())
                throw std::invalid_argument("schema " + def.name + ": " + detail::pair_label(def.basis, i, j)
                                            + " references position " + def.basis[k] + ", which is not after both");
        if (!linalg::is_zero(w)) given[ij] = w;
    }

    auto s = std::shared_ptr<NilSchema>(new NilSchema());
    s->name_ = def.name;
    s->basis_ = def.basis;
    s->kind_ = def.kind;

    if (def.table == SchemaDef::Table::group_words) {
        s->lie_ = detail::lie_from_group_words(m, given);
        s->table_ = given;
    } else {
        s->lie_ = LieAlgebra(m, given);
        if (s->lie_.nilpotency_class() > 4) throw std::invalid_argument("schema " + def.name + ": nilpotency class exceeds 4");
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                Coords w = s->lie_.second_kind_of_log(detail::lie_commutator_log(s->lie_, detail::unit(m, i), detail::unit(m, j)));
                if (!linalg::is_zero(w)) s->table_[{i, j}] = w;
            }
    }
    if (auto bad = s->lie_.jacobi_violation())
        throw std::invalid_argument("schema " + def.name + ": Jacobi identity fails on (" + def.basis[(*bad)[0]] + ", "
                                    + def.basis[(*bad)[1]] + ", " + def.basis[(*bad)[2]] + ")");

    // Filtration.
    int arity = def.kind == FiltKind::degree ? 1 : def.kind == FiltKind::degree_rank ? 2 : -1;
    for (const auto& [idx, pos] : def.filtration) {
        if (idx.kind != def.kind)
            throw std::invalid_argument("schema " + def.name + ": filtration index " + idx.str() + " is not of kind " + to_string(def.kind));
        if (arity < 0) arity = static_cast<int>(idx.v.size());
        if (static_cast<int>(idx.v.size()) != arity)
            throw std::invalid_argument("schema " + def.name + ": filtration indices have inconsistent arity");
        if (idx.kind == FiltKind::degree_rank && idx.v[1] > idx.v[0])
            throw std::invalid_argument("schema " + def.name + ": degree-rank index " + idx.str() + " needs r <= d");
        std::vector<int> p = pos;
        std::sort(p.begin(), p.end());
        if (std::adjacent_find(p.begin(), p.end()) != p.end())
            throw std::invalid_argument("schema " + def.name + ": repeated position in G_" + idx.str());
        for (int k : p)
            if (k < 0 || k >= m) throw std::invalid_argument("schema " + def.name + ": position out of range in G_" + idx.str());
        for (const auto& [other, unused] : s->filtration_)
            if (other == idx) throw std::invalid_argument("schema " + def.name + ": G_" + idx.str() + " listed twice");
        s->filtration_.emplace_back(idx, std::move(p));
    }
    if (s->filtration_.empty()) throw std::invalid_argument("schema " + def.name + ": empty filtration");
    s->arity_ = arity;
    std::sort(s->filtration_.begin(), s->filtration_.end(), [](const auto& a, const auto& b) {
        if (a.first.total() != b.first.total()) return a.first.total() < b.first.total();
        return a.first.v < b.first.v;
    });

    std::vector<bool> vertical(static_cast<std::size_t>(m), false);
    for (const auto& [ij, w] : s->table_)
        for (int k = 0; k < m; ++k)
            if (!w[k].is_zero()) vertical[static_cast<std::size_t>(k)] = true;
    for (int k = 0; k < m; ++k)
        if (!vertical[static_cast<std::size_t>(k)]) s->horizontal_.push_back(k);

    bool found = false;
    for (const auto& [idx, pos] : s->filtration_) {
        if (pos.empty()) continue;
        bool better = !found;
        if (found) {
            if (idx.kind == FiltKind::multidegree)
                better = idx.total() > s->top_.total() || (idx.total() == s->top_.total() && idx.v > s->top_.v);
            else
                better = idx.v > s->top_.v;
        }
        if (better) {
            s->top_ = idx;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("schema " + def.name + ": every filtration group is trivial");
    s->zero_.assign(static_cast<std::size_t>(m), Rational{});
    return s;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// A rational in [-bound, bound] with denominator at most max_den.
inline Rational sample_rational(std::mt19937_64& rng, long bound, long max_den)
{
    std::uniform_int_distribution<long> den(1, max_den);
    long q = den(rng);
    std::uniform_int_distribution<long> num(-bound * q, bound * q);
    return Rational(num(rng), q);
}

/// p/q with q uniform in [min_den, max_den] and |p| <= q; generic enough that
/// no small-height relation holds by accident.
inline Rational sample_frequency(std::mt19937_64& rng, long min_den = 10001, long max_den = 99991)
{
    std::uniform_int_distribution<long> den(min_den, max_den);
    long d = den(rng);
    std::uniform_int_distribution<long> num(-d, d);
    return Rational(num(rng), d);
}

/// Random element supported on the given positions (all positions if empty).
inline GroupElement sample_element(const SchemaPtr& s, std::mt19937_64& rng, long bound = 3, long max_den = 5,
                                   const std::vector<int>& support = {})
{
    Coords t(static_cast<std::size_t>(s->dim()));
    if (support.empty())
        for (auto& x : t) x = sample_rational(rng, bound, max_den);
    else
        for (int k : support) t[static_cast<std::size_t>(k)] = sample_rational(rng, bound, max_den);
    return GroupElement(s, std::move(t));
}

struct SchemaReport {
    bool pass = true;
    std::string axiom;
    std::string detail;
    std::vector<std::string> witness;
    int checks = 0;
};

inline SchemaReport verify_schema(const SchemaPtr& s, std::uint64_t seed = 20240601)
{
    SchemaReport rep;
    auto fail = [&](std::string axiom, std::string detail, std::vector<std::string> witness) {
        rep.pass = false;
        rep.axiom = std::move(axiom);
        rep.detail = std::move(detail);
        rep.witness = std::move(witness);
        return rep;
    };
    const int m = s->dim();
    const auto& lab = s->basis();
    std::mt19937_64 rng(seed);

    for (int trial = 0; trial < 200; ++trial) {
        auto x = sample_element(s, rng), y = sample_element(s, rng), z = sample_element(s, rng);
        ++rep.checks;
        if (!(mul(mul(x, y), z) == mul(x, mul(y, z))))
            return fail("associativity", "(xy)z != x(yz)", {x.str(), y.str(), z.str()});
        ++rep.checks;
        if (!mul(x, inverse(x)).is_identity() || !mul(inverse(x), x).is_identity())
            return fail("inverse", "x x^{-1} is not the identity", {x.str()});
    }

    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            ++rep.checks;
            auto c = commutator(GroupElement::basis(s, i), GroupElement::basis(s, j));
            if (c.coords() != s->table_word(i, j))
                return fail("table", "commutator() disagrees with the table for " + detail::pair_label(lab, i, j), {lab[i], lab[j], c.str()});
        }

    for (const auto& [ij, w] : s->table()) {
        ++rep.checks;
        for (const auto& x : w)
            if (!x.is_integer())
                return fail("lattice-closure", detail::pair_label(lab, ij.first, ij.second) + " has a non-integer exponent",
                            {lab[ij.first], lab[ij.second]});
    }

    const auto& filt = s->filtration();
    const FiltIndex zero = FiltIndex::zero(s->kind(), s->index_arity());
    ++rep.checks;
    if (s->positions(zero).size() != static_cast<std::size_t>(m))
        return fail("nesting", "G_" + zero.str() + " must be the whole group", {zero.str()});
    for (const auto& [a, pa] : filt)
        for (const auto& [b, pb] : filt) {
            if (a == b || !filt_leq(a, b)) continue;
            ++rep.checks;
            if (!std::includes(pa.begin(), pa.end(), pb.begin(), pb.end()))
                return fail("nesting", "G_" + b.str() + " is not contained in G_" + a.str(), {a.str(), b.str()});
        }

    // Supports of [e_p, e_q] for every ordered pair.
    std::vector<std::vector<int>> supp(static_cast<std::size_t>(m * m));
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            if (p == q) continue;
            GroupElement c = p < q ? GroupElement(s, s->table_word(p, q)) : inverse(GroupElement(s, s->table_word(q, p)));
            supp[static_cast<std::size_t>(p * m + q)] = c.support();
        }
    for (const auto& [a, pa] : filt)
        for (const auto& [b, pb] : filt) {
            const auto& target = s->positions(a + b);
            for (int p : pa)
                for (int q : pb) {
                    if (p == q) continue;
                    ++rep.checks;
                    for (int k : supp[static_cast<std::size_t>(p * m + q)])
                        if (!std::binary_search(target.begin(), target.end(), k))
                            return fail("filtration-inclusion",
                                        "[G_" + a.str() + ", G_" + b.str() + "] is not contained in G_" + (a + b).normalized().str(),
                                        {lab[p], lab[q]});
                }
        }

    // Elementwise instance of the same axiom on sampled members.
    for (const auto& [a, pa] : filt)
        for (const auto& [b, pb] : filt) {
            if (pa.empty() || pb.empty()) continue;
            for (int trial = 0; trial < 3; ++trial) {
                ++rep.checks;
                auto x = sample_element(s, rng, 2, 3, pa), y = sample_element(s, rng, 2, 3, pb);
                auto c = commutator(x, y);
                if (!s->in_subgroup(c.coords(), a + b))
                    return fail("filtration-inclusion", "sampled commutator of G_" + a.str() + " and G_" + b.str() + " leaves G_"
                                                        + (a + b).normalized().str(),
                                {x.str(), y.str()});
            }
        }

    for (int trial = 0; trial < 50; ++trial) {
        ++rep.checks;
        auto x = sample_element(s, rng), y = sample_element(s, rng);
        auto z = mul(x, y);
        for (int k : s->horizontal_positions())
            if (z[k] != x[k] + y[k])
                return fail("horizontal-additivity", "coordinate " + lab[k] + " is not additive", {x.str(), y.str()});
    }
    return rep;
}

} // namespace nilcalc
