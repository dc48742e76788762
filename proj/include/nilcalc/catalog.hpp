#pragma once

// Named schemas. catalog("heisenberg"), catalog("torus(2,3)"),
// catalog("universal([2,1],(3,2))"), catalog("product(heisenberg,torus(1,1))").
// Every schema returned here has passed verify_schema; results are cached per
// reference string.

#include "nilcalc/nilgroup.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace nilcalc {

namespace catalog_detail {

inline Coords word(int m, std::initializer_list<std::pair<int, long>> terms)
{
    Coords w(static_cast<std::size_t>(m));
    for (auto [k, e] : terms) w[static_cast<std::size_t>(k)] = Rational(e);
    return w;
}

inline std::vector<int> all_positions(int m)
{
    std::vector<int> p(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) p[static_cast<std::size_t>(k)] = k;
    return p;
}

// Truncated tensor algebra on weighted letters. A word of weight w survives
// when w < d, or w == d and its length is at most r. The killed words form a
// two-sided ideal, and the Lie elements that survive are exactly the
// universal Lie algebra of the given degree-rank.
class TruncatedTensor {
public:
    using Word = std::vector<int>;
    using Elem = std::map<Word, Rational>;

    TruncatedTensor(std::vector<int> letter_weight, int d, int r) : wt_(std::move(letter_weight)), d_(d), r_(r) {}

    bool alive(const Word& w) const
    {
        int s = 0;
        for (int l : w) s += wt_[static_cast<std::size_t>(l)];
        return s < d_ || (s == d_ && static_cast<int>(w.size()) <= r_);
    }

    Elem mul(const Elem& a, const Elem& b) const
    {
        Elem out;
        for (const auto& [wa, ca] : a)
            for (const auto& [wb, cb] : b) {
                Word w = wa;
                w.insert(w.end(), wb.begin(), wb.end());
                if (!alive(w)) continue;
                auto& slot = out[w];
                slot += ca * cb;
            }
        prune(out);
        return out;
    }

    static void add_to(Elem& a, const Elem& b, const Rational& s = Rational(1))
    {
        for (const auto& [w, c] : b) a[w] += s * c;
        prune(a);
    }

    static void prune(Elem& a)
    {
        for (auto it = a.begin(); it != a.end();)
            it = it->second.is_zero() ? a.erase(it) : std::next(it);
    }

    Elem bracket(const Elem& a, const Elem& b) const
    {
        Elem out = mul(a, b);
        add_to(out, mul(b, a), Rational(-1));
        return out;
    }

    // exp and log on elements without constant term; the series stop because
    // every letter has weight >= 1.
    Elem exp(const Elem& x) const
    {
        Elem out{{Word{}, Rational(1)}};
        Elem pw{{Word{}, Rational(1)}};
        for (int k = 1; k <= d_; ++k) {
            pw = mul(pw, x);
            if (pw.empty()) break;
            add_to(out, pw, Rational(1) / factorial(k));
        }
        return out;
    }

    Elem log(const Elem& g) const
    {
        Elem y = g;
        y[Word{}] -= Rational(1);
        prune(y);
        Elem out, pw{{Word{}, Rational(1)}};
        for (int k = 1; k <= d_; ++k) {
            pw = mul(pw, y);
            if (pw.empty()) break;
            add_to(out, pw, Rational(k % 2 ? 1 : -1, k));
        }
        return out;
    }

    Elem group_commutator(const Elem& logx, const Elem& logy) const
    {
        Elem nx = logx, ny = logy;
        for (auto& [w, c] : nx) c = -c;
        for (auto& [w, c] : ny) c = -c;
        return log(mul(mul(exp(nx), exp(ny)), mul(exp(logx), exp(logy))));
    }

private:
    static Rational factorial(int k)
    {
        Rational f(1);
        for (int i = 2; i <= k; ++i) f *= Rational(i);
        return f;
    }

    std::vector<int> wt_;
    int d_, r_;
};

struct HallItem {
    int left = -1, right = -1; // children indices, -1 for letters
    int letter = -1;
    int degree = 0;
    int rank = 0;
    std::string label;
};

} // namespace catalog_detail

// ---------------------------------------------------------------------------
// Individual groups
// ---------------------------------------------------------------------------

inline SchemaDef torus_def(int k, int d)
{
    if (k < 1 || d < 0) throw std::invalid_argument("torus(k, d) needs k >= 1 and d >= 0");
    SchemaDef def;
    def.name = "torus(" + std::to_string(k) + "," + std::to_string(d) + ")";
    for (int i = 1; i <= k; ++i) def.basis.push_back(k == 1 ? "t" : "t" + std::to_string(i));
    for (int i = 0; i <= std::max(d, 0); ++i) def.filtration.emplace_back(FiltIndex::degree(i), catalog_detail::all_positions(k));
    return def;
}

inline SchemaDef heisenberg_def()
{
    SchemaDef def;
    def.name = "heisenberg";
    def.basis = {"e1", "e2", "c"};
    def.commutators[{0, 1}] = catalog_detail::word(3, {{2, 1}});
    def.filtration = {{FiltIndex::degree(0), {0, 1, 2}}, {FiltIndex::degree(1), {0, 1, 2}}, {FiltIndex::degree(2), {2}}};
    return def;
}

/// The Heisenberg group with the degree-rank filtration that models
/// e({alpha n^2} beta n): e1 sits in degree 2, e2 in degree 1.
inline SchemaDef heisenberg_degrank32_def()
{
    SchemaDef def = heisenberg_def();
    def.name = "heisenberg_degrank32";
    def.kind = FiltKind::degree_rank;
    const std::vector<int> all{0, 1, 2}, e1c{0, 2}, c{2};
    def.filtration = {
        {FiltIndex::degree_rank(0, 0), all}, {FiltIndex::degree_rank(1, 0), all}, {FiltIndex::degree_rank(1, 1), all},
        {FiltIndex::degree_rank(2, 0), e1c}, {FiltIndex::degree_rank(2, 1), e1c}, {FiltIndex::degree_rank(2, 2), c},
        {FiltIndex::degree_rank(3, 0), c},   {FiltIndex::degree_rank(3, 1), c},   {FiltIndex::degree_rank(3, 2), c},
    };
    return def;
}

inline SchemaDef free2step_def(int k)
{
    if (k < 2) throw std::invalid_argument("free2step(k) needs k >= 2");
    const int m = k + k * (k - 1) / 2;
    if (m > 12) throw std::invalid_argument("free2step(" + std::to_string(k) + ") has dimension " + std::to_string(m) + " > 12");
    SchemaDef def;
    def.name = "free2step(" + std::to_string(k) + ")";
    for (int i = 1; i <= k; ++i) def.basis.push_back("x" + std::to_string(i));
    std::vector<int> top;
    int pos = k;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            def.basis.push_back("c" + std::to_string(i + 1) + std::to_string(j + 1));
            def.commutators[{i, j}] = catalog_detail::word(m, {{pos, 1}});
            top.push_back(pos++);
        }
    auto all = catalog_detail::all_positions(m);
    def.filtration = {{FiltIndex::degree(0), all}, {FiltIndex::degree(1), all}, {FiltIndex::degree(2), top}};
    return def;
}

/// The 7-dimensional multidegree (1,1) group with [a1,b2] = c12 and
/// [a2,b1] = c12^{-1}.
inline SchemaDef appc_multidegree_def()
{
    SchemaDef def;
    def.name = "appC_multidegree";
    def.kind = FiltKind::multidegree;
    def.basis = {"a1", "a2", "a12", "b1", "b2", "b12", "c12"};
    def.commutators[{0, 4}] = catalog_detail::word(7, {{6, 1}});
    def.commutators[{1, 3}] = catalog_detail::word(7, {{6, -1}});
    def.filtration = {
        {FiltIndex::multi({0, 0}), {0, 1, 2, 3, 4, 5, 6}},
        {FiltIndex::multi({1, 0}), {0, 1, 2, 6}},
        {FiltIndex::multi({0, 1}), {3, 4, 5, 6}},
        {FiltIndex::multi({1, 1}), {6}},
    };
    return def;
}

/// Universal group with dims[i-1] generators of degree i, truncated at
/// degree-rank (d, r). The basis consists of group basic commutators, so the
/// integer-coordinate lattice is the group generated by the e_{i,j}.
inline SchemaDef universal_def(const std::vector<int>& dims, int d, int r)
{
    using namespace catalog_detail;
    if (dims.empty()) throw std::invalid_argument("universal: empty dimension vector");
    if (r < 0 || r > d) throw std::invalid_argument("universal: need 0 <= r <= d");
    std::vector<int> letter_wt;
    std::vector<HallItem> items;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 0) throw std::invalid_argument("universal: negative dimension");
        for (int j = 1; j <= dims[i]; ++j) {
            HallItem h;
            h.letter = static_cast<int>(letter_wt.size());
            h.degree = static_cast<int>(i + 1);
            h.rank = 1;
            h.label = "e" + std::to_string(i + 1) + std::to_string(j);
            letter_wt.push_back(h.degree);
            items.push_back(h);
        }
    }
    auto keep = [&](int deg, int rank) { return deg < d || (deg == d && rank <= r); };
    std::vector<HallItem> basic;
    for (const auto& h : items)
        if (keep(h.degree, h.rank)) basic.push_back(h);
    // Basic commutators [a, b] with a > b and, if a = [a1, a2], a2 <= b;
    // items are ordered by degree, then by creation.
    for (int deg = 2; deg <= d; ++deg) {
        std::vector<HallItem> fresh;
        for (int ia = 0; ia < static_cast<int>(basic.size()); ++ia)
            for (int ib = 0; ib < ia; ++ib) {
                const auto& a = basic[static_cast<std::size_t>(ia)];
                const auto& b = basic[static_cast<std::size_t>(ib)];
                if (a.degree + b.degree != deg) continue;
                if (a.letter < 0 && a.right > ib) continue;
                HallItem c;
                c.left = ia;
                c.right = ib;
                c.degree = deg;
                c.rank = a.rank + b.rank;
                c.label = "[" + a.label + "," + b.label + "]";
                if (keep(c.degree, c.rank)) fresh.push_back(c);
            }
        basic.insert(basic.end(), fresh.begin(), fresh.end());
        if (basic.size() > 12) throw std::invalid_argument("universal: dimension exceeds 12");
    }
    // logs[] follows creation order, which the Hall condition above refers
    // to; the schema basis is then ordered by degree so brackets stay
    // triangular.
    TruncatedTensor T(letter_wt, d, r);
    std::vector<TruncatedTensor::Elem> created;
    for (const auto& h : basic) {
        if (h.letter >= 0)
            created.push_back({{TruncatedTensor::Word{h.letter}, Rational(1)}});
        else
            created.push_back(T.group_commutator(created[static_cast<std::size_t>(h.left)], created[static_cast<std::size_t>(h.right)]));
    }
    std::vector<int> order(basic.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return basic[static_cast<std::size_t>(x)].degree < basic[static_cast<std::size_t>(y)].degree;
    });
    std::vector<HallItem> sorted;
    std::vector<TruncatedTensor::Elem> logs;
    for (int i : order) {
        sorted.push_back(basic[static_cast<std::size_t>(i)]);
        logs.push_back(created[static_cast<std::size_t>(i)]);
    }
    basic = std::move(sorted);
    const int m = static_cast<int>(basic.size());
    if (m == 0) throw std::invalid_argument("universal: trivial group");

    // Coordinates of logs in a common word index.
    std::map<TruncatedTensor::Word, int> widx;
    for (const auto& L : logs)
        for (const auto& [w, c] : L) widx.emplace(w, 0);
    {
        int n = 0;
        for (auto& [w, i] : widx) i = n++;
    }
    auto to_vec = [&](const TruncatedTensor::Elem& e) {
        Coords v(widx.size());
        for (const auto& [w, c] : e) {
            auto it = widx.find(w);
            if (it == widx.end()) throw std::logic_error("universal: bracket leaves the span of the basis");
            v[static_cast<std::size_t>(it->second)] = c;
        }
        return v;
    };
    std::vector<Coords> basis_vecs;
    for (const auto& L : logs) basis_vecs.push_back(to_vec(L));
    if (static_cast<int>(linalg::rank(basis_vecs)) != m) throw std::logic_error("universal: basic commutators are dependent");

    SchemaDef def;
    def.table = SchemaDef::Table::lie_brackets;
    def.kind = FiltKind::degree_rank;
    std::string dv;
    for (std::size_t i = 0; i < dims.size(); ++i) dv += (i ? "," : "") + std::to_string(dims[i]);
    def.name = "universal([" + dv + "],(" + std::to_string(d) + "," + std::to_string(r) + "))";
    for (const auto& h : basic) def.basis.push_back(h.label);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            auto b = T.bracket(logs[static_cast<std::size_t>(i)], logs[static_cast<std::size_t>(j)]);
            if (b.empty()) continue;
            auto sol = linalg::solve_in_span(basis_vecs, to_vec(b));
            if (!sol) throw std::logic_error("universal: bracket leaves the span of the basis");
            def.commutators[{i, j}] = *sol;
        }
    for (int dd = 0; dd <= d; ++dd)
        for (int rr = 0; rr <= dd; ++rr) {
            std::vector<int> pos;
            for (int k = 0; k < m; ++k) {
                const auto& h = basic[static_cast<std::size_t>(k)];
                if (h.degree > dd || (h.degree == dd && h.rank >= rr)) pos.push_back(k);
            }
            def.filtration.emplace_back(FiltIndex::degree_rank(dd, rr), pos);
        }
    return def;
}

/// Direct product; filtrations must have the same kind and arity.
inline SchemaDef product_def(const SchemaPtr& a, const SchemaPtr& b)
{
    if (a->kind() != b->kind() || a->index_arity() != b->index_arity())
        throw std::invalid_argument("product: factors have different filtration kinds");
    const int ma = a->dim(), mb = b->dim(), m = ma + mb;
    if (m > 12) throw std::invalid_argument("product: dimension exceeds 12");
    SchemaDef def;
    def.name = "product(" + a->name() + "," + b->name() + ")";
    def.kind = a->kind();
    std::set<std::string> la(a->basis().begin(), a->basis().end());
    bool clash = false;
    for (const auto& l : b->basis()) clash = clash || la.count(l);
    for (const auto& l : a->basis()) def.basis.push_back(clash ? l + ".1" : l);
    for (const auto& l : b->basis()) def.basis.push_back(clash ? l + ".2" : l);
    for (const auto& [ij, w] : a->table()) {
        Coords v(static_cast<std::size_t>(m));
        for (int k = 0; k < ma; ++k) v[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k)];
        def.commutators[ij] = v;
    }
    for (const auto& [ij, w] : b->table()) {
        Coords v(static_cast<std::size_t>(m));
        for (int k = 0; k < mb; ++k) v[static_cast<std::size_t>(ma + k)] = w[static_cast<std::size_t>(k)];
        def.commutators[{ij.first + ma, ij.second + ma}] = v;
    }
    std::set<FiltIndex> idx;
    for (const auto& [i, p] : a->filtration()) idx.insert(i);
    for (const auto& [i, p] : b->filtration()) idx.insert(i);
    for (const auto& i : idx) {
        std::vector<int> pos = a->positions(i);
        for (int k : b->positions(i)) pos.push_back(k + ma);
        def.filtration.emplace_back(i, pos);
    }
    return def;
}

/// The canonical degree-rank refinement of a degree filtration:
/// G_(d,0) = G_d and, for r >= 1, G_(d,r) is generated by G_{d+1} and the
/// r-fold commutators of pieces whose degrees sum to d. Computed at basis
/// level from labelled position sets.
inline SchemaDef degree_rank_refinement(const SchemaPtr& s)
{
    if (s->kind() != FiltKind::degree) throw std::invalid_argument("degree_rank_refinement: schema is not degree-filtered");
    const int m = s->dim();
    int top = 0;
    for (const auto& [i, p] : s->filtration())
        if (!p.empty()) top = std::max(top, i.v[0]);
    // items[(d, r)] = positions reachable as r-fold commutators of total degree d
    std::map<std::pair<int, int>, std::set<int>> items;
    for (int d = 1; d <= top; ++d) {
        const auto& p = s->positions(FiltIndex::degree(d));
        items[{d, 1}].insert(p.begin(), p.end());
    }
    for (bool grew = true; grew;) {
        grew = false;
        auto snapshot = items;
        for (const auto& [k1, p1] : snapshot)
            for (const auto& [k2, p2] : snapshot) {
                int d = k1.first + k2.first, r = k1.second + k2.second;
                if (d > top) continue;
                auto& dst = items[{d, r}];
                for (int p : p1)
                    for (int q : p2) {
                        if (p == q) continue;
                        GroupElement c = p < q ? GroupElement(s, s->table_word(p, q)) : inverse(GroupElement(s, s->table_word(q, p)));
                        for (int k : c.support()) grew = dst.insert(k).second || grew;
                    }
            }
    }
    SchemaDef def;
    def.name = s->name() + "/degree-rank";
    def.basis = s->basis();
    def.commutators = s->table();
    def.kind = FiltKind::degree_rank;
    def.filtration.emplace_back(FiltIndex::degree_rank(0, 0), catalog_detail::all_positions(m));
    for (int d = 1; d <= top; ++d)
        for (int r = 0; r <= d; ++r) {
            std::set<int> pos;
            if (r <= 1) {
                const auto& p = s->positions(FiltIndex::degree(d));
                pos.insert(p.begin(), p.end());
            } else {
                const auto& p = s->positions(FiltIndex::degree(d + 1));
                pos.insert(p.begin(), p.end());
                for (const auto& [k, pk] : items)
                    if (k.first == d && k.second >= r) pos.insert(pk.begin(), pk.end());
            }
            def.filtration.emplace_back(FiltIndex::degree_rank(d, r), std::vector<int>(pos.begin(), pos.end()));
        }
    return def;
}

// ---------------------------------------------------------------------------
// Reference strings
// ---------------------------------------------------------------------------

namespace catalog_detail {

class RefParser {
public:
    explicit RefParser(std::string s) : s_(std::move(s)) {}

    SchemaDef parse_top()
    {
        SchemaDef def = parse_def();
        skip();
        if (p_ != s_.size()) error("trailing characters");
        return def;
    }

private:
    [[noreturn]] void error(const std::string& msg) const
    {
        throw std::invalid_argument("catalog reference '" + s_ + "': " + msg + " at offset " + std::to_string(p_));
    }
    void skip()
    {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }
    bool eat(char c)
    {
        skip();
        if (p_ < s_.size() && s_[p_] == c) {
            ++p_;
            return true;
        }
        return false;
    }
    void expect(char c)
    {
        if (!eat(c)) error(std::string("expected '") + c + "'");
    }
    std::string ident()
    {
        skip();
        std::size_t b = p_;
        while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
        if (b == p_) error("expected a name");
        return s_.substr(b, p_ - b);
    }
    int integer()
    {
        skip();
        std::size_t b = p_;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        if (b == p_) error("expected an integer");
        return std::stoi(s_.substr(b, p_ - b));
    }
    std::vector<int> int_list(char open, char close)
    {
        expect(open);
        std::vector<int> out;
        if (eat(close)) return out;
        do out.push_back(integer());
        while (eat(','));
        expect(close);
        return out;
    }

    SchemaDef parse_def();

    std::string s_;
    std::size_t p_ = 0;
};

} // namespace catalog_detail

SchemaPtr catalog(const std::string& ref);

inline SchemaDef catalog_detail::RefParser::parse_def()
{
    std::string name = ident();
    if (name == "heisenberg") return heisenberg_def();
    if (name == "heisenberg_degrank32") return heisenberg_degrank32_def();
    if (name == "appC_multidegree") return appc_multidegree_def();
    if (name == "torus") {
        expect('(');
        int k = integer();
        expect(',');
        int d = integer();
        expect(')');
        return torus_def(k, d);
    }
    if (name == "free2step") {
        expect('(');
        int k = integer();
        expect(')');
        return free2step_def(k);
    }
    if (name == "universal") {
        expect('(');
        auto dims = int_list('[', ']');
        expect(',');
        skip();
        auto dr = (p_ < s_.size() && s_[p_] == '[') ? int_list('[', ']') : int_list('(', ')');
        expect(')');
        if (dr.size() != 2) error("universal needs a degree-rank pair");
        return universal_def(dims, dr[0], dr[1]);
    }
    if (name == "product") {
        expect('(');
        std::size_t b = p_;
        SchemaDef left = parse_def();
        std::string lref = s_.substr(b, p_ - b);
        expect(',');
        b = p_;
        SchemaDef right = parse_def();
        std::string rref = s_.substr(b, p_ - b);
        expect(')');
        (void)left;
        (void)right;
        return product_def(catalog(lref), catalog(rref));
    }
    error("unknown catalog group '" + name + "'");
}

/// Builds, verifies and caches a catalog schema.
inline SchemaPtr catalog(const std::string& ref)
{
    static std::mutex mu;
    static std::unordered_map<std::string, SchemaPtr> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(ref);
        if (it != cache.end()) return it->second;
    }
    SchemaDef def = catalog_detail::RefParser(ref).parse_top();
    SchemaPtr s = make_schema(def);
    auto rep = verify_schema(s);
    if (!rep.pass) throw std::logic_error("catalog " + ref + " fails verification: " + rep.axiom + ": " + rep.detail);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(ref, s).first->second;
}

/// Degree-rank view of any schema: itself if already degree-rank, otherwise
/// the verified refinement of its degree filtration.
inline SchemaPtr as_degree_rank(const SchemaPtr& s)
{
    if (s->kind() == FiltKind::degree_rank) return s;
    static std::mutex mu;
    static std::map<const NilSchema*, std::pair<std::weak_ptr<const NilSchema>, SchemaPtr>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(s.get());
        if (it != cache.end() && it->second.first.lock() == s) return it->second.second;
    }
    SchemaPtr r = make_schema(degree_rank_refinement(s));
    auto rep = verify_schema(r);
    if (!rep.pass) throw std::logic_error("degree-rank refinement of " + s->name() + " fails: " + rep.axiom);
    std::lock_guard<std::mutex> lock(mu);
    cache[s.get()] = {s, r};
    return r;
}

} // namespace nilcalc
