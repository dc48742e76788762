#pragma once

// Bracket polynomials: expression trees over integer variables n_0..n_{k-1}
// with rational constants, +, * and the signed fractional part {x} in I0.
//
// Prefix grammar:
//   e := (const p/q) | (var i) | (frac e) | (+ e e ...) | (* e e ...)
// Variables are 0-based. Nesting of frac is capped at depth 3.

#include "nilcalc/nilseq.hpp"
#include "nilcalc/scalar.hpp"

#include <cctype>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilcalc {

class BracketExpr {
public:
    enum class Op { constant, variable, frac, sum, product };

    static constexpr int max_frac_depth = 3;

    static BracketExpr constant(const Rational& c) { return BracketExpr(Op::constant, c, 0, {}); }
    static BracketExpr var(int i)
    {
        if (i < 0) throw std::invalid_argument("bracket: negative variable index");
        return BracketExpr(Op::variable, Rational{}, i, {});
    }
    static BracketExpr frac(const BracketExpr& e) { return BracketExpr(Op::frac, Rational{}, 0, {e}); }
    static BracketExpr sum(std::vector<BracketExpr> xs) { return BracketExpr(Op::sum, Rational{}, 0, std::move(xs)); }
    static BracketExpr product(std::vector<BracketExpr> xs) { return BracketExpr(Op::product, Rational{}, 0, std::move(xs)); }

    friend BracketExpr operator+(const BracketExpr& a, const BracketExpr& b) { return sum({a, b}); }
    friend BracketExpr operator*(const BracketExpr& a, const BracketExpr& b) { return product({a, b}); }

    static BracketExpr parse(const std::string& text)
    {
        std::size_t pos = 0;
        BracketExpr e = parse_at(text, pos);
        skip_ws(text, pos);
        if (pos != text.size()) throw std::invalid_argument("bracket: trailing input at offset " + std::to_string(pos));
        return e;
    }

    Op op() const { return op_; }
    const std::vector<BracketExpr>& children() const { return kids_; }

    /// 1 + the largest variable index (0 for closed expressions).
    int arity() const
    {
        if (op_ == Op::variable) return var_ + 1;
        int a = 0;
        for (const auto& k : kids_) a = std::max(a, k.arity());
        return a;
    }

    int frac_depth() const
    {
        int d = 0;
        for (const auto& k : kids_) d = std::max(d, k.frac_depth());
        return d + (op_ == Op::frac ? 1 : 0);
    }

    Rational eval(const std::vector<long>& n) const
    {
        switch (op_) {
        case Op::constant: return c_;
        case Op::variable:
            if (static_cast<std::size_t>(var_) >= n.size()) throw std::invalid_argument("bracket: variable n" + std::to_string(var_) + " unbound");
            return Rational(n[static_cast<std::size_t>(var_)]);
        case Op::frac: return signed_frac(kids_[0].eval(n));
        case Op::sum: {
            Rational acc;
            for (const auto& k : kids_) acc += k.eval(n);
            return acc;
        }
        case Op::product: {
            Rational acc(1);
            for (const auto& k : kids_) acc *= k.eval(n);
            return acc;
        }
        }
        return {};
    }

    std::string str() const
    {
        switch (op_) {
        case Op::constant: return "(const " + c_.str() + ")";
        case Op::variable: return "(var " + std::to_string(var_) + ")";
        case Op::frac: return "(frac " + kids_[0].str() + ")";
        case Op::sum:
        case Op::product: {
            std::string out = op_ == Op::sum ? "(+" : "(*";
            for (const auto& k : kids_) out += " " + k.str();
            return out + ")";
        }
        }
        return {};
    }

private:
    BracketExpr(Op op, Rational c, int var, std::vector<BracketExpr> kids) : op_(op), c_(std::move(c)), var_(var), kids_(std::move(kids))
    {
        if ((op_ == Op::sum || op_ == Op::product) && kids_.size() < 2) throw std::invalid_argument("bracket: + and * need two or more operands");
        if (frac_depth() > max_frac_depth) throw std::invalid_argument("bracket: fractional parts nested deeper than 3");
    }

    static void skip_ws(const std::string& s, std::size_t& pos)
    {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    static std::string token(const std::string& s, std::size_t& pos)
    {
        skip_ws(s, pos);
        std::size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '(' && s[pos] != ')') ++pos;
        if (start == pos) throw std::invalid_argument("bracket: expected a token at offset " + std::to_string(start));
        return s.substr(start, pos - start);
    }

    static void expect(const std::string& s, std::size_t& pos, char c)
    {
        skip_ws(s, pos);
        if (pos >= s.size() || s[pos] != c)
            throw std::invalid_argument(std::string("bracket: expected '") + c + "' at offset " + std::to_string(pos));
        ++pos;
    }

    static BracketExpr parse_at(const std::string& s, std::size_t& pos)
    {
        expect(s, pos, '(');
        std::string head = token(s, pos);
        BracketExpr out = constant(Rational{});
        if (head == "const") {
            out = constant(Rational::parse(token(s, pos)));
        } else if (head == "var") {
            std::string t = token(s, pos);
            std::size_t used = 0;
            int i = -1;
            try {
                i = std::stoi(t, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != t.size()) throw std::invalid_argument("bracket: bad variable index '" + t + "'");
            out = var(i);
        } else if (head == "frac") {
            out = frac(parse_at(s, pos));
        } else if (head == "+" || head == "*") {
            std::vector<BracketExpr> xs;
            for (;;) {
                skip_ws(s, pos);
                if (pos < s.size() && s[pos] == ')') break;
                xs.push_back(parse_at(s, pos));
            }
            out = head == "+" ? sum(std::move(xs)) : product(std::move(xs));
        } else {
            throw std::invalid_argument("bracket: unknown operator '" + head + "'");
        }
        expect(s, pos, ')');
        return out;
    }

    Op op_;
    Rational c_;
    int var_ = 0;
    std::vector<BracketExpr> kids_;
};

inline Rational eval_bracket(const BracketExpr& e, const std::vector<long>& n)
{
    if (static_cast<int>(n.size()) < e.arity()) throw std::invalid_argument("bracket: expected " + std::to_string(e.arity()) + " arguments");
    return e.eval(n);
}

/// {a n_i} b n_j as an expression.
inline BracketExpr bracket_monomial(const Rational& a, const Rational& b, int i = 0, int j = 0)
{
    using E = BracketExpr;
    return E::frac(E::constant(a) * E::var(i)) * E::constant(b) * E::var(j);
}

struct IdentityReport {
    bool pass = true;
    long checks = 0;
    long witness = 0;
    Rational lhs, rhs;
};

/// {a n} b n + {b n} a n = a b n^2 + {a n}{b n} mod 1, for n in [1, n_max],
/// with both sides evaluated as bracket expressions. They differ by the
/// integer (a n - {a n})(b n - {b n}).
inline IdentityReport check_product_identity(const Rational& a, const Rational& b, long n_max)
{
    using E = BracketExpr;
    const E lhs_e = bracket_monomial(a, b) + bracket_monomial(b, a);
    const E rhs_e = E::product({E::constant(a * b), E::var(0), E::var(0)}) +
                    E::frac(E::constant(a) * E::var(0)) * E::frac(E::constant(b) * E::var(0));
    IdentityReport rep;
    for (long n = 1; n <= n_max; ++n) {
        Rational lhs = eval_bracket(lhs_e, {n}), rhs = eval_bracket(rhs_e, {n});
        ++rep.checks;
        if (!(lhs - rhs).is_integer()) {
            rep.pass = false;
            rep.witness = n;
            rep.lhs = lhs;
            rep.rhs = rhs;
            return rep;
        }
    }
    return rep;
}

struct CompareReport {
    bool pass = true;
    bool aborted = false;  // boundary-flag rate above 1%
    long compared = 0;
    long flagged = 0;
    long first_mismatch = 0;
    std::string detail;
};

/// e(bracket(n)) against a scalar nilcharacter for n in [1, N], skipping
/// flagged points. A one-variable expression against a k-variable spec is
/// compared on the diagonal (n, ..., n).
inline CompareReport compare_with_nilchar(const BracketExpr& e, const NilcharSpec& spec, long N)
{
    if (spec.output_dim() != 1 || spec.atlas.smoothed()) throw std::invalid_argument("compare_with_nilchar: needs an unsmoothed single-chart spec");
    const int k = spec.orbit.domain_dim();
    const bool diagonal = e.arity() <= 1 && k > 1;
    if (!diagonal && e.arity() > k) throw std::invalid_argument("compare_with_nilchar: expression has more variables than the spec domain");
    CompareReport rep;
    for (long n = 1; n <= N; ++n) {
        Point p(static_cast<std::size_t>(k), 0);
        if (diagonal || k == 1)
            std::fill(p.begin(), p.end(), n);
        else
            throw std::invalid_argument("compare_with_nilchar: multi-variable expressions need an explicit grid");
        auto v = eval_nilchar(spec, p);
        if (v.flagged) {
            ++rep.flagged;
            continue;
        }
        ++rep.compared;
        TorusPoint want(eval_bracket(e, p));
        if (!(v.value[0].phase == want) || v.value[0].modulus != 1.0) {
            if (rep.pass) {
                rep.first_mismatch = n;
                rep.detail = "n=" + std::to_string(n) + ": nilchar phase " + v.value[0].phase.value().str() + ", bracket " + want.value().str();
            }
            rep.pass = false;
        }
    }
    if (rep.flagged * 100 > N) {
        rep.aborted = true;
        rep.pass = false;
        rep.detail = "boundary-flag rate " + std::to_string(rep.flagged) + "/" + std::to_string(N) + " exceeds 1%";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Standard correspondences between bracket phases and nilcharacters
// ---------------------------------------------------------------------------

/// Heisenberg orbit e2^{beta n} e1^{alpha n} with eta(c^t) = -t; its
/// unsmoothed nilcharacter is e({alpha n} beta n).
inline NilcharSpec heisenberg_bracket_spec(const Rational& a, const Rational& b)
{
    auto s = catalog("heisenberg");
    auto g = PolySeq::make(s, 1,
                           {{{0}, GroupElement::identity(s)}, {{1}, GroupElement(s, {a, b, -a * b})}, {{2}, GroupElement(s, {0, 0, -a * b})}});
    return unsmoothed_spec(g, VerticalChar(s, FiltIndex::degree(2), {-1}));
}

/// Degree-rank (3,2) Heisenberg orbit e2^{beta n} e1^{alpha n^2}; the
/// nilcharacter is e({alpha n^2} beta n).
inline NilcharSpec degrank32_bracket_spec(const Rational& a, const Rational& b)
{
    auto s = catalog("heisenberg_degrank32");
    std::map<Point, GroupElement> samples;
    for (long n = 0; n <= 3; ++n)
        samples.emplace(Point{n}, mul(GroupElement::basis(s, 1, b * Rational(n)), GroupElement::basis(s, 0, a * Rational(n * n))));
    auto g = taylor_extract(samples, s, default_J(s, 1));
    return unsmoothed_spec(g, VerticalChar(s, FiltIndex::degree_rank(3, 2), {-1}));
}

/// The multidegree (1,1) orbit a1^{alpha n1} a2^{beta n1} b1^{alpha n2}
/// b2^{beta n2} c12^{-alpha beta n1 n2} with eta(c12^t) = -t.
inline NilcharSpec appc_bracket_spec(const Rational& a, const Rational& b)
{
    auto s = catalog("appC_multidegree");
    auto f = [&](const Point& n) {
        Rational n1(n[0]), n2(n[1]);
        return product({GroupElement::basis(s, 0, a * n1), GroupElement::basis(s, 1, b * n1), GroupElement::basis(s, 3, a * n2),
                        GroupElement::basis(s, 4, b * n2), GroupElement::basis(s, 6, -a * b * n1 * n2)});
    };
    std::map<Point, GroupElement> samples;
    for (const auto& n : box_grid(2, 1)) samples.emplace(n, f(n));
    auto g = taylor_extract(samples, s, default_J(s, 2));
    return unsmoothed_spec(g, VerticalChar(s, FiltIndex::multi({1, 1}), {-1}));
}

/// 2{alpha n} beta n - {alpha n}{beta n}.
inline BracketExpr appc_diagonal_expr(const Rational& a, const Rational& b)
{
    using E = BracketExpr;
    auto fa = E::frac(E::constant(a) * E::var(0));
    auto fb = E::frac(E::constant(b) * E::var(0));
    return E::sum({E::product({E::constant(Rational(2)), fa, E::constant(b), E::var(0)}), E::product({E::constant(Rational(-1)), fa, fb})});
}

/// (1/2){alpha n0} beta n1 + (1/2){alpha n1} beta n0.
inline BracketExpr symmetrized_bracket(const Rational& a, const Rational& b)
{
    using E = BracketExpr;
    auto half = E::constant(Rational(1, 2));
    return E::sum({E::product({half, E::frac(E::constant(a) * E::var(0)), E::constant(b), E::var(1)}),
                   E::product({half, E::frac(E::constant(a) * E::var(1)), E::constant(b), E::var(0)})});
}

} // namespace nilcalc
