#pragma once

// Nilpotent Lie algebras over Q on an ordered basis u_0..u_{m-1} whose
// brackets are triangular: [u_i, u_j] lies in span{u_k : k > max(i, j)}.
// Every suffix span is then an ideal, which is what makes coordinates of the
// second kind and the peeling conversion below well defined.

#include "nilcalc/scalar.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilcalc {

using Coords = std::vector<Rational>;

namespace linalg {

inline bool is_zero(const Coords& v)
{
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

inline void axpy(Coords& y, const Rational& a, const Coords& x)
{
    if (a.is_zero()) return;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (!x[k].is_zero()) y[k] += a * x[k];
}

inline Coords scaled(Coords v, const Rational& a)
{
    for (auto& x : v)
        if (!x.is_zero()) x *= a;
    return v;
}

/// Row echelon form, in place. Returns the pivot column of each kept row.
inline std::vector<std::size_t> echelon(std::vector<Coords>& rows)
{
    std::vector<std::size_t> pivots;
    if (rows.empty()) return pivots;
    const std::size_t cols = rows.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c].is_zero()) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        Rational inv = Rational(1) / rows[r][c];
        rows[r] = scaled(rows[r], inv);
        for (std::size_t q = 0; q < rows.size(); ++q)
            if (q != r && !rows[q][c].is_zero()) axpy(rows[q], -rows[q][c], rows[r]);
        pivots.push_back(c);
        ++r;
    }
    rows.resize(r);
    return pivots;
}

inline std::size_t rank(std::vector<Coords> rows) { return echelon(rows).size(); }

/// Coefficients c with sum_i c_i * basis[i] = target, or nullopt if target is
/// outside the span. basis must be linearly independent.
inline std::optional<Coords> solve_in_span(const std::vector<Coords>& basis, const Coords& target)
{
    const std::size_t n = basis.size();
    const std::size_t dim = target.size();
    // Augmented system: columns are basis vectors, one row per coordinate.
    std::vector<Coords> rows(dim, Coords(n + 1));
    for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t i = 0; i < n; ++i) rows[k][i] = basis[i][k];
        rows[k][n] = target[k];
    }
    auto piv = echelon(rows);
    Coords sol(n);
    for (std::size_t r = 0; r < piv.size(); ++r) {
        if (piv[r] == n) return std::nullopt;
        sol[piv[r]] = rows[r][n];
    }
    return sol;
}

} // namespace linalg

/// A sparse structure-constant table with the triangular property.
class LieAlgebra {
public:
    struct Term {
        int k;
        Rational c;
    };

    LieAlgebra() = default;

    /// brackets maps (i, j) with i < j to the coordinate vector of [u_i, u_j].
    LieAlgebra(int dim, const std::map<std::pair<int, int>, Coords>& brackets) : m_(dim)
    {
        if (dim <= 0) throw std::invalid_argument("LieAlgebra: dimension must be positive");
        table_.assign(static_cast<std::size_t>(dim * dim), {});
        for (const auto& [ij, v] : brackets) {
            auto [i, j] = ij;
            if (i < 0 || j >= dim || i >= j) throw std::invalid_argument("LieAlgebra: bracket key must satisfy 0 <= i < j < m");
            if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("LieAlgebra: bracket vector has wrong length");
            auto& slot = table_[static_cast<std::size_t>(i * dim + j)];
            for (int k = 0; k < dim; ++k) {
                if (v[k].is_zero()) continue;
                if (k <= j)
                    throw std::invalid_argument("LieAlgebra: [u_" + std::to_string(i) + ", u_" + std::to_string(j)
                                                + "] has a component on position " + std::to_string(k)
                                                + ", not strictly after both");
                slot.push_back(Term{k, v[k]});
            }
        }
        class_ = compute_class();
    }

    int dim() const { return m_; }
    int nilpotency_class() const { return class_; }

    Coords basis_bracket(int i, int j) const
    {
        Coords out(m_);
        if (i == j) return out;
        int a = std::min(i, j), b = std::max(i, j);
        Rational s = i < j ? Rational(1) : Rational(-1);
        for (const auto& t : table_[static_cast<std::size_t>(a * m_ + b)]) out[t.k] = s * t.c;
        return out;
    }

    std::map<std::pair<int, int>, Coords> brackets() const
    {
        std::map<std::pair<int, int>, Coords> out;
        for (int i = 0; i < m_; ++i)
            for (int j = i + 1; j < m_; ++j)
                if (!table_[static_cast<std::size_t>(i * m_ + j)].empty()) out[{i, j}] = basis_bracket(i, j);
        return out;
    }

    Coords bracket(const Coords& x, const Coords& y) const
    {
        Coords out(m_);
        for (int i = 0; i < m_; ++i) {
            if (x[i].is_zero()) continue;
            for (int j = 0; j < m_; ++j) {
                if (i == j || y[j].is_zero()) continue;
                int a = std::min(i, j), b = std::max(i, j);
                const auto& terms = table_[static_cast<std::size_t>(a * m_ + b)];
                if (terms.empty()) continue;
                Rational w = x[i] * y[j];
                if (i > j) w = -w;
                for (const auto& t : terms) out[t.k] += w * t.c;
            }
        }
        return out;
    }

    /// log(exp X exp Y), exact because brackets of length > class vanish.
    Coords bch(const Coords& x, const Coords& y) const
    {
        Coords z = x;
        for (int k = 0; k < m_; ++k) z[k] += y[k];
        if (class_ < 2) return z;
        Coords xy = bracket(x, y);
        if (linalg::is_zero(xy)) return z;
        linalg::axpy(z, Rational(1, 2), xy);
        if (class_ < 3) return z;
        Coords xxy = bracket(x, xy);
        linalg::axpy(z, Rational(1, 12), xxy);
        linalg::axpy(z, Rational(-1, 12), bracket(y, xy));
        if (class_ < 4) return z;
        linalg::axpy(z, Rational(-1, 24), bracket(y, xxy));
        return z;
    }

    /// Lie coordinates of exp(t_0 u_0) ... exp(t_{m-1} u_{m-1}).
    Coords log_of_second_kind(const Coords& t) const
    {
        Coords z(m_);
        Coords step(m_);
        for (int k = 0; k < m_; ++k) {
            if (t[k].is_zero()) continue;
            step.assign(m_, Rational{});
            step[k] = t[k];
            z = bch(z, step);
        }
        return z;
    }

    /// Inverse of log_of_second_kind: peel off exp(t_k u_k) from the left.
    Coords second_kind_of_log(Coords z) const
    {
        Coords t(m_);
        Coords step(m_);
        for (int k = 0; k < m_; ++k) {
            if (z[k].is_zero()) continue;
            t[k] = z[k];
            step.assign(m_, Rational{});
            step[k] = -t[k];
            z = bch(step, z);
        }
        return t;
    }

    /// First Jacobi failure (i, j, k) among basis triples, if any.
    std::optional<std::array<int, 3>> jacobi_violation() const
    {
        auto unit = [&](int i) {
            Coords v(m_);
            v[i] = 1;
            return v;
        };
        for (int i = 0; i < m_; ++i)
            for (int j = i + 1; j < m_; ++j)
                for (int k = j + 1; k < m_; ++k) {
                    Coords a = bracket(unit(i), basis_bracket(j, k));
                    Coords b = bracket(unit(j), basis_bracket(k, i));
                    Coords c = bracket(unit(k), basis_bracket(i, j));
                    for (int q = 0; q < m_; ++q)
                        if (!(a[q] + b[q] + c[q]).is_zero()) return std::array<int, 3>{i, j, k};
                }
        return std::nullopt;
    }

private:
    // Length of the lower central series: L_1 = g, L_{n+1} = [g, L_n].
    int compute_class() const
    {
        std::vector<Coords> layer;
        for (int i = 0; i < m_; ++i) {
            Coords v(m_);
            v[i] = 1;
            layer.push_back(v);
        }
        int c = 0;
        while (!layer.empty()) {
            ++c;
            if (c > m_ + 1) throw std::logic_error("LieAlgebra: lower central series did not terminate");
            std::vector<Coords> next;
            for (int i = 0; i < m_; ++i) {
                Coords ui(m_);
                ui[i] = 1;
                for (const auto& w : layer) {
                    Coords b = bracket(ui, w);
                    if (!linalg::is_zero(b)) next.push_back(std::move(b));
                }
            }
            linalg::echelon(next);
            layer = std::move(next);
        }
        return c;
    }

    int m_ = 0;
    int class_ = 1;
    std::vector<std::vector<Term>> table_;
};

} // namespace nilcalc
