#pragma once

#include "nilcalc/scalar.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilcalc {

constexpr std::size_t max_relation_length = 8;

namespace freqreg_detail {

/// Walks nonzero integer vectors with |a|_inf = h and |a|_1 = l1, first nonzero entry positive,
/// in ascending lexicographic order. Stops when visit returns true.
struct ShellWalker {
    const std::vector<double>& xd;
    long h;
    long l1;
    double tol;
    std::vector<long> a;
    const std::function<bool(const std::vector<long>&)>& accept;

    bool go(std::size_t i, long used, bool hit_h, bool seen_nonzero, double partial)
    {
        const std::size_t m = a.size();
        const long left = l1 - used;
        if (i == m) {
            if (left != 0 || !hit_h || !seen_nonzero) return false;
            double t = partial - std::round(partial);
            if (std::abs(t) > tol) return false;
            return accept(a);
        }
        // Remaining slots must absorb `left` with entries in [-h, h].
        const long cap = static_cast<long>(m - i - 1) * h;
        const long lo = seen_nonzero ? -h : 0;
        for (long v = lo; v <= h; ++v) {
            const long av = std::labs(v);
            if (av > left || left - av > cap) continue;
            if (i + 1 == m && !(hit_h || av == h)) continue;
            a[i] = v;
            if (go(i + 1, used + av, hit_h || av == h, seen_nonzero || v != 0, partial + static_cast<double>(v) * xd[i])) return true;
        }
        a[i] = 0;
        return false;
    }
};

inline Rational dot(const std::vector<long>& a, const std::vector<TorusPoint>& xs)
{
    Rational t;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0) t += Rational(a[i]) * xs[i].value();
    return t;
}

} // namespace freqreg_detail

/// First nonzero a with |a|_inf <= H and ||a.xs|| <= eps, ordered by |a|_inf, then |a|_1,
/// then lexicographically; the first nonzero entry of a is positive.
inline std::optional<std::vector<long>> find_relation(const std::vector<TorusPoint>& xs, const Rational& eps, long H)
{
    if (xs.size() > max_relation_length)
        throw std::invalid_argument("find_relation: " + std::to_string(xs.size()) + " frequencies exceed the exhaustive-search cap of "
                                    + std::to_string(max_relation_length));
    if (eps.sign() < 0) throw std::invalid_argument("find_relation: eps >= 0");
    if (H < 1) throw std::invalid_argument("find_relation: H >= 1");
    if (xs.empty()) return std::nullopt;

    std::vector<double> xd;
    for (const auto& x : xs) xd.push_back(x.to_double());
    std::optional<std::vector<long>> found;
    const std::function<bool(const std::vector<long>&)> accept = [&](const std::vector<long>& a) {
        if (torus_norm(freqreg_detail::dot(a, xs)) <= eps) {
            found = a;
            return true;
        }
        return false;
    };
    const double tol = eps.to_double() + 1e-9;
    const long m = static_cast<long>(xs.size());
    for (long h = 1; h <= H; ++h)
        for (long l1 = h; l1 <= m * h; ++l1) {
            freqreg_detail::ShellWalker w{xd, h, l1, tol, std::vector<long>(xs.size(), 0), accept};
            if (w.go(0, 0, false, false, 0.0)) return found;
        }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

struct FrequencyDecomposition {
    std::vector<TorusPoint> independent;
    std::vector<TorusPoint> rational;
    std::vector<TorusPoint> small;
    /// Row k expresses input k over independent ++ rational ++ small.
    std::vector<std::vector<long>> representation;
    Rational eps;
    long H = 0;
    long Q = 0;
    /// Largest denominator among the rational outputs; within_Q records whether it is <= Q.
    mpz_class max_denominator = 1;
    bool within_Q = true;
    std::size_t steps = 0;

    std::vector<TorusPoint> outputs() const
    {
        std::vector<TorusPoint> out = independent;
        out.insert(out.end(), rational.begin(), rational.end());
        out.insert(out.end(), small.begin(), small.end());
        return out;
    }

    std::string str() const
    {
        std::ostringstream os;
        auto list = [&](const char* name, const std::vector<TorusPoint>& v) {
            os << name << " = [";
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
            os << "]\n";
        };
        list("independent", independent);
        list("rational", rational);
        list("small", small);
        os << "representation:\n";
        for (const auto& row : representation) {
            os << " ";
            for (long c : row) os << " " << c;
            os << "\n";
        }
        os << "scope: eps=" << eps << " H=" << H << " Q=" << Q << " steps=" << steps << " max_denominator=" << max_denominator
           << (within_Q ? "" : " (exceeds Q)") << "\n";
        return os.str();
    }
};

/// Each input equals its row of the representation applied to the outputs, exactly mod 1.
inline bool representation_holds(const std::vector<TorusPoint>& xs, const FrequencyDecomposition& d)
{
    const auto out = d.outputs();
    if (d.representation.size() != xs.size()) return false;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (d.representation[k].size() != out.size()) return false;
        Rational t = -xs[k].value();
        for (std::size_t j = 0; j < out.size(); ++j) t += Rational(d.representation[k][j]) * out[j].value();
        if (!t.is_integer()) return false;
    }
    return true;
}

inline FrequencyDecomposition regularize(const std::vector<TorusPoint>& xs, const Rational& eps, long H = 10, long Q = 64)
{
    if (xs.size() > max_relation_length)
        throw std::invalid_argument("regularize: " + std::to_string(xs.size()) + " frequencies exceed the exhaustive-search cap of "
                                    + std::to_string(max_relation_length));
    if (Q < 1) throw std::invalid_argument("regularize: Q >= 1");

    // Atoms carry ids so input rows survive reindexing; kind 0/1/2 = independent/rational/small.
    struct Atom {
        TorusPoint value;
        int kind;
    };
    std::vector<Atom> atoms;
    std::vector<std::size_t> live;
    std::vector<std::map<std::size_t, long>> rows(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        atoms.push_back({xs[k], 0});
        live.push_back(k);
        rows[k][k] = 1;
    }

    FrequencyDecomposition d;
    d.eps = eps;
    d.H = H;
    d.Q = Q;
    while (true) {
        std::vector<TorusPoint> cur;
        for (std::size_t id : live) cur.push_back(atoms[id].value);
        auto rel = find_relation(cur, eps, H);
        if (!rel) break;
        std::vector<long> a = *rel;

        std::size_t p = 0;
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[j] != 0 && (a[p] == 0 || std::labs(a[j]) < std::labs(a[p]))) p = j;
        if (a[p] < 0)
            for (auto& v : a) v = -v;
        const long ap = a[p];

        // a.rep = r + m with r in I0; then rep(x_p) = r/ap + m/ap - sum_{j != p} a_j rep(x_j)/ap.
        const Rational t = freqreg_detail::dot(a, cur);
        const Rational r = signed_frac(t);
        const Rational m = t - r;
        const TorusPoint s(r / Rational(ap));
        const TorusPoint qv(m / Rational(ap));

        // x_j = div_j * y_j with div_j = ap / gcd(a_j, ap) and y_j = rep(x_j) / div_j, so that
        // (a_j / ap) rep(x_j) = (a_j / g_j) y_j is an integer multiple. a_j = 0 leaves x_j as is.
        std::map<std::size_t, std::pair<std::size_t, long>> renamed;
        std::vector<long> reduced(a.size(), 0);
        std::vector<std::size_t> next_live;
        for (std::size_t j = 0; j < live.size(); ++j) {
            if (j == p) continue;
            const long g = std::gcd(std::labs(a[j]), ap);
            const long div = ap / g;
            reduced[j] = a[j] / g;
            std::size_t id = live[j];
            if (div != 1) {
                atoms.push_back({TorusPoint(cur[j].value() / Rational(div)), 0});
                id = atoms.size() - 1;
                renamed[live[j]] = {id, div};
            }
            next_live.push_back(id);
        }
        std::optional<std::size_t> q_id, s_id;
        if (!qv.value().is_zero()) {
            atoms.push_back({qv, 1});
            q_id = atoms.size() - 1;
        }
        if (!s.value().is_zero()) {
            atoms.push_back({s, 2});
            s_id = atoms.size() - 1;
        }

        const std::size_t pid = live[p];
        for (auto& row : rows) {
            std::map<std::size_t, long> nr;
            for (const auto& [id, c] : row) {
                if (id == pid) {
                    for (std::size_t j = 0; j < live.size(); ++j)
                        if (j != p && reduced[j] != 0) nr[next_live[j < p ? j : j - 1]] -= c * reduced[j];
                    if (q_id) nr[*q_id] += c;
                    if (s_id) nr[*s_id] += c;
                } else if (auto it = renamed.find(id); it != renamed.end()) {
                    nr[it->second.first] += c * it->second.second;
                } else {
                    nr[id] += c;
                }
            }
            row.clear();
            for (const auto& [id, c] : nr)
                if (c != 0) row[id] = c;
        }
        if (next_live.size() >= live.size()) throw std::logic_error("regularize: descent did not decrease the independent count");
        live = std::move(next_live);
        ++d.steps;
    }

    std::vector<std::size_t> order;
    for (std::size_t id : live) {
        d.independent.push_back(atoms[id].value);
        order.push_back(id);
    }
    for (int kind = 1; kind <= 2; ++kind)
        for (std::size_t id = 0; id < atoms.size(); ++id)
            if (atoms[id].kind == kind) {
                (kind == 1 ? d.rational : d.small).push_back(atoms[id].value);
                order.push_back(id);
            }
    for (const auto& row : rows) {
        std::vector<long> out(order.size(), 0);
        for (std::size_t j = 0; j < order.size(); ++j)
            if (auto it = row.find(order[j]); it != row.end()) out[j] = it->second;
        d.representation.push_back(std::move(out));
    }
    for (const auto& q : d.rational) d.max_denominator = std::max(d.max_denominator, q.value().denominator());
    d.within_Q = d.max_denominator <= Q;
    return d;
}

/// Deterministic benchmark inputs: lists of 1 to 5 frequencies, each a small
/// rational plus a random integer combination of three fixed generic
/// frequencies plus a perturbation of at most 2e-5.
inline std::vector<std::vector<TorusPoint>> regularization_suite(std::uint64_t seed = 42, std::size_t count = 30)
{
    std::vector<std::vector<TorusPoint>> suite;
    std::mt19937_64 rng(seed);
    const std::vector<Rational> base = {Rational(14930352L, 24157817L), Rational(22619537L, 54608393L), Rational(1607521L, 3880899L)};
    const std::vector<Rational> rats = {Rational(0), Rational(1, 2), Rational(1, 3), Rational(2, 5), Rational(3, 8)};
    std::uniform_int_distribution<int> len(1, 5), coeff(-3, 3), pick_r(0, 4), which(0, 3);
    std::uniform_int_distribution<long> wiggle(-2, 2);
    while (suite.size() < count) {
        std::vector<TorusPoint> xs;
        const int m = len(rng);
        for (int i = 0; i < m; ++i) {
            Rational x = rats[static_cast<std::size_t>(pick_r(rng))];
            for (const auto& b : base)
                if (which(rng) == 0) x += Rational(coeff(rng)) * b;
            x += Rational(wiggle(rng), 100000);
            xs.push_back(TorusPoint(x));
        }
        suite.push_back(std::move(xs));
    }
    return suite;
}

} // namespace nilcalc
