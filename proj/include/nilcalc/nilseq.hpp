#pragma once

// Nilcharacters chi(n) = F(g(n) Gamma) with vector-valued F built from a
// partition of unity over the horizontal torus.
//
// Chart coordinates are the horizontal positions that are not vertical (not in
// G_d). For a chart centred at theta the representative of x Gamma is the
// unique point whose chart coordinates lie in theta + I0 and whose remaining
// coordinates lie in I0; its component is phi_k * e(eta(rep)).

#include "nilcalc/catalog.hpp"
#include "nilcalc/nilgroup.hpp"
#include "nilcalc/polyseq.hpp"
#include "nilcalc/scalar.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilcalc {

// ---------------------------------------------------------------------------
// Atlas
// ---------------------------------------------------------------------------

/// Euclidean distance on T^h.
inline double torus_euclid(const std::vector<double>& y, const std::vector<double>& c)
{
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double d = y[i] - c[i];
        d -= std::round(d);
        s += d * d;
    }
    return std::sqrt(s);
}

inline std::vector<double> to_doubles(const std::vector<Rational>& y)
{
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& v : y) out.push_back(v.to_double());
    return out;
}

/// Product of chart families, each on a consecutive block of chart
/// coordinates. Chart indices are row-major over the factors, matching
/// tensor(). A factor is either a radial grid (smoothed) or the single
/// unsmoothed chart centred at 0.
class SmoothingAtlas {
public:
    struct Factor {
        int h = 0;
        bool smoothed = false;
        Rational radius{1, 2};
        std::vector<std::vector<Rational>> centers;
        std::vector<std::vector<double>> centers_d;
    };

    static constexpr std::size_t max_charts = 4096;

    static SmoothingAtlas single_chart(int h)
    {
        if (h < 0) throw std::invalid_argument("atlas: negative dimension");
        Factor f;
        f.h = h;
        f.centers.push_back(std::vector<Rational>(static_cast<std::size_t>(h)));
        f.centers_d.push_back(std::vector<double>(static_cast<std::size_t>(h)));
        return SmoothingAtlas({f});
    }

    /// Centres on the grid (1/M) Z^h with the least M such that every point
    /// is strictly within radius of a centre: sqrt(h) / (2M) < radius.
    static SmoothingAtlas grid(int h, const Rational& radius = Rational(1, 10))
    {
        if (h < 0) throw std::invalid_argument("atlas: negative dimension");
        if (radius.sign() <= 0 || radius > Rational(1, 8)) throw std::invalid_argument("atlas: chart radius must lie in (0, 1/8]");
        Factor f;
        f.h = h;
        f.smoothed = true;
        f.radius = radius;
        long M = 1;
        while (std::sqrt(static_cast<double>(h)) / (2.0 * static_cast<double>(M)) >= radius.to_double()) ++M;
        std::size_t count = 1;
        for (int i = 0; i < h; ++i) {
            count *= static_cast<std::size_t>(M);
            if (count > max_charts)
                throw std::invalid_argument("atlas: a radius " + radius.str() + " grid on T^" + std::to_string(h) + " needs more than " +
                                            std::to_string(max_charts) + " charts; use the single-chart mode");
        }
        std::vector<long> idx(static_cast<std::size_t>(h), 0);
        for (std::size_t c = 0; c < count; ++c) {
            std::vector<Rational> center;
            for (long v : idx) center.push_back(signed_frac(Rational(v, M)));
            f.centers_d.push_back(to_doubles(center));
            f.centers.push_back(std::move(center));
            for (std::size_t a = idx.size(); a-- > 0;) {
                if (++idx[a] < M) break;
                idx[a] = 0;
            }
        }
        return SmoothingAtlas({f});
    }

    static SmoothingAtlas product(const SmoothingAtlas& a, const SmoothingAtlas& b)
    {
        auto fs = a.factors_;
        fs.insert(fs.end(), b.factors_.begin(), b.factors_.end());
        return SmoothingAtlas(std::move(fs));
    }

    const std::vector<Factor>& factors() const { return factors_; }

    int dim() const
    {
        int h = 0;
        for (const auto& f : factors_) h += f.h;
        return h;
    }

    std::size_t charts() const
    {
        std::size_t n = 1;
        for (const auto& f : factors_) n *= f.centers.size();
        return n;
    }

    bool smoothed() const
    {
        for (const auto& f : factors_)
            if (f.smoothed) return true;
        return false;
    }

    /// Centre of chart k over all chart coordinates.
    std::vector<Rational> center(std::size_t k) const
    {
        std::vector<std::size_t> digits(factors_.size());
        for (std::size_t i = factors_.size(); i-- > 0;) {
            digits[i] = k % factors_[i].centers.size();
            k /= factors_[i].centers.size();
        }
        std::vector<Rational> out;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            const auto& c = factors_[i].centers[digits[i]];
            out.insert(out.end(), c.begin(), c.end());
        }
        return out;
    }

    /// phi_k(y) for every chart; the squares sum to 1.
    std::vector<double> weights(const std::vector<Rational>& y) const
    {
        if (static_cast<int>(y.size()) != dim()) throw std::invalid_argument("atlas: point of wrong dimension");
        return weights_d(to_doubles(y));
    }

    std::vector<double> weights_d(const std::vector<double>& y) const
    {
        std::vector<double> out{1.0};
        std::size_t off = 0;
        for (const auto& f : factors_) {
            std::vector<double> block(y.begin() + static_cast<long>(off), y.begin() + static_cast<long>(off + static_cast<std::size_t>(f.h)));
            off += static_cast<std::size_t>(f.h);
            std::vector<double> w = factor_weights(f, block);
            std::vector<double> next;
            next.reserve(out.size() * w.size());
            for (double a : out)
                for (double b : w) next.push_back(a * b);
            out = std::move(next);
        }
        return out;
    }

    struct Report {
        bool pass = true;
        std::string detail;
        double max_weight_error = 0.0;
    };

    /// Coverage on a grid of mesh r/4 and sum of squares at 10^4 points.
    Report verify(std::uint64_t seed = 1) const
    {
        Report rep;
        for (const auto& f : factors_) {
            if (!f.smoothed) continue;
            if (f.radius > Rational(1, 8)) return fail(rep, "chart radius exceeds 1/8");
            long steps = (Rational(4) / f.radius).ceil().get_si();
            std::size_t total = 1;
            for (int i = 0; i < f.h; ++i) total *= static_cast<std::size_t>(steps);
            std::vector<long> idx(static_cast<std::size_t>(f.h), 0);
            for (std::size_t c = 0; c < total; ++c) {
                std::vector<double> p;
                for (long v : idx) p.push_back(static_cast<double>(v) / static_cast<double>(steps));
                double best = 1.0;
                for (const auto& ctr : f.centers_d) best = std::min(best, torus_euclid(p, ctr));
                if (!(best < f.radius.to_double())) return fail(rep, "coverage gap near a grid point");
                for (std::size_t a = 0; a < idx.size(); ++a) {
                    if (++idx[a] < steps) break;
                    idx[a] = 0;
                }
            }
        }
        std::mt19937_64 rng(seed);
        for (int t = 0; t < 10000; ++t) {
            std::uniform_real_distribution<double> u(-0.5, 0.5);
            std::vector<double> y;
            for (int i = 0; i < dim(); ++i) y.push_back(u(rng));
            double s = 0.0;
            for (double w : weights_d(y)) s += w * w;
            rep.max_weight_error = std::max(rep.max_weight_error, std::abs(s - 1.0));
        }
        if (rep.max_weight_error > 1e-12) return fail(rep, "weights do not square-sum to 1");
        return rep;
    }

private:
    explicit SmoothingAtlas(std::vector<Factor> fs) : factors_(std::move(fs)) {}

    static Report fail(Report rep, std::string why)
    {
        rep.pass = false;
        rep.detail = std::move(why);
        return rep;
    }

    static std::vector<double> factor_weights(const Factor& f, const std::vector<double>& y)
    {
        if (!f.smoothed) return {1.0};
        const double r = f.radius.to_double();
        std::vector<double> b(f.centers.size(), 0.0);
        double total = 0.0;
        for (std::size_t k = 0; k < f.centers.size(); ++k) {
            double d = torus_euclid(y, f.centers_d[k]) / r;
            if (d < 1.0) {
                double c = std::cos(std::numbers::pi * d / 2.0);
                b[k] = c * c;
                total += b[k];
            }
        }
        if (total <= 0.0) throw std::logic_error("atlas: coverage gap");
        for (auto& v : b) v = v > 0.0 ? std::sqrt(v / total) : 0.0;
        return b;
    }

    std::vector<Factor> factors_;
};

// ---------------------------------------------------------------------------
// Nilcharacters
// ---------------------------------------------------------------------------

/// Horizontal positions outside G_d: the coordinates the atlas lives on.
inline std::vector<int> chart_positions(const NilSchema& s, const FiltIndex& d)
{
    const auto& vert = s.positions(d);
    std::vector<int> out;
    for (int p : s.horizontal_positions())
        if (!std::binary_search(vert.begin(), vert.end(), p)) out.push_back(p);
    return out;
}

struct NilcharSpec {
    SchemaPtr schema;
    PolySeq orbit;
    VerticalChar eta;
    SmoothingAtlas atlas;

    /// Checks schema agreement, eta on the top index, G_d central and the
    /// atlas dimension.
    void validate() const
    {
        if (orbit.schema() != schema || eta.schema() != schema) throw std::invalid_argument("nilchar: orbit or eta on a different schema");
        if (!(eta.index().normalized() == schema->top_index().normalized()))
            throw std::invalid_argument("nilchar: vertical character must live on the top index " + schema->top_index().str());
        const auto& vert = schema->positions(eta.index());
        for (const auto& [ij, w] : schema->table())
            if ((std::binary_search(vert.begin(), vert.end(), ij.first) || std::binary_search(vert.begin(), vert.end(), ij.second)) &&
                !linalg::is_zero(w))
                throw std::invalid_argument("nilchar: G_" + eta.index().str() + " is not central");
        if (atlas.dim() != static_cast<int>(chart_positions(*schema, eta.index()).size()))
            throw std::invalid_argument("nilchar: atlas dimension " + std::to_string(atlas.dim()) + " does not match " +
                                        std::to_string(chart_positions(*schema, eta.index()).size()) + " chart coordinates");
    }

    std::size_t output_dim() const { return atlas.charts(); }
};

/// Single unsmoothed chart: F(x) = e(eta(reduced x)).
inline NilcharSpec unsmoothed_spec(const PolySeq& orbit, const VerticalChar& eta)
{
    NilcharSpec s{orbit.schema(), orbit, eta, SmoothingAtlas::single_chart(static_cast<int>(chart_positions(*orbit.schema(), eta.index()).size()))};
    s.validate();
    return s;
}

inline NilcharSpec smoothed_spec(const PolySeq& orbit, const VerticalChar& eta, const Rational& radius = Rational(1, 10))
{
    NilcharSpec s{orbit.schema(), orbit, eta, SmoothingAtlas::grid(static_cast<int>(chart_positions(*orbit.schema(), eta.index()).size()), radius)};
    s.validate();
    return s;
}

/// Representative of x Gamma with coordinate p in offsets[p] + I0 for every p.
inline GroupElement reduce_into_box(const GroupElement& x, const Coords& offsets)
{
    GroupElement cur = x;
    for (int i = 0; i < x.dim(); ++i) {
        mpz_class k = nearest_integer(cur[i] - offsets[static_cast<std::size_t>(i)]);
        if (k != 0) cur = mul(cur, GroupElement::basis(x.schema(), i, -Rational(k)));
    }
    return cur;
}

struct NilcharValue {
    PhaseVector value;
    bool flagged = false;  // a discontinuity of F lies within 1e-6
};

inline const Rational& boundary_tolerance()
{
    static const Rational tol(1, 1000000);
    return tol;
}

/// F evaluated at the coset x Gamma.
inline NilcharValue eval_F(const NilcharSpec& spec, const GroupElement& x)
{
    const NilSchema& s = *spec.schema;
    const auto charts = chart_positions(s, spec.eta.index());
    const auto& vert = s.positions(spec.eta.index());
    GroupElement red = reduce_mod_lattice(x).reduced;
    std::vector<Rational> y;
    for (int p : charts) y.push_back(red[p]);

    NilcharValue out;
    // Discontinuities: non-chart, non-vertical coordinates always; chart
    // coordinates only in unsmoothed factors.
    std::vector<char> smooth_coord(static_cast<std::size_t>(s.dim()), 0);
    {
        std::size_t off = 0;
        for (const auto& f : spec.atlas.factors()) {
            for (int i = 0; i < f.h; ++i) smooth_coord[static_cast<std::size_t>(charts[off + static_cast<std::size_t>(i)])] = f.smoothed;
            off += static_cast<std::size_t>(f.h);
        }
    }
    static const Rational half(1, 2);
    for (int p = 0; p < s.dim(); ++p) {
        if (std::binary_search(vert.begin(), vert.end(), p) || smooth_coord[static_cast<std::size_t>(p)]) continue;
        if (torus_dist(red[p], half) < boundary_tolerance()) out.flagged = true;
    }

    const auto w = spec.atlas.weights(y);
    std::vector<PhaseEntry> entries(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] == 0.0) continue;
        Coords off(static_cast<std::size_t>(s.dim()));
        auto c = spec.atlas.center(k);
        for (std::size_t i = 0; i < charts.size(); ++i) off[static_cast<std::size_t>(charts[i])] = c[i];
        GroupElement rep = reduce_into_box(red, off);
        entries[k] = PhaseEntry{w[k], TorusPoint(spec.eta(rep))};
    }
    out.value = PhaseVector(std::move(entries));
    return out;
}

inline NilcharValue eval_nilchar(const NilcharSpec& spec, const Point& n) { return eval_F(spec, spec.orbit(n)); }

struct EquivarianceReport {
    bool exact = true;
    double max_discrepancy = 0.0;
    int trials = 0;
};

/// Compares F(g_d x) with e(eta'(g_d)) F(x) for random central g_d and x,
/// where eta' is the claimed frequency (the spec's own by default).
inline EquivarianceReport verify_equivariance(const NilcharSpec& spec, int trials, std::uint64_t seed = 3,
                                              const std::optional<VerticalChar>& claimed = std::nullopt)
{
    const VerticalChar& eta = claimed ? *claimed : spec.eta;
    const auto& vert = spec.schema->positions(spec.eta.index());
    std::mt19937_64 rng(seed);
    EquivarianceReport rep;
    for (int t = 0; t < trials; ++t) {
        GroupElement gd = sample_element(spec.schema, rng, 3, 7, vert);
        GroupElement x = sample_element(spec.schema, rng, 3, 7);
        auto lhs = eval_F(spec, mul(gd, x)).value;
        auto rhs = eval_F(spec, x).value.rotated(TorusPoint(eta(gd)));
        ++rep.trials;
        if (!(lhs == rhs)) rep.exact = false;
        auto a = lhs.to_complex(), b = rhs.to_complex();
        for (std::size_t i = 0; i < a.size(); ++i) rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(a[i] - b[i]));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Linear lift on the skew torus
// ---------------------------------------------------------------------------

/// n(n+1)/2 alpha + n beta + gamma mod 1.
inline TorusPoint linear_lift_closed(const TorusPoint& alpha, const TorusPoint& beta, const TorusPoint& gamma, long n)
{
    return TorusPoint(Rational(n * (n + 1) / 2) * alpha.value() + Rational(n) * beta.value() + gamma.value());
}

/// Iterates x -> g~ x on the Heisenberg nilmanifold from x~ = c^gamma with
/// g~ = e2 e1^{-alpha} c^beta, reducing each step, and reads the c-coordinate
/// of the representative e1^{t1} c^{t12}. Entry n holds the point after n steps.
inline std::vector<TorusPoint> linear_lift_orbit(const TorusPoint& alpha, const TorusPoint& beta, const TorusPoint& gamma, long n_max)
{
    if (n_max < 0) throw std::invalid_argument("linear_lift: n must be nonnegative");
    auto s = catalog("heisenberg");
    GroupElement g = mul(mul(GroupElement::basis(s, 1), GroupElement::basis(s, 0, -alpha.value())), GroupElement::basis(s, 2, beta.value()));
    GroupElement x = GroupElement::basis(s, 2, gamma.value());
    std::vector<TorusPoint> out;
    for (long i = 0;; ++i) {
        if (!x[1].is_zero()) throw std::logic_error("linear_lift: orbit left the subtorus K");
        out.emplace_back(x[2]);
        if (i == n_max) break;
        x = reduce_mod_lattice(mul(g, x)).reduced;
    }
    return out;
}

inline TorusPoint linear_lift_eval(const TorusPoint& alpha, const TorusPoint& beta, const TorusPoint& gamma, long n)
{
    return linear_lift_orbit(alpha, beta, gamma, n).back();
}

} // namespace nilcalc
