#pragma once

#include "nilcalc/scalar.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilcalc {

using cplx = std::complex<double>;

/// f : [N] -> C^D, zero outside [N]. values[n-1] holds f(n).
class SampledFunction {
public:
    using Vec = std::vector<cplx>;

    SampledFunction(long N, int D, std::vector<Vec> values) : N_(N), D_(D), values_(std::move(values))
    {
        if (N_ < 1) throw std::invalid_argument("SampledFunction: N >= 1");
        if (D_ < 1) throw std::invalid_argument("SampledFunction: D >= 1");
        if (static_cast<long>(values_.size()) != N_) throw std::invalid_argument("SampledFunction: need N samples");
        for (const auto& v : values_) {
            if (static_cast<int>(v.size()) != D_) throw std::invalid_argument("SampledFunction: ragged samples");
            double m = 0;
            for (const auto& z : v) m += std::norm(z);
            sup_ = std::max(sup_, std::sqrt(m));
        }
    }

    static SampledFunction scalar(const std::vector<cplx>& v)
    {
        std::vector<Vec> out;
        out.reserve(v.size());
        for (const auto& z : v) out.push_back({z});
        return SampledFunction(static_cast<long>(v.size()), 1, std::move(out));
    }

    /// n -> e(phase(n)) on [N], phases exact until the final cos/sin.
    static SampledFunction phases(long N, const std::function<Rational(long)>& phase)
    {
        std::vector<Vec> out;
        out.reserve(static_cast<std::size_t>(N));
        for (long n = 1; n <= N; ++n) out.push_back({expi(phase(n))});
        return SampledFunction(N, 1, std::move(out));
    }

    static SampledFunction vectors(long N, const std::function<PhaseVector(long)>& chi)
    {
        std::vector<Vec> out;
        out.reserve(static_cast<std::size_t>(N));
        for (long n = 1; n <= N; ++n) {
            const PhaseVector p = chi(n);
            Vec v;
            for (const auto& e : p.entries()) v.push_back(e.value());
            out.push_back(std::move(v));
        }
        const int D = out.empty() ? 1 : static_cast<int>(out.front().size());
        return SampledFunction(N, D, std::move(out));
    }

    long N() const { return N_; }
    int D() const { return D_; }
    double sup_bound() const { return sup_; }
    const std::vector<Vec>& values() const { return values_; }

    /// Zero-extended sample.
    Vec at(long n) const { return (n >= 1 && n <= N_) ? values_[static_cast<std::size_t>(n - 1)] : Vec(static_cast<std::size_t>(D_)); }

    std::vector<cplx> component(int i) const
    {
        std::vector<cplx> out(static_cast<std::size_t>(N_));
        for (long n = 0; n < N_; ++n) out[static_cast<std::size_t>(n)] = values_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
        return out;
    }

private:
    long N_;
    int D_;
    std::vector<Vec> values_;
    double sup_ = 0;
};

/// (Delta_h f)(n) = f(n+h) (x) conj f(n); index i*D + j holds f_i(n+h) conj f_j(n).
inline SampledFunction mult_derivative(const SampledFunction& f, long h)
{
    const int D = f.D();
    std::vector<SampledFunction::Vec> out;
    out.reserve(static_cast<std::size_t>(f.N()));
    for (long n = 1; n <= f.N(); ++n) {
        const auto a = f.at(n + h), b = f.at(n);
        SampledFunction::Vec v(static_cast<std::size_t>(D * D));
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) v[static_cast<std::size_t>(i * D + j)] = a[static_cast<std::size_t>(i)] * std::conj(b[static_cast<std::size_t>(j)]);
        out.push_back(std::move(v));
    }
    return SampledFunction(f.N(), D * D, std::move(out));
}

// ---------------------------------------------------------------------------
// Cyclic transform. FFTW planning is not thread-safe, so plans are cached under a lock.

class CyclicFft {
public:
    explicit CyclicFft(std::size_t n) : n_(n)
    {
        in_ = fftw_alloc_complex(n);
        out_ = fftw_alloc_complex(n);
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~CyclicFft()
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    CyclicFft(const CyclicFft&) = delete;
    CyclicFft& operator=(const CyclicFft&) = delete;

    /// out[xi] = sum_x g(x) e(-x xi / n).
    std::vector<cplx> forward(const std::vector<cplx>& g)
    {
        for (std::size_t i = 0; i < n_; ++i) {
            in_[i][0] = g[i].real();
            in_[i][1] = g[i].imag();
        }
        fftw_execute(plan_);
        std::vector<cplx> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = {out_[i][0], out_[i][1]};
        return out;
    }

    static CyclicFft& cached(std::size_t n)
    {
        thread_local std::map<std::size_t, std::unique_ptr<CyclicFft>> cache;
        auto& slot = cache[n];
        if (!slot) slot = std::make_unique<CyclicFft>(n);
        return *slot;
    }

private:
    static std::mutex& planner_mutex()
    {
        static std::mutex m;
        return m;
    }

    std::size_t n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

// ---------------------------------------------------------------------------
// Norms on Z_M.

namespace gowers_detail {

inline bool all_zero(const std::vector<cplx>& g)
{
    for (const auto& z : g)
        if (z != cplx(0.0, 0.0)) return false;
    return true;
}

inline std::vector<cplx> cyclic_derivative(const std::vector<cplx>& g, std::size_t h)
{
    const std::size_t M = g.size();
    std::vector<cplx> out(M);
    for (std::size_t x = 0; x < M; ++x) out[x] = g[(x + h) % M] * std::conj(g[x]);
    return out;
}

} // namespace gowers_detail

/// E_{x,h} of the 2^d-fold product on Z_M, i.e. ||g||_{U^d(Z_M)}^{2^d}.
inline double group_power_average(const std::vector<cplx>& g, int d)
{
    if (d < 1) throw std::invalid_argument("u_norm: d must be >= 1");
    const double M = static_cast<double>(g.size());
    if (d == 1) return std::norm(pairwise_sum(g) / M);
    if (d == 2) {
        auto hat = CyclicFft::cached(g.size()).forward(g);
        std::vector<double> q(hat.size());
        for (std::size_t i = 0; i < hat.size(); ++i) {
            const double a = std::norm(hat[i] / M);
            q[i] = a * a;
        }
        return pairwise_sum(q);
    }
    // Delta_{-h} g is a shifted conjugate of Delta_h g, which leaves every U^k average unchanged.
    // Delta_h g vanishes unless h lies in the difference set of the support.
    const std::size_t n = g.size();
    std::vector<std::size_t> support;
    for (std::size_t x = 0; x < n; ++x)
        if (g[x] != cplx(0.0, 0.0)) support.push_back(x);
    std::vector<char> live(n, 0);
    for (std::size_t x : support)
        for (std::size_t y : support) live[(y + n - x) % n] = 1;
    std::vector<double> terms(n, 0.0);
    for (std::size_t h = 0; h <= n / 2; ++h) {
        if (!live[h]) continue;
        auto dh = gowers_detail::cyclic_derivative(g, h);
        if (!gowers_detail::all_zero(dh)) terms[h] = group_power_average(dh, d - 1);
        if (h != 0 && n - h != h) terms[n - h] = terms[h];
    }
    return pairwise_sum(terms) / M;
}

inline double group_u_norm(const std::vector<cplx>& g, int d)
{
    return std::pow(std::max(0.0, group_power_average(g, d)), 1.0 / static_cast<double>(1 << d));
}

/// Embedding of f on [N] into Z_M; n sits at n mod M.
inline std::vector<cplx> zero_extend(const std::vector<cplx>& v, long M)
{
    std::vector<cplx> out(static_cast<std::size_t>(M));
    for (std::size_t n = 0; n < v.size(); ++n) out[(n + 1) % static_cast<std::size_t>(M)] = v[n];
    return out;
}

namespace gowers_detail {

inline double indicator_average(long N, long M, int d)
{
    static std::mutex mu;
    static std::map<std::array<long, 3>, double> cache;
    const std::array<long, 3> key{N, M, d};
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const double v = group_power_average(zero_extend(std::vector<cplx>(static_cast<std::size_t>(N), 1.0), M), d);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, v).first->second;
}

} // namespace gowers_detail

/// ||f||_{U^d[N]}; vector-valued f uses (sum_i ||f_i||^{2^d})^{1/2^d}.
inline double u_norm(const SampledFunction& f, int d, std::optional<long> Ntilde = std::nullopt)
{
    if (d < 1) throw std::invalid_argument("u_norm: d must be >= 1");
    const long min_M = (1L << d) * f.N();
    const long M = Ntilde.value_or(min_M);
    if (M < min_M) throw std::invalid_argument("u_norm: Ntilde must be >= 2^d N = " + std::to_string(min_M));
    const double norm1 = gowers_detail::indicator_average(f.N(), M, d);
    std::vector<double> parts;
    for (int i = 0; i < f.D(); ++i) parts.push_back(std::max(0.0, group_power_average(zero_extend(f.component(i), M), d)) / norm1);
    return std::pow(pairwise_sum(parts), 1.0 / static_cast<double>(1 << d));
}

// ---------------------------------------------------------------------------
// Correlation statistics.

namespace gowers_detail {

/// Euclidean norm of E_{n in [N]} of a tensor-valued sample.
inline double averaged_tensor_norm(long N, std::size_t dim, const std::function<void(long, std::vector<cplx>&)>& sample)
{
    std::vector<std::vector<cplx>> cols(dim, std::vector<cplx>(static_cast<std::size_t>(N)));
    std::vector<cplx> buf(dim);
    for (long n = 1; n <= N; ++n) {
        sample(n, buf);
        for (std::size_t k = 0; k < dim; ++k) cols[k][static_cast<std::size_t>(n - 1)] = buf[k];
    }
    std::vector<double> sq(dim);
    for (std::size_t k = 0; k < dim; ++k) sq[k] = std::norm(pairwise_sum(cols[k]) / static_cast<double>(N));
    return std::sqrt(pairwise_sum(sq));
}

inline void tensor_into(const std::vector<cplx>& a, const std::vector<cplx>& b, std::vector<cplx>& out)
{
    out.resize(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
}

inline std::vector<cplx> conj_all(std::vector<cplx> v)
{
    for (auto& z : v) z = std::conj(z);
    return v;
}

} // namespace gowers_detail

/// |E_{n in [N]} f(n) (x) conj g(n)|.
inline double correlation(const SampledFunction& f, const SampledFunction& g)
{
    if (f.N() != g.N()) throw std::invalid_argument("correlation: functions must share N");
    const std::size_t dim = static_cast<std::size_t>(f.D()) * static_cast<std::size_t>(g.D());
    return gowers_detail::averaged_tensor_norm(f.N(), dim, [&](long n, std::vector<cplx>& out) {
        gowers_detail::tensor_into(f.at(n), gowers_detail::conj_all(g.at(n)), out);
    });
}

using Quadruple = std::array<long, 4>;
using ChiFamily = std::function<SampledFunction(long)>;

inline bool is_additive(const Quadruple& q) { return q[0] + q[1] == q[2] + q[3]; }

/// |E_n chi_{h1}(n) (x) chi_{h2}(n+k) (x) conj chi_{h3}(n) (x) conj chi_{h4}(n+k)|, k = h1 - h4.
inline double gcs_statistic(const ChiFamily& family, const Quadruple& q)
{
    const auto c1 = family(q[0]), c2 = family(q[1]), c3 = family(q[2]), c4 = family(q[3]);
    const long N = c1.N();
    if (c2.N() != N || c3.N() != N || c4.N() != N) throw std::invalid_argument("gcs_statistic: family members must share N");
    const long k = q[0] - q[3];
    const std::size_t dim = static_cast<std::size_t>(c1.D() * c2.D() * c3.D() * c4.D());
    std::vector<cplx> t1, t2;
    return gowers_detail::averaged_tensor_norm(N, dim, [&](long n, std::vector<cplx>& out) {
        gowers_detail::tensor_into(c1.at(n), c2.at(n + k), t1);
        gowers_detail::tensor_into(t1, gowers_detail::conj_all(c3.at(n)), t2);
        gowers_detail::tensor_into(t2, gowers_detail::conj_all(c4.at(n + k)), out);
    });
}

/// Finitized "correlates" and "many": explicit, reported thresholds.
struct Thresholds {
    double correlation = 0.05;
    double density = 0.1;
};

struct GcsSurvey {
    std::size_t total = 0;
    std::size_t large = 0;
    double fraction = 0;
    bool dense = false;
    Thresholds thresholds;
};

inline GcsSurvey gcs_survey(const ChiFamily& family, const std::vector<Quadruple>& quads, Thresholds th = {})
{
    GcsSurvey s;
    s.thresholds = th;
    s.total = quads.size();
    for (const auto& q : quads)
        if (gcs_statistic(family, q) >= th.correlation) ++s.large;
    s.fraction = s.total ? static_cast<double>(s.large) / static_cast<double>(s.total) : 0.0;
    s.dense = s.fraction >= th.density;
    return s;
}

// ---------------------------------------------------------------------------
// CSV: one row per n, "n,re_1,im_1,...,re_D,im_D". Lines starting with '#' are skipped.
// An optional header row starting with "n" names the columns; a "flagged" column
// (as written by the nilcharacter evaluator) is ignored.

inline void write_csv(std::ostream& os, const SampledFunction& f, int digits = 17)
{
    const auto old = os.precision(digits);
    for (long n = 1; n <= f.N(); ++n) {
        os << n;
        for (const auto& z : f.values()[static_cast<std::size_t>(n - 1)]) os << ',' << z.real() << ',' << z.imag();
        os << '\n';
    }
    os.precision(old);
}

inline SampledFunction read_csv(std::istream& is)
{
    std::vector<SampledFunction::Vec> rows;
    std::string line;
    long expect = 1;
    std::vector<bool> skip;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (std::exchange(first, false) && line.rfind("n,", 0) == 0) {
            while (std::getline(ss, cell, ',')) skip.push_back(cell == "flagged");
            continue;
        }
        std::vector<double> xs;
        for (std::size_t col = 0; std::getline(ss, cell, ','); ++col) {
            if (col < skip.size() && skip[col]) continue;
            try {
                xs.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::invalid_argument("read_csv: bad number '" + cell + "'");
            }
        }
        if (xs.size() < 3 || xs.size() % 2 == 0) throw std::invalid_argument("read_csv: row needs n and (re, im) pairs");
        if (xs[0] != static_cast<double>(expect)) throw std::invalid_argument("read_csv: rows must list n = 1, 2, ... in order");
        ++expect;
        SampledFunction::Vec v;
        for (std::size_t i = 1; i < xs.size(); i += 2) v.emplace_back(xs[i], xs[i + 1]);
        rows.push_back(std::move(v));
    }
    if (rows.empty()) throw std::invalid_argument("read_csv: no samples");
    const int D = static_cast<int>(rows.front().size());
    const long N = static_cast<long>(rows.size());
    return SampledFunction(N, D, std::move(rows));
}

} // namespace nilcalc
