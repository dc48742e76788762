#pragma once

// Exact scalars for nilcalc.
//
// Rational wraps a GMP rational that is always kept canonical (lowest terms,
// positive denominator). TorusPoint is a rational read modulo 1 with its
// representative in the fundamental domain I0 = (-1/2, 1/2]. PhaseVector is
// a small vector of complex entries modulus * e(phase) whose phases stay
// exact; only the modulus is a double.

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nilcalc {

class Rational {
public:
    Rational() : v_(0) {}
    Rational(int v) : v_(static_cast<long>(v)) {}
    Rational(long v) : v_(v) {}
    Rational(long long v) : v_(static_cast<long>(v)) {}
    Rational(const mpz_class& v) : v_(v) {}
    Rational(const mpz_class& num, const mpz_class& den) : v_(num, den)
    {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }
    Rational(long num, long den) : Rational(mpz_class(num), mpz_class(den)) {}
    explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }

    /// Parses "p/q" or "p" (optional sign on p).
    static Rational parse(std::string_view text)
    {
        std::string s(text);
        auto trim = [](std::string& t) {
            auto b = t.find_first_not_of(" \t");
            auto e = t.find_last_not_of(" \t");
            t = (b == std::string::npos) ? std::string{} : t.substr(b, e - b + 1);
        };
        trim(s);
        if (s.empty()) throw std::invalid_argument("Rational: empty string");
        auto slash = s.find('/');
        mpz_class num, den(1);
        try {
            if (slash == std::string::npos) {
                num = mpz_class(s.front() == '+' ? s.substr(1) : s, 10);
            } else {
                auto ns = s.substr(0, slash);
                auto ds = s.substr(slash + 1);
                trim(ns);
                trim(ds);
                num = mpz_class(ns.front() == '+' ? ns.substr(1) : ns, 10);
                den = mpz_class(ds, 10);
            }
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("Rational: cannot parse '" + s + "'");
        }
        if (den <= 0) throw std::invalid_argument("Rational: denominator must be positive in '" + s + "'");
        return Rational(num, den);
    }

    mpz_class numerator() const { return v_.get_num(); }
    mpz_class denominator() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    double to_double() const { return v_.get_d(); }

    /// Always "p/q", including "n/1" for integers.
    std::string str() const { return v_.get_num().get_str() + "/" + v_.get_den().get_str(); }

    mpz_class floor() const
    {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
        return r;
    }
    mpz_class ceil() const
    {
        mpz_class r;
        mpz_cdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
        return r;
    }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o)
    {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }
    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

/// The unique y in (-1/2, 1/2] with x - y an integer.
inline Rational signed_frac(const Rational& x)
{
    // y = x - ceil(x - 1/2)
    static const Rational half(1, 2);
    return x - Rational((x - half).ceil());
}

/// Nearest integer k with x - k in I0.
inline mpz_class nearest_integer(const Rational& x)
{
    return (x - Rational(1, 2)).ceil();
}

/// A point of T = R/Z, stored by its I0 representative.
class TorusPoint {
public:
    TorusPoint() = default;
    TorusPoint(const Rational& x) : v_(signed_frac(x)) {}

    const Rational& value() const { return v_; }
    double to_double() const { return v_.to_double(); }

    TorusPoint operator-() const { return TorusPoint(-v_); }
    friend TorusPoint operator+(const TorusPoint& a, const TorusPoint& b) { return TorusPoint(a.v_ + b.v_); }
    friend TorusPoint operator-(const TorusPoint& a, const TorusPoint& b) { return TorusPoint(a.v_ - b.v_); }
    friend TorusPoint operator*(const mpz_class& k, const TorusPoint& a) { return TorusPoint(Rational(k) * a.v_); }
    friend TorusPoint operator*(long k, const TorusPoint& a) { return TorusPoint(Rational(k) * a.v_); }
    friend bool operator==(const TorusPoint& a, const TorusPoint& b) = default;

    friend std::ostream& operator<<(std::ostream& os, const TorusPoint& t) { return os << t.v_; }

private:
    Rational v_;
};

/// |signed_frac(x - y)|, a value in [0, 1/2].
inline Rational torus_dist(const TorusPoint& x, const TorusPoint& y)
{
    return abs(signed_frac(x.value() - y.value()));
}

inline Rational torus_norm(const Rational& x) { return abs(signed_frac(x)); }

/// e(x) = exp(2 pi i x) for rational x, reduced mod 1 first so large
/// arguments keep full double accuracy.
inline std::complex<double> expi(const Rational& x)
{
    double t = signed_frac(x).to_double();
    double a = 2.0 * std::numbers::pi * t;
    return {std::cos(a), std::sin(a)};
}

/// One entry modulus * e(phase). The phase is exact.
struct PhaseEntry {
    double modulus = 0.0;
    TorusPoint phase;

    std::complex<double> value() const { return modulus * expi(phase.value()); }
    friend bool operator==(const PhaseEntry&, const PhaseEntry&) = default;
};

class PhaseVector {
public:
    PhaseVector() = default;
    explicit PhaseVector(std::vector<PhaseEntry> entries) : entries_(std::move(entries))
    {
        for (const auto& e : entries_)
            if (!(e.modulus >= 0.0)) throw std::invalid_argument("PhaseVector: negative or NaN modulus");
    }

    std::size_t dim() const { return entries_.size(); }
    const std::vector<PhaseEntry>& entries() const { return entries_; }
    const PhaseEntry& operator[](std::size_t i) const { return entries_[i]; }

    bool unimodular() const
    {
        for (const auto& e : entries_)
            if (e.modulus != 1.0) return false;
        return true;
    }

    double norm() const
    {
        double s = 0.0;
        for (const auto& e : entries_) s += e.modulus * e.modulus;
        return std::sqrt(s);
    }

    std::vector<std::complex<double>> to_complex() const
    {
        std::vector<std::complex<double>> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.value());
        return out;
    }

    PhaseVector conj() const
    {
        auto out = entries_;
        for (auto& e : out) e.phase = -e.phase;
        return PhaseVector(std::move(out));
    }

    /// Multiplies every entry by e(shift). Zero entries keep phase 0.
    PhaseVector rotated(const TorusPoint& shift) const
    {
        auto out = entries_;
        for (auto& e : out)
            if (e.modulus != 0.0) e.phase = e.phase + shift;
        return PhaseVector(std::move(out));
    }

    friend bool operator==(const PhaseVector&, const PhaseVector&) = default;

private:
    std::vector<PhaseEntry> entries_;
};

/// The one-dimensional unimodular vector e(x).
/// Fixed-shape pairwise reduction; the tree depends only on the length.
template <class T>
T pairwise_sum(std::span<const T> xs)
{
    if (xs.size() <= 8) {
        T s{};
        for (const T& x : xs) s += x;
        return s;
    }
    const std::size_t h = xs.size() / 2;
    return pairwise_sum(xs.first(h)) + pairwise_sum(xs.subspan(h));
}

template <class T>
T pairwise_sum(const std::vector<T>& xs) { return pairwise_sum(std::span<const T>(xs)); }

inline PhaseVector phase(const TorusPoint& x) { return PhaseVector({PhaseEntry{1.0, x}}); }

/// Row-major tensor product: entry (i, j) lands at i * dim(v) + j.
inline PhaseVector tensor(const PhaseVector& u, const PhaseVector& v)
{
    std::vector<PhaseEntry> out;
    out.reserve(u.dim() * v.dim());
    for (const auto& a : u.entries())
        for (const auto& b : v.entries()) {
            if (a.modulus == 0.0 || b.modulus == 0.0)
                out.push_back(PhaseEntry{0.0, TorusPoint{}});
            else
                out.push_back(PhaseEntry{a.modulus * b.modulus, a.phase + b.phase});
        }
    return PhaseVector(std::move(out));
}

} // namespace nilcalc

template <>
struct std::hash<nilcalc::Rational> {
    std::size_t operator()(const nilcalc::Rational& r) const
    {
        return std::hash<std::string>{}(r.str());
    }
};
