#pragma once

// Scenario files: one JSON document fully determines an experiment run.
//
//   {"name": ..., "kind": ..., "criterion": 3, "runtime_limit_s": 10,
//    "params": {...}}
//
// run_scenario validates the parameters of the kind (unknown or ill-typed
// keys raise ScenarioError before anything runs), executes the pipeline and
// returns a Report. Exceptions thrown while the pipeline runs become a failing
// check, never a crash.

#include "nilcalc/bracket.hpp"
#include "nilcalc/equid.hpp"
#include "nilcalc/freqreg.hpp"
#include "nilcalc/gowers.hpp"
#include "nilcalc/schema_io.hpp"
#include "nilcalc/testing/brute_relation.hpp"
#include "nilcalc/testing/naive_gowers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace nilcalc {

using io::json;

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A double rounded to 15 significant digits; JSON prints it with at most 15.
inline json num(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return std::strtod(buf, nullptr);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = true;
    json measured;
    json threshold;
    std::string detail;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

struct Report {
    std::string name;
    std::string kind;
    std::optional<int> criterion;
    json inputs;  // the effective parameters, defaults filled in
    std::vector<Check> checks;
    json measurements = json::object();
    Table table;
    double runtime_s = 0;
    std::optional<double> runtime_limit_s;

    bool pass() const
    {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    bool within_time() const { return !runtime_limit_s || runtime_s < *runtime_limit_s; }
    const Check* first_failure() const
    {
        for (const auto& c : checks)
            if (!c.pass) return &c;
        return nullptr;
    }

    Check& check(std::string name, bool pass, json measured = nullptr, json threshold = nullptr, std::string detail = {})
    {
        checks.push_back({std::move(name), pass, std::move(measured), std::move(threshold), std::move(detail)});
        return checks.back();
    }
};

enum class Format { text, json, csv };

namespace scenario_detail {

inline std::string csv_field(const json& v)
{
    std::string s = v.is_string() ? v.get<std::string>() : v.is_null() ? std::string{} : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string text_value(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

} // namespace scenario_detail

/// Deterministic serialization. Wall-clock runtime enters the structured
/// record only when `timings` is set, so replays are byte-identical.
inline std::string emit_report(const Report& r, Format f, bool timings = false)
{
    using scenario_detail::csv_field;
    using scenario_detail::text_value;
    std::ostringstream os;
    if (f == Format::json) {
        json j;
        j["name"] = r.name;
        j["kind"] = r.kind;
        if (r.criterion) j["criterion"] = *r.criterion;
        j["verdict"] = r.pass() ? "pass" : "fail";
        json checks = json::array();
        for (const auto& c : r.checks) {
            json cj;
            cj["name"] = c.name;
            cj["pass"] = c.pass;
            if (!c.measured.is_null()) cj["measured"] = c.measured;
            if (!c.threshold.is_null()) cj["threshold"] = c.threshold;
            if (!c.detail.empty()) cj["detail"] = c.detail;
            checks.push_back(cj);
        }
        j["checks"] = checks;
        j["measurements"] = r.measurements;
        if (!r.table.columns.empty()) {
            json rows = json::array();
            for (const auto& row : r.table.rows) {
                json o;
                for (std::size_t i = 0; i < row.size(); ++i) o[r.table.columns[i]] = row[i];
                rows.push_back(o);
            }
            j["table"] = rows;
        }
        j["inputs"] = r.inputs;
        if (timings) j["runtime_s"] = num(r.runtime_s);
        os << j.dump(2) << "\n";
    } else if (f == Format::csv) {
        if (!r.table.columns.empty()) {
            for (std::size_t i = 0; i < r.table.columns.size(); ++i) os << (i ? "," : "") << r.table.columns[i];
            os << "\n";
            for (const auto& row : r.table.rows) {
                for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
                os << "\n";
            }
        } else {
            os << "check,pass,measured,threshold,detail\n";
            for (const auto& c : r.checks)
                os << csv_field(c.name) << "," << (c.pass ? "true" : "false") << "," << csv_field(c.measured) << "," << csv_field(c.threshold)
                   << "," << csv_field(c.detail) << "\n";
        }
    } else {
        os << "scenario " << r.name << " (" << r.kind << "): " << (r.pass() ? "PASS" : "FAIL") << "\n";
        for (const auto& c : r.checks) {
            os << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.name;
            if (!c.measured.is_null()) os << ": " << text_value(c.measured);
            if (!c.threshold.is_null()) os << " (threshold " << text_value(c.threshold) << ")";
            if (!c.detail.empty()) os << " [" << c.detail << "]";
            os << "\n";
        }
        for (const auto& [k, v] : r.measurements.items()) os << "  " << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        if (!r.table.columns.empty()) {
            os << " ";
            for (const auto& c : r.table.columns) os << " " << c;
            os << "\n";
            for (const auto& row : r.table.rows) {
                os << " ";
                for (const auto& v : row) os << " " << text_value(v);
                os << "\n";
            }
        }
        if (const Check* w = r.first_failure()) os << "  witness: " << w->name << (w->detail.empty() ? "" : ": " + w->detail) << "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", r.runtime_s);
        os << "  runtime " << buf << " s";
        if (r.runtime_limit_s) os << " (limit " << *r.runtime_limit_s << " s)";
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Parameter access with validation
// ---------------------------------------------------------------------------

class Params {
public:
    Params(const json& j, std::string context) : j_(j), ctx_(std::move(context))
    {
        if (!j_.is_object()) throw ScenarioError(ctx_ + ": parameters must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        if (!has(key)) throw ScenarioError(ctx_ + ": missing parameter '" + key + "'");
        used_.insert(key);
        effective_[key] = j_.at(key);
        return j_.at(key);
    }

    template <class T>
    T get(const std::string& key)
    {
        const json& v = raw(key);
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            throw ScenarioError(ctx_ + ": parameter '" + key + "' has the wrong type: " + v.dump());
        }
    }

    template <class T>
    T get_or(const std::string& key, T fallback)
    {
        if (has(key)) return get<T>(key);
        used_.insert(key);
        effective_[key] = fallback;
        return fallback;
    }

    Rational rational(const std::string& key)
    {
        const json& v = raw(key);
        try {
            return io::rational_from(v);
        } catch (const std::exception& e) {
            throw ScenarioError(ctx_ + ": parameter '" + key + "': " + e.what());
        }
    }

    Rational rational_or(const std::string& key, const Rational& fallback)
    {
        if (has(key)) return rational(key);
        used_.insert(key);
        effective_[key] = fallback.str();
        return fallback;
    }

    std::vector<Rational> rationals(const std::string& key)
    {
        const json& v = raw(key);
        try {
            return io::rationals_from(v);
        } catch (const std::exception& e) {
            throw ScenarioError(ctx_ + ": parameter '" + key + "': " + e.what());
        }
    }

    long positive(const std::string& key, std::optional<long> fallback = std::nullopt)
    {
        long v = fallback && !has(key) ? get_or<long>(key, *fallback) : get<long>(key);
        if (v < 1) throw ScenarioError(ctx_ + ": parameter '" + key + "' must be positive");
        return v;
    }

    /// An integer or a list of integers.
    std::vector<long> longs(const std::string& key)
    {
        const json& v = raw(key);
        try {
            if (v.is_array()) return v.get<std::vector<long>>();
            return {v.get<long>()};
        } catch (const json::exception&) {
            throw ScenarioError(ctx_ + ": parameter '" + key + "' must be an integer or a list of integers");
        }
    }

    void finish() const
    {
        for (const auto& [key, unused] : j_.items())
            if (!used_.count(key)) throw ScenarioError(ctx_ + ": unknown parameter '" + key + "'");
    }

    const json& effective() const { return effective_; }
    const std::string& context() const { return ctx_; }

private:
    const json& j_;
    std::string ctx_;
    std::set<std::string> used_;
    json effective_ = json::object();
};

// ---------------------------------------------------------------------------
// Experiment kinds. Each builder validates its parameters and returns the
// pipeline to run; the caller times it and converts exceptions to verdicts.
// ---------------------------------------------------------------------------

using Pipeline = std::function<void(Report&)>;

namespace scenario_detail {

inline std::string seed_note(std::uint64_t seed) { return "seed " + std::to_string(seed); }

inline std::uint64_t seed_of(Params& p) { return p.get<std::uint64_t>("seed"); }

/// f(n) = e(phase(n)) on [N] from {"phase": bracket expr}, {"poly": [c0, c1, ...]} or {"csv": path}.
struct FunctionSource {
    std::function<Rational(long)> phase;
    std::optional<SampledFunction> fixed;

    SampledFunction at(long N) const
    {
        if (fixed) {
            if (fixed->N() != N) throw ScenarioError("function: the CSV file has N = " + std::to_string(fixed->N()));
            return *fixed;
        }
        return SampledFunction::phases(N, phase);
    }
};

inline FunctionSource function_source(const json& spec, const std::filesystem::path& base)
{
    if (!spec.is_object() || spec.size() != 1) throw ScenarioError("function: expected one of {\"phase\": ...}, {\"poly\": [...]}, {\"csv\": path}");
    FunctionSource out;
    const auto& [key, val] = *spec.items().begin();
    if (key == "phase") {
        auto e = std::make_shared<BracketExpr>(BracketExpr::parse(val.get<std::string>()));
        if (e->arity() > 1) throw ScenarioError("function: the phase expression may only use (var 0)");
        out.phase = [e](long n) { return eval_bracket(*e, {n}); };
    } else if (key == "poly") {
        auto c = io::rationals_from(val);
        out.phase = [c](long n) {
            Rational acc, p(1);
            for (const auto& ci : c) {
                acc += ci * p;
                p *= Rational(n);
            }
            return acc;
        };
    } else if (key == "csv") {
        std::filesystem::path p(val.get<std::string>());
        std::ifstream in(p.is_absolute() ? p : base / p);
        if (!in) throw ScenarioError("function: cannot open " + p.string());
        out.fixed = read_csv(in);
    } else {
        throw ScenarioError("function: unknown source '" + key + "'");
    }
    return out;
}

inline std::vector<cplx> random_bounded(std::mt19937_64& rng, long N)
{
    std::uniform_real_distribution<double> r(0.0, 1.0), t(0.0, 2 * M_PI);
    std::vector<cplx> v(static_cast<std::size_t>(N));
    for (auto& z : v) z = std::polar(r(rng), t(rng));
    return v;
}

inline json ratio(long good, long total) { return std::to_string(good) + "/" + std::to_string(total); }

/// Either explicit "alpha"/"beta" (and "gamma") or "count" seeded generic frequencies.
struct FrequencyDraw {
    std::vector<std::vector<Rational>> tuples;
    std::string origin;
};

inline FrequencyDraw frequencies(Params& p, const std::vector<std::string>& names)
{
    FrequencyDraw d;
    if (p.has(names[0])) {
        std::vector<Rational> t;
        for (const auto& n : names) t.push_back(p.rational(n));
        d.tuples.push_back(std::move(t));
        d.origin = "explicit";
        return d;
    }
    const long count = p.positive("count");
    const std::uint64_t seed = seed_of(p);
    const long min_den = p.get_or<long>("min_den", 10001), max_den = p.get_or<long>("max_den", 99991);
    if (min_den < 1 || max_den < min_den) throw ScenarioError(p.context() + ": need 1 <= min_den <= max_den");
    std::mt19937_64 rng(seed);
    for (long i = 0; i < count; ++i) {
        std::vector<Rational> t;
        for (std::size_t k = 0; k < names.size(); ++k) t.push_back(sample_frequency(rng, min_den, max_den));
        d.tuples.push_back(std::move(t));
    }
    d.origin = seed_note(seed);
    return d;
}

inline std::string tuple_text(const std::vector<Rational>& t)
{
    std::string s;
    for (const auto& x : t) s += (s.empty() ? "" : ", ") + x.str();
    return "(" + s + ")";
}

inline int natural_k(const SchemaPtr& s) { return s->kind() == FiltKind::multidegree ? s->index_arity() : 1; }

inline int degree_bound(const NilSchema& s)
{
    int b = 0;
    for (const auto& [idx, pos] : s.filtration())
        if (!pos.empty()) b = std::max(b, idx.total());
    return b;
}

// --- norm ------------------------------------------------------------------------

inline Pipeline norm_pipeline(Params& p, const std::filesystem::path& base)
{
    const std::string mode = p.get_or<std::string>("mode", "value");
    if (mode == "value") {
        auto src = function_source(p.raw("f"), base);
        auto Ns = p.longs("N");
        auto ds = p.longs("d");
        std::optional<long> Ntilde;
        if (p.has("Ntilde")) Ntilde = p.get<long>("Ntilde");
        std::optional<double> expect, tol;
        if (p.has("expect")) {
            Params e(p.raw("expect"), p.context() + ".expect");
            expect = e.get<double>("value");
            tol = e.get<double>("tol");
            e.finish();
        }
        for (long N : Ns)
            for (long d : ds) {
                if (N < 1 || d < 1 || d > 6) throw ScenarioError("norm: need N >= 1 and 1 <= d <= 6");
                if (Ntilde && *Ntilde < (1L << d) * N) throw ScenarioError("norm: Ntilde must be at least 2^d N");
            }
        return [=](Report& r) {
            r.table.columns = {"N", "d", "Ntilde", "norm"};
            for (long N : Ns) {
                auto f = src.at(N);
                for (long d : ds) {
                    const double v = u_norm(f, static_cast<int>(d), Ntilde);
                    r.table.rows.push_back({N, d, Ntilde.value_or((1L << d) * N), num(v)});
                    if (expect)
                        r.check("norm N=" + std::to_string(N) + " d=" + std::to_string(d), std::abs(v - *expect) <= *tol, num(v),
                                "within " + num(*tol).dump() + " of " + num(*expect).dump());
                }
            }
        };
    }
    if (mode == "extremal") {
        auto degrees = p.longs("degrees");
        const long count = p.positive("count"), N = p.positive("N");
        const double tol = p.get<double>("tol");
        const long bound = p.positive("coeff_bound"), max_den = p.positive("max_den");
        const std::uint64_t seed = seed_of(p);
        for (long s : degrees)
            if (s < 1 || s > 5) throw ScenarioError("norm: extremal degrees must lie in [1, 5]");
        return [=](Report& r) {
            std::mt19937_64 rng(seed);
            r.table.columns = {"s", "trial", "N", "d", "norm"};
            for (long s : degrees) {
                double worst = 0;
                std::string where;
                for (long t = 0; t < count; ++t) {
                    std::vector<Rational> c;
                    for (long i = 0; i <= s; ++i) c.push_back(sample_rational(rng, bound, max_den));
                    auto f = SampledFunction::phases(N, [&](long n) {
                        Rational acc, pw(1);
                        for (const auto& ci : c) {
                            acc += ci * pw;
                            pw *= Rational(n);
                        }
                        return acc;
                    });
                    const double v = u_norm(f, static_cast<int>(s + 1));
                    r.table.rows.push_back({s, t, N, s + 1, num(v)});
                    if (std::abs(v - 1.0) >= worst) {
                        worst = std::abs(v - 1.0);
                        where = "P = " + io::rationals_json(c).dump() + " gives " + num(v).dump();
                    }
                }
                r.check("s=" + std::to_string(s) + ": max |U^" + std::to_string(s + 1) + " norm - 1| over " + std::to_string(count) + " phases", worst <= tol,
                        num(worst), num(tol), worst <= tol ? std::string{} : where);
            }
        };
    }
    if (mode == "oracle") {
        const long d_max = p.positive("d_max"), M_max = p.positive("Ntilde_max"), count = p.positive("count");
        const double tol = p.get<double>("tol"), inv_tol = p.get<double>("invariance_tol");
        const long extra = p.positive("invariance_extra");
        const std::uint64_t seed = seed_of(p);
        if (d_max > 4 || M_max > 256) throw ScenarioError("norm: the naive oracle is limited to d <= 4 and Ntilde <= 256");
        return [=](Report& r) {
            std::mt19937_64 rng(seed);
            double worst = 0, worst_inv = 0;
            long cases = 0, inv_cases = 0;
            std::string where, where_inv;
            for (long d = 1; d <= d_max; ++d)
                for (long M = 1L << d; M <= M_max; ++M) {
                    const long N = M >> d;
                    for (long t = 0; t < count; ++t) {
                        auto v = random_bounded(rng, N);
                        const double fast = u_norm(SampledFunction::scalar(v), static_cast<int>(d), M);
                        const double slow = static_cast<double>(oracle::naive_u_norm(v, static_cast<int>(d), M));
                        ++cases;
                        if (std::abs(fast - slow) >= worst) {
                            worst = std::abs(fast - slow);
                            where = "d=" + std::to_string(d) + " Ntilde=" + std::to_string(M) + " trial " + std::to_string(t);
                        }
                    }
                }
            for (long d = 1; d <= d_max; ++d)
                for (long N = 1; (1L << d) * N <= M_max; ++N)
                    for (long t = 0; t < count; ++t) {
                        auto f = SampledFunction::scalar(random_bounded(rng, N));
                        const long M = (1L << d) * N;
                        const double diff = std::abs(u_norm(f, static_cast<int>(d), M) - u_norm(f, static_cast<int>(d), M + extra));
                        ++inv_cases;
                        if (diff >= worst_inv) {
                            worst_inv = diff;
                            where_inv = "d=" + std::to_string(d) + " N=" + std::to_string(N) + " trial " + std::to_string(t);
                        }
                    }
            r.check("max |fast - naive| over " + std::to_string(cases) + " cases", worst <= tol, num(worst), num(tol), where);
            r.check("max |U(2^d N) - U(2^d N + " + std::to_string(extra) + ")| over " + std::to_string(inv_cases) + " cases", worst_inv <= inv_tol,
                    num(worst_inv), num(inv_tol), where_inv);
        };
    }
    if (mode == "converse") {
        const Rational a = p.rational("alpha"), b = p.rational("beta");
        const long d = p.positive("d");
        auto Ns = p.longs("N");
        const double floor_v = p.get<double>("min"), spread = p.get<double>("max_spread");
        std::optional<std::pair<long, double>> oracle_at;
        if (p.has("oracle")) {
            Params o(p.raw("oracle"), p.context() + ".oracle");
            oracle_at = {o.positive("N"), o.get<double>("tol")};
            o.finish();
        }
        std::optional<std::tuple<long, double, double>> pinned;
        if (p.has("pinned")) {
            Params o(p.raw("pinned"), p.context() + ".pinned");
            pinned = {o.positive("N"), o.get<double>("value"), o.get<double>("tol")};
            o.finish();
        }
        if (Ns.empty()) throw ScenarioError("norm: converse mode needs at least one N");
        return [=](Report& r) {
            const auto e = bracket_monomial(a, b);
            auto phase = [&](long n) { return eval_bracket(e, {n}); };
            r.table.columns = {"N", "d", "Ntilde", "norm"};
            std::vector<double> vals;
            for (long N : Ns) {
                const double v = u_norm(SampledFunction::phases(N, phase), static_cast<int>(d));
                vals.push_back(v);
                r.table.rows.push_back({N, d, (1L << d) * N, num(v)});
            }
            const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
            r.check("min over N of U^" + std::to_string(d) + " norm", *lo >= floor_v, num(*lo), ">= " + num(floor_v).dump());
            r.check("relative spread (max - min) / min", (*hi - *lo) / *lo < spread, num((*hi - *lo) / *lo), "< " + num(spread).dump());
            if (oracle_at) {
                const auto [N, tol] = *oracle_at;
                std::vector<cplx> v;
                for (long n = 1; n <= N; ++n) v.push_back(expi(phase(n)));
                const double fast = u_norm(SampledFunction::scalar(v), static_cast<int>(d));
                const double slow = static_cast<double>(oracle::naive_u_norm(v, static_cast<int>(d), (1L << d) * N));
                r.check("fast vs naive oracle at N=" + std::to_string(N), std::abs(fast - slow) <= tol, num(std::abs(fast - slow)), num(tol));
            }
            if (pinned) {
                const auto [N, value, tol] = *pinned;
                const double v = u_norm(SampledFunction::phases(N, phase), static_cast<int>(d));
                r.check("pre-registered oracle value at N=" + std::to_string(N), std::abs(v - value) <= tol, num(v),
                        "within " + num(tol).dump() + " of " + num(value).dump());
            }
        };
    }
    throw ScenarioError("norm: unknown mode '" + mode + "'");
}

// --- bracket ------------------------------------------------------------------------

inline Pipeline bracket_pipeline(Params& p, const std::filesystem::path& base)
{
    const std::string mode = p.get_or<std::string>("mode", "product");
    if (mode == "product") {
        const long n_max = p.positive("n_max");
        std::vector<std::pair<Rational, Rational>> pairs;
        std::string origin;
        if (p.has("alpha")) {
            pairs.emplace_back(p.rational("alpha"), p.rational("beta"));
            origin = "explicit";
        } else {
            const long count = p.positive("pairs"), bound = p.positive("bound"), max_den = p.positive("max_den");
            const std::uint64_t seed = seed_of(p);
            std::mt19937_64 rng(seed);
            for (long t = 0; t < count; ++t) {
                Rational a = sample_rational(rng, bound, max_den);
                Rational b = sample_rational(rng, bound, max_den);
                pairs.emplace_back(a, b);
            }
            origin = seed_note(seed);
        }
        return [=](Report& r) {
            long failed = 0, checks = 0;
            std::string witness;
            for (const auto& [a, b] : pairs) {
                auto rep = check_product_identity(a, b, n_max);
                checks += rep.checks;
                if (!rep.pass) {
                    if (!failed)
                        witness = "alpha=" + a.str() + " beta=" + b.str() + " n=" + std::to_string(rep.witness) + ": lhs " + rep.lhs.str() + ", rhs " +
                                  rep.rhs.str();
                    ++failed;
                }
            }
            r.measurements["pairs"] = static_cast<long>(pairs.size());
            r.measurements["evaluations"] = checks;
            r.measurements["source"] = origin;
            r.check("pairs violating the identity mod 1", failed == 0, failed, 0, witness);
        };
    }
    if (mode == "compare") {
        const std::string text = p.get<std::string>("expr");
        auto e = BracketExpr::parse(text);
        SchemaPtr s = io::resolve_schema(p.raw("schema"), base);
        PolySeq g = io::polyseq_from_json(s, p.raw("orbit"));
        auto eta = p.get<std::vector<long>>("eta");
        const long N = p.positive("N");
        const bool expect_match = p.get_or<std::string>("expect", "match") == "match";
        auto spec = unsmoothed_spec(g, VerticalChar(s, s->top_index(), eta));
        return [=](Report& r) {
            auto rep = compare_with_nilchar(e, spec, N);
            r.measurements["compared"] = rep.compared;
            r.measurements["flagged"] = rep.flagged;
            r.check(expect_match ? "nilcharacter equals e(expr) at every unflagged n" : "nilcharacter differs from e(expr)", rep.pass == expect_match,
                    rep.pass ? "match" : "mismatch", expect_match ? "match" : "mismatch", rep.detail);
        };
    }
    throw ScenarioError("bracket-identity: unknown mode '" + mode + "'");
}

inline Pipeline heisenberg_pipeline(Params& p)
{
    auto draw = frequencies(p, {"alpha", "beta"});
    const long N = p.positive("N");
    return [=](Report& r) {
        long mismatched = 0, compared = 0, flagged = 0;
        std::string witness;
        for (const auto& t : draw.tuples) {
            auto rep = compare_with_nilchar(bracket_monomial(t[0], t[1]), heisenberg_bracket_spec(t[0], t[1]), N);
            compared += rep.compared;
            flagged += rep.flagged;
            if (!rep.pass) {
                if (!mismatched) witness = "(alpha, beta) = " + tuple_text(t) + ": " + rep.detail;
                ++mismatched;
            }
        }
        r.measurements["pairs"] = static_cast<long>(draw.tuples.size());
        r.measurements["compared"] = compared;
        r.measurements["flagged"] = flagged;
        r.measurements["source"] = draw.origin;
        r.check("pairs where F(g(n)) != e({alpha n} beta n) at some unflagged n", mismatched == 0, mismatched, 0, witness);
    };
}

inline Pipeline multilin_pipeline(Params& p)
{
    auto draw = frequencies(p, {"alpha", "beta"});
    const long N = p.positive("N");
    return [=](Report& r) {
        long bad_diag = 0, bad_sym = 0, compared = 0, flagged = 0;
        std::string w_diag, w_sym;
        for (const auto& t : draw.tuples) {
            const Rational &a = t[0], &b = t[1];
            auto rep = compare_with_nilchar(appc_diagonal_expr(a, b), appc_bracket_spec(a, b), N);
            compared += rep.compared;
            flagged += rep.flagged;
            if (!rep.pass) {
                if (!bad_diag) w_diag = "(alpha, beta) = " + tuple_text(t) + ": " + rep.detail;
                ++bad_diag;
            }
            const auto sym = symmetrized_bracket(a, b);
            const auto mono = bracket_monomial(a, b);
            for (long n = 1; n <= N; ++n)
                if (eval_bracket(sym, {n, n}) != eval_bracket(mono, {n})) {
                    if (!bad_sym) w_sym = "(alpha, beta) = " + tuple_text(t) + " n=" + std::to_string(n);
                    ++bad_sym;
                    break;
                }
        }
        r.measurements["pairs"] = static_cast<long>(draw.tuples.size());
        r.measurements["compared"] = compared;
        r.measurements["flagged"] = flagged;
        r.measurements["source"] = draw.origin;
        r.check("pairs where chi(n,n) != e(2{alpha n} beta n) e(-{alpha n}{beta n})", bad_diag == 0, bad_diag, 0, w_diag);
        r.check("pairs where the symmetrized form's diagonal != {alpha n} beta n", bad_sym == 0, bad_sym, 0, w_sym);
    };
}

inline Pipeline lift_pipeline(Params& p)
{
    auto draw = frequencies(p, {"alpha", "beta", "gamma"});
    const long n_max = p.get<long>("n_max");
    if (n_max < 0) throw ScenarioError("skew-lift: n_max must be nonnegative");
    return [=](Report& r) {
        long bad = 0;
        std::string witness;
        for (const auto& t : draw.tuples) {
            TorusPoint a(t[0]), b(t[1]), c(t[2]);
            auto orbit = linear_lift_orbit(a, b, c, n_max);
            for (long n = 0; n <= n_max; ++n)
                if (!(orbit[static_cast<std::size_t>(n)] == linear_lift_closed(a, b, c, n))) {
                    if (!bad) witness = "(alpha, beta, gamma) = " + tuple_text(t) + " n=" + std::to_string(n);
                    ++bad;
                    break;
                }
        }
        r.measurements["triples"] = static_cast<long>(draw.tuples.size());
        r.measurements["source"] = draw.origin;
        r.check("triples where the lifted orbit != n(n+1)/2 alpha + n beta + gamma", bad == 0, bad, 0, witness);
    };
}

// --- gcs ------------------------------------------------------------------------------

inline Pipeline gcs_pipeline(Params& p)
{
    const long N = p.positive("N");
    const json fam = p.raw("family");
    std::optional<Rational> alpha;
    std::shared_ptr<BracketExpr> expr;
    if (fam.is_object() && fam.size() == 1 && fam.contains("quadratic")) {
        alpha = io::rational_from(fam.at("quadratic"));
    } else if (fam.is_object() && fam.size() == 1 && fam.contains("phase")) {
        expr = std::make_shared<BracketExpr>(BracketExpr::parse(fam.at("phase").get<std::string>()));
        if (expr->arity() > 2) throw ScenarioError("gcs: the family phase may use (var 0) = n and (var 1) = h only");
    } else {
        throw ScenarioError("gcs: family must be {\"quadratic\": alpha} or {\"phase\": expr in n = (var 0), h = (var 1)}");
    }
    ChiFamily family = [alpha, expr, N](long h) {
        if (alpha) {
            const Rational a = *alpha;
            return SampledFunction::phases(N, [&](long n) { return Rational(2) * a * Rational(h) * Rational(n) + a * Rational(h) * Rational(h); });
        }
        return SampledFunction::phases(N, [&](long n) { return eval_bracket(*expr, {n, h}); });
    };

    const std::string mode = p.get_or<std::string>("mode", "quadruples");
    if (mode == "quadruples") {
        std::vector<Quadruple> quads;
        for (const auto& q : p.raw("quadruples")) {
            auto v = q.get<std::vector<long>>();
            if (v.size() != 4) throw ScenarioError("gcs: each quadruple needs four entries");
            quads.push_back({v[0], v[1], v[2], v[3]});
        }
        const double corr = p.get_or<double>("correlation_threshold", 0.05), dens = p.get_or<double>("density_threshold", 0.1);
        std::optional<std::pair<double, double>> expect;
        if (p.has("expect")) {
            Params e(p.raw("expect"), p.context() + ".expect");
            expect = {e.get<double>("value"), e.get<double>("tol")};
            e.finish();
        }
        return [=](Report& r) {
            r.table.columns = {"h1", "h2", "h3", "h4", "additive", "statistic"};
            for (const auto& q : quads) {
                const double v = gcs_statistic(family, q);
                r.table.rows.push_back({q[0], q[1], q[2], q[3], is_additive(q), num(v)});
                if (expect)
                    r.check("statistic at (" + std::to_string(q[0]) + "," + std::to_string(q[1]) + "," + std::to_string(q[2]) + "," + std::to_string(q[3]) + ")",
                            std::abs(v - expect->first) <= expect->second, num(v), "within " + num(expect->second).dump() + " of " + num(expect->first).dump());
            }
            auto s = gcs_survey(family, quads, {corr, dens});
            r.measurements["large"] = static_cast<long>(s.large);
            r.measurements["fraction"] = num(s.fraction);
            r.measurements["dense"] = s.dense;
        };
    }
    if (mode == "survey") {
        if (!alpha) throw ScenarioError("gcs: survey mode needs the quadratic family");
        const long additive = p.positive("additive"), non = p.positive("non_quadruples"), range = p.positive("h_range");
        const double tol = p.get<double>("tol");
        const std::uint64_t seed = seed_of(p);
        return [=](Report& r) {
            std::mt19937_64 rng(seed);
            std::uniform_int_distribution<long> h(-range, range);
            double worst = 0;
            std::string w_add;
            for (long t = 0; t < additive; ++t) {
                Quadruple q{h(rng), h(rng), h(rng), 0};
                q[3] = q[0] + q[1] - q[2];
                const double want = 1.0 - static_cast<double>(std::labs(q[0] - q[3])) / static_cast<double>(N);
                const double err = std::abs(gcs_statistic(family, q) - want);
                if (err >= worst) {
                    worst = err;
                    w_add = "(" + std::to_string(q[0]) + "," + std::to_string(q[1]) + "," + std::to_string(q[2]) + "," + std::to_string(q[3]) + ")";
                }
            }
            long checked = 0, violations = 0;
            double max_ratio = 0;
            std::string w_non;
            while (checked < non) {
                Quadruple q{h(rng), h(rng), h(rng), h(rng)};
                const long s = q[0] + q[1] - q[2] - q[3];
                if (s == 0) continue;
                ++checked;
                const double dist = torus_norm(Rational(2 * s) * *alpha).to_double();
                const double bound = dist > 0 ? 1.0 / (static_cast<double>(N) * dist) + 2.0 / static_cast<double>(N) : INFINITY;
                const double v = gcs_statistic(family, q);
                max_ratio = std::max(max_ratio, v / bound);
                if (v > bound) {
                    if (!violations)
                        w_non = "(" + std::to_string(q[0]) + "," + std::to_string(q[1]) + "," + std::to_string(q[2]) + "," + std::to_string(q[3]) + "): " +
                                num(v).dump() + " > " + num(bound).dump();
                    ++violations;
                }
            }
            r.check("additive quadruples: max |statistic - (1 - |h1 - h4|/N)| over " + std::to_string(additive), worst <= tol, num(worst), num(tol),
                    worst <= tol ? std::string{} : w_add);
            r.check("non-quadruples above 1/(N ||2 alpha s||) + 2/N, of " + std::to_string(non), violations == 0, violations, 0, w_non);
            r.measurements["max statistic/bound on non-quadruples"] = num(max_ratio);
        };
    }
    throw ScenarioError("gcs: unknown mode '" + mode + "'");
}

// --- equid ---------------------------------------------------------------------------------

inline Pipeline equid_pipeline(Params& p, const std::filesystem::path& base)
{
    struct Case {
        std::string label;
        PolySeq orbit;
        long N;
        std::string test;
        long H;
        Rational C;
        std::optional<bool> expect_obstruction;
        std::optional<std::vector<long>> expect_witness;
        long char_height;
        std::optional<double> max_average;
    };
    std::vector<Case> cases;
    json cases_json = p.raw("cases");
    if (!cases_json.is_array() || cases_json.empty()) throw ScenarioError("equid: 'cases' must be a nonempty list");
    for (std::size_t i = 0; i < cases_json.size(); ++i) {
        Params c(cases_json[i], p.context() + ".cases[" + std::to_string(i) + "]");
        const std::string label = c.get_or<std::string>("label", "case " + std::to_string(i));
        SchemaPtr s = io::resolve_schema(c.raw("schema"), base);
        PolySeq orbit = io::polyseq_from_json(s, c.raw("orbit"));
        const long N = c.positive("N");
        const std::string test = c.get<std::string>("test");
        long H = 0, char_height = 0;
        Rational C;
        std::optional<bool> expect_obstruction;
        std::optional<std::vector<long>> expect_witness;
        std::optional<double> max_average;
        if (test == "leibman") {
            H = c.positive("H");
            C = c.rational("C");
            if (c.has("expect")) {
                const std::string e = c.get<std::string>("expect");
                if (e != "obstruction" && e != "none") throw ScenarioError(c.context() + ": expect must be \"obstruction\" or \"none\"");
                expect_obstruction = e == "obstruction";
            }
            if (c.has("expect_witness")) expect_witness = c.get<std::vector<long>>("expect_witness");
        } else if (test == "empirical") {
            char_height = c.positive("char_height");
            if (c.has("max_average")) max_average = c.get<double>("max_average");
        } else {
            throw ScenarioError(c.context() + ": test must be \"leibman\" or \"empirical\"");
        }
        c.finish();
        cases.push_back({label, std::move(orbit), N, test, H, C, expect_obstruction, expect_witness, char_height, max_average});
    }
    return [=](Report& r) {
        json out = json::array();
        for (const auto& k : cases) {
            if (k.test == "leibman") {
                auto rep = leibman_test(k.orbit, k.N, k.H, k.C);
                json row{{"label", k.label}, {"verdict", rep.verdict()}, {"searched", static_cast<long>(rep.searched)}};
                if (rep.witness) {
                    row["witness"] = rep.witness->coeffs();
                    row["smoothness"] = rep.smoothness->str();
                }
                out.push_back(row);
                if (k.expect_obstruction)
                    r.check(k.label + ": leibman_test(H=" + std::to_string(k.H) + ", C=" + k.C.str() + ")", rep.obstruction == *k.expect_obstruction,
                            rep.verdict(), *k.expect_obstruction ? "obstruction" : "no-obstruction-found", rep.str());
                if (k.expect_witness)
                    r.check(k.label + ": witness", rep.witness && rep.witness->coeffs() == *k.expect_witness,
                            rep.witness ? json(rep.witness->coeffs()) : json("none"), json(*k.expect_witness));
            } else {
                auto rep = empirical_distribution_test(k.orbit, k.N, k.char_height);
                out.push_back({{"label", k.label},
                               {"max_average", num(rep.max_average)},
                               {"worst", rep.worst},
                               {"characters", static_cast<long>(rep.averages.size())},
                               {"flagged", static_cast<long>(rep.flagged)}});
                if (k.max_average)
                    r.check(k.label + ": max character average (N=" + std::to_string(k.N) + ", height " + std::to_string(k.char_height) + ")",
                            rep.max_average <= *k.max_average, num(rep.max_average), "<= " + num(*k.max_average).dump(), "worst " + rep.worst);
            }
        }
        r.measurements["cases"] = out;
    };
}

// --- freqreg ---------------------------------------------------------------------------------

struct RegularizeAudit {
    bool representation = false;
    bool certified = false;
    std::optional<bool> oracle_certified;  // brute force, when at most 3 outputs stay independent
    bool small_ok = false;
    bool idempotent = false;
};

inline RegularizeAudit audit(const std::vector<TorusPoint>& xs, const FrequencyDecomposition& d, const Rational& eps, long H, long Q)
{
    RegularizeAudit a;
    a.representation = representation_holds(xs, d);
    a.certified = !find_relation(d.independent, eps, H).has_value();
    if (d.independent.size() <= 3) a.oracle_certified = !oracle::brute_relation(d.independent, eps, H).has_value();
    a.small_ok = std::all_of(d.small.begin(), d.small.end(), [&](const TorusPoint& s) { return torus_norm(s.value()) <= eps; });
    auto again = regularize(d.independent, eps, H, Q);
    a.idempotent = again.independent == d.independent && again.rational.empty() && again.small.empty() && again.steps == 0;
    return a;
}

inline json points_json(const std::vector<TorusPoint>& v)
{
    json out = json::array();
    for (const auto& x : v) out.push_back(x.value().str());
    return out;
}

inline Pipeline freqreg_pipeline(Params& p)
{
    const Rational eps = p.rational("eps");
    const long H = p.positive("H"), Q = p.positive("Q");
    if (eps.sign() < 0) throw ScenarioError("freqreg: eps must be nonnegative");
    if (p.has("freqs")) {
        std::vector<TorusPoint> xs;
        for (const auto& x : p.rationals("freqs")) xs.emplace_back(x);
        if (xs.size() > max_relation_length) throw ScenarioError("freqreg: at most " + std::to_string(max_relation_length) + " frequencies");
        return [=](Report& r) {
            auto d = regularize(xs, eps, H, Q);
            auto a = audit(xs, d, eps, H, Q);
            r.measurements["independent"] = points_json(d.independent);
            r.measurements["rational"] = points_json(d.rational);
            r.measurements["small"] = points_json(d.small);
            r.measurements["representation"] = d.representation;
            r.measurements["steps"] = static_cast<long>(d.steps);
            r.measurements["max_denominator"] = d.max_denominator.get_str();
            r.measurements["within_Q"] = d.within_Q;
            r.check("exact representation of every input", a.representation);
            r.check("no relation of height <= H within eps among independent outputs", a.certified);
            if (a.oracle_certified) r.check("brute-force certification", *a.oracle_certified);
            r.check("small outputs within eps", a.small_ok);
            r.check("idempotent", a.idempotent);
        };
    }
    const std::uint64_t seed = p.get<std::uint64_t>("suite_seed");
    const long count = p.positive("count"), min_desc = p.get<long>("min_descended");
    return [=](Report& r) {
        long rep_ok = 0, cert_ok = 0, oracle_ok = 0, oracle_n = 0, small_ok = 0, idem_ok = 0, descended = 0, within = 0;
        std::string witness;
        long i = 0;
        for (const auto& xs : regularization_suite(seed, static_cast<std::size_t>(count))) {
            auto d = regularize(xs, eps, H, Q);
            auto a = audit(xs, d, eps, H, Q);
            rep_ok += a.representation;
            cert_ok += a.certified;
            small_ok += a.small_ok;
            idem_ok += a.idempotent;
            descended += d.steps > 0;
            within += d.within_Q;
            if (a.oracle_certified) {
                ++oracle_n;
                oracle_ok += *a.oracle_certified;
            }
            if (witness.empty() && !(a.representation && a.certified && a.small_ok && a.idempotent && a.oracle_certified.value_or(true)))
                witness = "case " + std::to_string(i) + ": " + points_json(xs).dump();
            ++i;
        }
        r.check("exact representation", rep_ok == count, ratio(rep_ok, count), ratio(count, count), witness);
        r.check("certified independence at (eps, H)", cert_ok == count, ratio(cert_ok, count), ratio(count, count));
        r.check("brute-force certification (at most 3 independent)", oracle_ok == oracle_n, ratio(oracle_ok, oracle_n), ratio(oracle_n, oracle_n));
        r.check("small outputs within eps", small_ok == count, ratio(small_ok, count), ratio(count, count));
        r.check("idempotence", idem_ok == count, ratio(idem_ok, count), ratio(count, count));
        r.check("cases with at least one descent step", descended >= min_desc, descended, ">= " + std::to_string(min_desc));
        r.measurements["rational denominators within Q"] = ratio(within, count);
    };
}

// --- schema ------------------------------------------------------------------------------------

inline Pipeline schema_pipeline(Params& p, const std::filesystem::path& base)
{
    SchemaPtr s = io::resolve_schema(p.raw("schema"), base);
    const std::string expect = p.get_or<std::string>("expect", "pass");
    if (expect != "pass" && expect != "fail") throw ScenarioError("schema-verify: expect must be \"pass\" or \"fail\"");
    const std::uint64_t seed = p.get_or<std::uint64_t>("seed", 20240601);
    return [=](Report& r) {
        auto rep = verify_schema(s, seed);
        std::string detail = rep.pass ? std::string{} : rep.axiom + ": " + rep.detail;
        for (const auto& w : rep.witness) detail += " " + w;
        r.check("filtration and lattice axioms", rep.pass == (expect == "pass"), rep.pass ? "pass" : "fail", expect, detail);
        const json dumped = io::schema_to_json(s);
        auto back = io::schema_from_json(dumped);
        const bool same = back->basis() == s->basis() && back->table() == s->table() && back->filtration() == s->filtration() && back->kind() == s->kind();
        r.check("JSON round trip", same);
        r.measurements["checks"] = rep.checks;
        r.measurements["schema"] = dumped;
    };
}

// --- polynomial algebra -----------------------------------------------------------------------

inline Pipeline poly_pipeline(Params& p)
{
    std::vector<SchemaPtr> groups;
    for (const auto& ref : p.get<std::vector<std::string>>("groups")) groups.push_back(catalog(ref));
    const long roundtrip = p.positive("roundtrip"), products = p.positive("products"), cubes = p.positive("cubes");
    const long order = p.positive("product_order"), h_range = p.positive("product_h_range"), cube_range = p.positive("cube_range");
    const std::uint64_t seed = seed_of(p);
    return [=](Report& r) {
        long rt_ok = 0, rt_n = 0, pr_ok = 0, pr_n = 0, hk_ok = 0, hk_n = 0;
        std::string w_rt, w_pr, w_hk;
        for (const auto& s : groups) {
            std::mt19937_64 rng(seed);
            const int k = natural_k(s);
            const auto J = default_J(s, k);
            for (long t = 0; t < roundtrip; ++t) {
                auto g = sample_polyseq(s, k, rng);
                std::map<Point, GroupElement> samples;
                for (const auto& j : J) samples.emplace(Point(j.begin(), j.end()), g(Point(j.begin(), j.end())));
                ++rt_n;
                if (taylor_extract(samples, s, J) == g)
                    ++rt_ok;
                else if (w_rt.empty())
                    w_rt = s->name() + " trial " + std::to_string(t);
            }
            for (long t = 0; t < products; ++t) {
                auto a = sample_polyseq(s, k, rng), b = sample_polyseq(s, k, rng);
                auto prod = pointwise_product(a, b);
                auto rep = verify_polynomial(prod, static_cast<int>(order), h_range);
                bool ok = rep.pass;
                for (long n = -2; n <= 2 && ok; ++n) {
                    Point pt(static_cast<std::size_t>(k), n);
                    ok = prod(pt) == mul(a(pt), b(pt));
                }
                ++pr_n;
                if (ok)
                    ++pr_ok;
                else if (w_pr.empty())
                    w_pr = s->name() + " trial " + std::to_string(t) + ": " + rep.str();
            }
            const int top = std::min(degree_bound(*s) + 1, 4);
            std::uniform_int_distribution<int> cube_order(1, top);
            PolySeq g = sample_polyseq(s, k, rng);
            for (long t = 0; t < cubes; ++t) {
                if (t % 25 == 0) g = sample_polyseq(s, k, rng);
                auto cube = image_cube(g, sample_domain_cube(*s, k, cube_order(rng), cube_range, rng));
                auto res = hk_membership(cube);
                ++hk_n;
                if (res.member && check_certificate(cube, res.certificate))
                    ++hk_ok;
                else if (w_hk.empty())
                    w_hk = s->name() + " cube " + std::to_string(t) + ": " + res.detail;
            }
        }
        r.check("Taylor round trip", rt_ok == rt_n, ratio(rt_ok, rt_n), ratio(rt_n, rt_n), w_rt);
        r.check("pointwise products polynomial", pr_ok == pr_n, ratio(pr_ok, pr_n), ratio(pr_n, pr_n), w_pr);
        r.check("image cubes in HK with a valid certificate", hk_ok == hk_n, ratio(hk_ok, hk_n), ratio(hk_n, hk_n), w_hk);
        r.measurements["groups"] = static_cast<long>(groups.size());
    };
}

} // namespace scenario_detail

inline const std::vector<std::string>& scenario_kinds()
{
    static const std::vector<std::string> kinds = {"norm", "bracket-identity", "heisenberg-demo", "multilin-demo", "skew-lift", "gcs",
                                                   "equid", "freqreg", "schema-verify", "poly-algebra"};
    return kinds;
}

/// Validates and runs. ScenarioError signals a malformed scenario; failures
/// inside the pipeline are reported as a failing "pipeline" check.
inline Report run_scenario(const json& s, const std::filesystem::path& base = {})
{
    using namespace scenario_detail;
    if (!s.is_object()) throw ScenarioError("scenario: expected an object");
    for (const auto& [key, unused] : s.items())
        if (key != "name" && key != "kind" && key != "criterion" && key != "description" && key != "runtime_limit_s" && key != "params")
            throw ScenarioError("scenario: unknown field '" + key + "'");
    Report r;
    try {
        r.name = s.at("name").get<std::string>();
        r.kind = s.at("kind").get<std::string>();
        if (s.contains("criterion")) r.criterion = s.at("criterion").get<int>();
        if (s.contains("runtime_limit_s")) r.runtime_limit_s = s.at("runtime_limit_s").get<double>();
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    }
    const json params = s.value("params", json::object());
    Params p(params, r.name);

    Pipeline run;
    try {
        if (r.kind == "norm")
            run = norm_pipeline(p, base);
        else if (r.kind == "bracket-identity")
            run = bracket_pipeline(p, base);
        else if (r.kind == "heisenberg-demo")
            run = heisenberg_pipeline(p);
        else if (r.kind == "multilin-demo")
            run = multilin_pipeline(p);
        else if (r.kind == "skew-lift")
            run = lift_pipeline(p);
        else if (r.kind == "gcs")
            run = gcs_pipeline(p);
        else if (r.kind == "equid")
            run = equid_pipeline(p, base);
        else if (r.kind == "freqreg")
            run = freqreg_pipeline(p);
        else if (r.kind == "schema-verify")
            run = schema_pipeline(p, base);
        else if (r.kind == "poly-algebra")
            run = poly_pipeline(p);
        else
            throw ScenarioError("scenario: unknown kind '" + r.kind + "'");
        p.finish();
    } catch (const ScenarioError&) {
        throw;
    } catch (const json::exception& e) {
        throw ScenarioError(r.name + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(r.name + ": " + e.what());
    }
    r.inputs = p.effective();

    const auto t0 = std::chrono::steady_clock::now();
    try {
        run(r);
    } catch (const std::exception& e) {
        r.check("pipeline", false, nullptr, nullptr, e.what());
    }
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline Report run_scenario_file(const std::filesystem::path& path)
{
    json s;
    try {
        s = io::read_json_file(path);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
    return run_scenario(s, path.parent_path());
}

} // namespace nilcalc
