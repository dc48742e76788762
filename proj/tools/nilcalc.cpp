// nilcalc: command-line front end. Every experiment command builds a scenario
// document from its flags and runs it through run_scenario, so a command line
// and the equivalent scenario file produce the same report.
//
// Exit status: 0 all verdicts pass, 1 some verdict fails, 2 usage or
// validation error.

#include "nilcalc/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace nilcalc;
namespace fs = std::filesystem;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

struct Output {
    std::string format = "text";
    bool timings = false;

    Format fmt() const { return format == "json" ? Format::json : format == "csv" ? Format::csv : Format::text; }
};

int emit(const Report& r, const Output& out)
{
    std::cout << emit_report(r, out.fmt(), out.timings);
    return r.pass() ? exit_pass : exit_fail;
}

int run(const json& scenario, const Output& out, const fs::path& base = fs::current_path())
{
    return emit(run_scenario(scenario, base), out);
}

json scenario(const std::string& name, const std::string& kind, json params)
{
    json s;
    s["name"] = name;
    s["kind"] = kind;
    s["params"] = std::move(params);
    return s;
}

/// Inline JSON text, or a path to a JSON file.
json json_arg(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ScenarioError(std::string("inline JSON: ") + e.what());
        }
    }
    try {
        return io::read_json_file(text);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
}

/// A catalog reference, a .json file, or inline JSON.
json schema_arg(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t\n");
    if (first != std::string::npos && text[first] == '{') return json_arg(text);
    return text;
}

/// A bracket expression "(...)" is a phase; anything else names a CSV file.
json function_arg(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t");
    if (first != std::string::npos && text[first] == '(') return {{"phase", text}};
    return {{"csv", fs::absolute(text).string()}};
}

/// "quadratic:p/q" or a bracket expression in n = (var 0), h = (var 1).
json family_arg(const std::string& text)
{
    const std::string tag = "quadratic:";
    if (text.rfind(tag, 0) == 0) return {{"quadratic", text.substr(tag.size())}};
    return {{"phase", text}};
}

std::vector<long> parse_longs(const std::string& text)
{
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.empty()) throw ScenarioError("expected comma-separated integers, got '" + text + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"nilcalc: exact nilpotent-group computations, Gowers norms and equidistribution tests"};
    app.require_subcommand(1);
    app.fallthrough();
    Output out;
    app.add_option("--format", out.format, "report format")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_flag("--timings", out.timings, "include wall-clock runtime in structured reports");

    std::function<int()> action;

    // scenario run FILE...
    auto* sc = app.add_subcommand("scenario", "run scenario files");
    sc->require_subcommand(1);
    std::vector<std::string> scenario_files;
    auto* sc_run = sc->add_subcommand("run", "run one or more scenario files");
    sc_run->add_option("files", scenario_files, "scenario JSON files")->required()->check(CLI::ExistingFile);
    sc_run->callback([&] {
        action = [&] {
            int status = exit_pass;
            for (const auto& f : scenario_files) status = std::max(status, emit(run_scenario_file(f), out));
            return status;
        };
    });

    // norm / gowers norm
    struct NormArgs {
        std::string f;
        std::vector<long> d, N;
        std::optional<long> Ntilde;
    };
    auto norm_args = std::make_shared<NormArgs>();
    auto add_norm = [&](CLI::App* parent, const std::string& name) {
        auto* c = parent->add_subcommand(name, "Gowers U^d[N] norm of a sampled function");
        c->add_option("--f", norm_args->f, "bracket phase expression in (var 0), or a CSV file n,re,im,...")->required();
        c->add_option("--d", norm_args->d, "order(s) d >= 1")->required()->delimiter(',');
        c->add_option("--N", norm_args->N, "length(s) N")->required()->delimiter(',');
        c->add_option("--Ntilde", norm_args->Ntilde, "cyclic group size (default 2^d N)");
        c->callback([&] {
            action = [&] {
                json p{{"mode", "value"}, {"f", function_arg(norm_args->f)}, {"d", norm_args->d}, {"N", norm_args->N}};
                if (norm_args->Ntilde) p["Ntilde"] = *norm_args->Ntilde;
                return run(scenario("norm", "norm", p), out);
            };
        });
    };

    // gcs / gowers gcs
    struct GcsArgs {
        std::string family;
        std::vector<std::string> quads;
        long N = 0;
    };
    auto gcs_args = std::make_shared<GcsArgs>();
    auto add_gcs = [&](CLI::App* parent, const std::string& name) {
        auto* c = parent->add_subcommand(name, "Cauchy-Schwarz correlation statistic on quadruples");
        c->add_option("--family", gcs_args->family, "quadratic:p/q, or a bracket expression in n = (var 0), h = (var 1)")->required();
        c->add_option("--quad", gcs_args->quads, "h1,h2,h3,h4 (repeatable)")->required();
        c->add_option("--N", gcs_args->N, "length N")->required();
        c->callback([&] {
            action = [&] {
                json quads = json::array();
                for (const auto& q : gcs_args->quads) quads.push_back(parse_longs(q));
                return run(scenario("gcs", "gcs", {{"mode", "quadruples"}, {"family", family_arg(gcs_args->family)}, {"N", gcs_args->N}, {"quadruples", quads}}),
                           out);
            };
        });
    };

    add_norm(&app, "norm");
    add_gcs(&app, "gcs");
    auto* gowers = app.add_subcommand("gowers", "Gowers norm commands");
    gowers->require_subcommand(1);
    add_norm(gowers, "norm");
    add_gcs(gowers, "gcs");

    // bracket
    auto* br = app.add_subcommand("bracket", "bracket polynomial commands");
    br->require_subcommand(1);
    std::string alpha, beta, gamma, expr, schema_text, orbit_text;
    long n_max = 0, N = 0;
    std::vector<long> eta;
    std::vector<long> points;
    auto* br_id = br->add_subcommand("check-identity", "{an}bn + {bn}an = abn^2 + {an}{bn} mod 1 for n in [1, n_max]");
    br_id->add_option("--alpha", alpha)->required();
    br_id->add_option("--beta", beta)->required();
    br_id->add_option("--n-max", n_max)->required();
    br_id->callback([&] {
        action = [&] {
            return run(scenario("bracket check-identity", "bracket-identity", {{"mode", "product"}, {"alpha", alpha}, {"beta", beta}, {"n_max", n_max}}), out);
        };
    });
    auto* br_cmp = br->add_subcommand("compare", "e(expr(n)) against the unsmoothed nilcharacter of an orbit");
    br_cmp->add_option("--expr", expr)->required();
    br_cmp->add_option("--schema", schema_text, "catalog reference, schema file or inline JSON")->required();
    br_cmp->add_option("--orbit", orbit_text, "orbit JSON file or inline JSON")->required();
    br_cmp->add_option("--eta", eta, "vertical frequency coefficients")->required()->delimiter(',');
    br_cmp->add_option("--N", N)->required();
    br_cmp->callback([&] {
        action = [&] {
            return run(scenario("bracket compare", "bracket-identity",
                                {{"mode", "compare"}, {"expr", expr}, {"schema", schema_arg(schema_text)}, {"orbit", json_arg(orbit_text)}, {"eta", eta}, {"N", N}}),
                       out);
        };
    });
    auto* br_eval = br->add_subcommand("eval", "exact value of a bracket expression");
    br_eval->add_option("--expr", expr)->required();
    br_eval->add_option("--n", points, "variable values")->delimiter(',');
    br_eval->callback([&] {
        action = [&] {
            auto e = BracketExpr::parse(expr);
            if (static_cast<int>(points.size()) < e.arity()) throw ScenarioError("bracket eval: the expression needs " + std::to_string(e.arity()) + " values");
            const Rational v = eval_bracket(e, points);
            if (out.fmt() == Format::json)
                std::cout << json{{"expr", e.str()}, {"n", points}, {"value", v.str()}, {"mod1", signed_frac(v).str()}}.dump(2) << "\n";
            else
                std::cout << v.str() << "\n";
            return exit_pass;
        };
    });

    // heisenberg / multilin / lift
    long count = 0;
    std::uint64_t seed = 1;
    auto freq_options = [&](CLI::App* c, bool with_gamma) {
        c->add_option("--alpha", alpha);
        c->add_option("--beta", beta);
        if (with_gamma) c->add_option("--gamma", gamma);
        c->add_option("--count", count, "number of seeded random parameter tuples (instead of explicit values)");
        c->add_option("--seed", seed);
    };
    auto freq_params = [&](json p, bool with_gamma) {
        if (!alpha.empty()) {
            p["alpha"] = alpha;
            p["beta"] = beta;
            if (with_gamma) p["gamma"] = gamma;
        } else {
            if (count < 1) throw ScenarioError("give --alpha/--beta or --count");
            p["count"] = count;
            p["seed"] = seed;
        }
        return p;
    };
    auto* heis = app.add_subcommand("heisenberg", "single-chart Heisenberg nilcharacter against e({alpha n} beta n)");
    freq_options(heis, false);
    heis->add_option("--N", N)->required();
    heis->callback([&] { action = [&] { return run(scenario("heisenberg", "heisenberg-demo", freq_params({{"N", N}}, false)), out); }; });
    auto* ml = app.add_subcommand("multilin", "multidegree (1,1) nilcharacter on the diagonal");
    freq_options(ml, false);
    ml->add_option("--N", N)->required();
    ml->callback([&] { action = [&] { return run(scenario("multilin", "multilin-demo", freq_params({{"N", N}}, false)), out); }; });
    auto* lift = app.add_subcommand("lift", "skew-torus orbit lifted to the Heisenberg nilmanifold");
    freq_options(lift, true);
    lift->add_option("--n-max", n_max)->required();
    lift->callback([&] { action = [&] { return run(scenario("lift", "skew-lift", freq_params({{"n_max", n_max}}, true)), out); }; });

    // equid test
    auto* eq = app.add_subcommand("equid", "equidistribution tests");
    eq->require_subcommand(1);
    long height = 10, char_height = 0;
    std::string C = "10";
    auto* eq_test = eq->add_subcommand("test", "search for a horizontal-character obstruction");
    eq_test->add_option("--schema", schema_text)->required();
    eq_test->add_option("--orbit", orbit_text)->required();
    eq_test->add_option("--N", N)->required();
    eq_test->add_option("--height", height, "character height bound H")->capture_default_str();
    eq_test->add_option("--C", C, "smoothness constant (rational)")->capture_default_str();
    eq_test->add_option("--char-height", char_height, "also run the empirical character test up to this height");
    eq_test->callback([&] {
        action = [&] {
            const json sch = schema_arg(schema_text), orb = json_arg(orbit_text);
            json cases = json::array({{{"label", "leibman"}, {"schema", sch}, {"orbit", orb}, {"N", N}, {"test", "leibman"}, {"H", height}, {"C", C}}});
            if (char_height > 0)
                cases.push_back({{"label", "empirical"}, {"schema", sch}, {"orbit", orb}, {"N", N}, {"test", "empirical"}, {"char_height", char_height}});
            return run(scenario("equid test", "equid", {{"cases", cases}}), out);
        };
    });

    // freqreg run
    auto* fr = app.add_subcommand("freqreg", "frequency regularization");
    fr->require_subcommand(1);
    std::string freqs, eps = "1/10000";
    long H = 10, Q = 64;
    auto* fr_run = fr->add_subcommand("run", "decompose frequencies into independent, rational and small parts");
    fr_run->add_option("--freqs", freqs, "p1/q1,p2/q2,...")->required();
    fr_run->add_option("--eps", eps)->capture_default_str();
    fr_run->add_option("--H", H)->capture_default_str();
    fr_run->add_option("--Q", Q)->capture_default_str();
    fr_run->callback([&] {
        action = [&] {
            json xs = json::array();
            for (const auto& x : io::rationals_from_list(freqs)) xs.push_back(x.str());
            return run(scenario("freqreg run", "freqreg", {{"freqs", xs}, {"eps", eps}, {"H", H}, {"Q", Q}}), out);
        };
    });

    // schema load | verify | print
    auto* sch = app.add_subcommand("schema", "schema files");
    sch->require_subcommand(1);
    std::string schema_ref;
    auto* sch_print = sch->add_subcommand("print", "load a schema and print it as JSON");
    sch_print->alias("load");
    sch_print->add_option("schema", schema_ref, "catalog reference or schema file")->required();
    sch_print->callback([&] {
        action = [&] {
            try {
                std::cout << io::schema_to_json(io::resolve_schema(schema_arg(schema_ref), fs::current_path())).dump(2) << "\n";
            } catch (const std::invalid_argument& e) {
                throw ScenarioError(e.what());
            }
            return exit_pass;
        };
    });
    auto* sch_verify = sch->add_subcommand("verify", "check the filtration and lattice axioms");
    sch_verify->add_option("schema", schema_ref, "catalog reference or schema file")->required();
    sch_verify->callback([&] { action = [&] { return run(scenario("schema verify", "schema-verify", {{"schema", schema_arg(schema_ref)}}), out); }; });

    // nilchar eval
    auto* nc = app.add_subcommand("nilchar", "nilcharacters");
    nc->require_subcommand(1);
    std::string radius;
    auto* nc_eval = nc->add_subcommand("eval", "stream n, flagged, re_1, im_1, ... as CSV");
    nc_eval->add_option("--schema", schema_text)->required();
    nc_eval->add_option("--orbit", orbit_text)->required();
    nc_eval->add_option("--eta", eta)->required()->delimiter(',');
    nc_eval->add_option("--N", N)->required();
    nc_eval->add_option("--radius", radius, "smoothing radius p/q (default: single unsmoothed chart)");
    nc_eval->callback([&] {
        action = [&] {
            SchemaPtr s;
            NilcharSpec spec = [&] {
                try {
                    s = io::resolve_schema(schema_arg(schema_text), fs::current_path());
                    PolySeq g = io::polyseq_from_json(s, json_arg(orbit_text));
                    VerticalChar v(s, s->top_index(), eta);
                    return radius.empty() ? unsmoothed_spec(g, v) : smoothed_spec(g, v, Rational::parse(radius));
                } catch (const ScenarioError&) {
                    throw;
                } catch (const std::invalid_argument& e) {
                    throw ScenarioError(e.what());
                }
            }();
            std::cout << "n,flagged";
            for (std::size_t i = 1; i <= spec.output_dim(); ++i) std::cout << ",re" << i << ",im" << i;
            std::cout << "\n";
            std::cout.precision(15);
            for (long n = 1; n <= N; ++n) {
                Point p(static_cast<std::size_t>(spec.orbit.domain_dim()), n);
                auto v = eval_nilchar(spec, p);
                std::cout << n << "," << (v.flagged ? 1 : 0);
                for (const auto& z : v.value.to_complex()) std::cout << "," << z.real() << "," << z.imag();
                std::cout << "\n";
            }
            return exit_pass;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    if (!action) {
        std::cerr << app.help();
        return exit_usage;
    }
    try {
        return action();
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_fail;
    }
}
