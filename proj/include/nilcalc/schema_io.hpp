#pragma once

// JSON documents for schemas, group elements and polynomial sequences.
// Rationals travel as "p/q" strings so every round trip is bit-exact.

#include "nilcalc/catalog.hpp"
#include "nilcalc/polyseq.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilcalc::io {

using json = nlohmann::ordered_json;

inline std::string rational_text(const Rational& r) { return r.str(); }

/// Accepts "p/q", "p" or a JSON integer.
inline Rational rational_from(const json& v)
{
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw std::invalid_argument("expected a rational as \"p/q\" or an integer, got " + v.dump());
}

inline json rationals_json(const std::vector<Rational>& xs)
{
    json out = json::array();
    for (const auto& x : xs) out.push_back(rational_text(x));
    return out;
}

inline std::vector<Rational> rationals_from(const json& v)
{
    if (!v.is_array()) throw std::invalid_argument("expected an array of rationals, got " + v.dump());
    std::vector<Rational> out;
    for (const auto& x : v) out.push_back(rational_from(x));
    return out;
}

/// "p1/q1,p2/q2,..." as typed on a command line.
inline std::vector<Rational> rationals_from_list(const std::string& text)
{
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(Rational::parse(item));
    return out;
}

// ---------------------------------------------------------------------------
// Schemas
//
//   {"name": ..., "basis": [labels], "commutators": ["e1 e2 -> c", ...],
//    "table": "group" | "lie", "filtration": {"1": [labels], "2": "c"}, "class": 2}
//
// A commutator line "i j -> word" gives [e_i, e_j] (group words) or the Lie
// bracket, with i before j in the basis; i and j are labels or 0-based
// positions, and the word is a list of
// "label" or "label^p/q" factors in basis order ("1" for the identity). A
// filtration entry is a list of labels or a single label meaning the suffix of
// the basis that starts there.
// ---------------------------------------------------------------------------

namespace io_detail {

inline std::vector<std::string> split_ws(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

inline int position_of(const std::vector<std::string>& basis, const std::string& token)
{
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (basis[k] == token) return static_cast<int>(k);
    std::size_t used = 0;
    int k = -1;
    try {
        k = std::stoi(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || k < 0 || k >= static_cast<int>(basis.size()))
        throw std::invalid_argument("schema: unknown basis label '" + token + "'");
    return k;
}

inline Coords parse_word(const std::string& text, const std::vector<std::string>& basis)
{
    Coords w(basis.size());
    for (const auto& f : split_ws(text)) {
        if (f == "1") continue;
        const auto caret = f.find('^');
        const int k = position_of(basis, f.substr(0, caret));
        if (!w[static_cast<std::size_t>(k)].is_zero()) throw std::invalid_argument("schema: label '" + basis[static_cast<std::size_t>(k)] + "' repeated in word '" + text + "'");
        w[static_cast<std::size_t>(k)] = caret == std::string::npos ? Rational(1) : Rational::parse(f.substr(caret + 1));
    }
    return w;
}

inline std::string word_text(const Coords& w, const std::vector<std::string>& basis)
{
    std::string out;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k].is_zero()) continue;
        if (!out.empty()) out += ' ';
        out += basis[k];
        if (w[k] != Rational(1)) out += "^" + w[k].str();
    }
    return out.empty() ? "1" : out;
}

} // namespace io_detail

inline SchemaPtr schema_from_json(const json& j)
{
    using io_detail::position_of;
    if (!j.is_object()) throw std::invalid_argument("schema: expected an object");
    for (const char* field : {"name", "basis", "filtration"})
        if (!j.contains(field)) throw std::invalid_argument(std::string("schema: missing field '") + field + "'");
    for (const auto& [key, unused] : j.items())
        if (key != "name" && key != "basis" && key != "commutators" && key != "table" && key != "filtration" && key != "class")
            throw std::invalid_argument("schema: unknown field '" + key + "'");

    SchemaDef def;
    def.name = j.at("name").get<std::string>();
    def.basis = j.at("basis").get<std::vector<std::string>>();
    const std::string table = j.value("table", std::string("group"));
    if (table == "group")
        def.table = SchemaDef::Table::group_words;
    else if (table == "lie")
        def.table = SchemaDef::Table::lie_brackets;
    else
        throw std::invalid_argument("schema: table must be \"group\" or \"lie\"");

    for (const auto& line : j.value("commutators", json::array())) {
        const std::string text = line.get<std::string>();
        const auto arrow = text.find("->");
        if (arrow == std::string::npos) throw std::invalid_argument("schema: commutator '" + text + "' lacks '->'");
        const auto lhs = io_detail::split_ws(text.substr(0, arrow));
        if (lhs.size() != 2) throw std::invalid_argument("schema: commutator '" + text + "' needs two generators before '->'");
        const int a = position_of(def.basis, lhs[0]), b = position_of(def.basis, lhs[1]);
        Coords w = io_detail::parse_word(text.substr(arrow + 2), def.basis);
        if (a >= b) throw std::invalid_argument("schema: commutator '" + text + "' must list its generators in basis order");
        if (def.commutators.count({a, b})) throw std::invalid_argument("schema: commutator '" + text + "' given twice");
        def.commutators[{a, b}] = std::move(w);
    }

    bool kind_set = false;
    for (const auto& [key, val] : j.at("filtration").items()) {
        FiltIndex idx = FiltIndex::parse(key);
        if (!kind_set) {
            def.kind = idx.kind;
            kind_set = true;
        }
        std::vector<int> pos;
        if (val.is_string()) {
            for (int k = position_of(def.basis, val.get<std::string>()); k < static_cast<int>(def.basis.size()); ++k) pos.push_back(k);
        } else {
            for (const auto& label : val) pos.push_back(position_of(def.basis, label.get<std::string>()));
        }
        def.filtration.emplace_back(idx, std::move(pos));
    }

    SchemaPtr s = make_schema(def);
    if (j.contains("class") && j.at("class").get<int>() != s->nilpotency_class())
        throw std::invalid_argument("schema " + def.name + ": declared class " + std::to_string(j.at("class").get<int>()) +
                                    " but the commutator table has class " + std::to_string(s->nilpotency_class()));
    return s;
}

/// Group-word table, labels throughout. Reloading gives an equal schema.
inline json schema_to_json(const SchemaPtr& s)
{
    const auto& basis = s->basis();
    json j;
    j["name"] = s->name();
    j["basis"] = basis;
    json comm = json::array();
    for (const auto& [ij, w] : s->table()) comm.push_back(basis[static_cast<std::size_t>(ij.first)] + " " + basis[static_cast<std::size_t>(ij.second)] + " -> " + io_detail::word_text(w, basis));
    j["commutators"] = comm;
    j["table"] = "group";
    json filt = json::object();
    for (const auto& [idx, pos] : s->filtration()) {
        json labels = json::array();
        for (int k : pos) labels.push_back(basis[static_cast<std::size_t>(k)]);
        filt[idx.str()] = labels;
    }
    j["filtration"] = filt;
    j["class"] = s->nilpotency_class();
    return j;
}

inline json read_json_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    if (!in) throw std::invalid_argument("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(p.string() + ": " + e.what());
    }
}

/// A catalog reference ("heisenberg", "torus(2,3)"), a path ending in .json
/// (relative to base), or an inline schema object.
inline SchemaPtr resolve_schema(const json& spec, const std::filesystem::path& base = {})
{
    if (spec.is_object()) return schema_from_json(spec);
    if (!spec.is_string()) throw std::invalid_argument("schema: expected a catalog reference, a .json path or an object");
    const std::string ref = spec.get<std::string>();
    if (ref.size() > 5 && ref.substr(ref.size() - 5) == ".json") {
        std::filesystem::path p(ref);
        return schema_from_json(read_json_file(p.is_absolute() ? p : base / p));
    }
    return catalog(ref);
}

// ---------------------------------------------------------------------------
// Elements and polynomial sequences
//
//   {"k": 1, "taylor": [{"j": [1], "g": ["1/3", "2/5", "0"]}, ...]}
//
// Missing multi-indices of default_J are the identity; the constructor checks
// that each g_j lies in its slot group.
// ---------------------------------------------------------------------------

inline GroupElement element_from_json(const SchemaPtr& s, const json& v) { return GroupElement(s, rationals_from(v)); }

inline json element_json(const GroupElement& g) { return rationals_json(g.coords()); }

inline PolySeq polyseq_from_json(const SchemaPtr& s, const json& j)
{
    if (!j.is_object() || !j.contains("taylor")) throw std::invalid_argument("orbit: expected {\"k\": ..., \"taylor\": [...]}");
    const int k = j.value("k", 1);
    std::map<MultiIndex, GroupElement> given;
    for (const auto& term : j.at("taylor")) {
        auto idx = term.at("j").get<MultiIndex>();
        if (static_cast<int>(idx.size()) != k) throw std::invalid_argument("orbit: multi-index " + term.at("j").dump() + " has the wrong length");
        if (!given.emplace(idx, element_from_json(s, term.at("g"))).second) throw std::invalid_argument("orbit: multi-index " + term.at("j").dump() + " repeated");
    }
    PolySeq::Coeffs c;
    for (const auto& idx : default_J(s, k)) {
        auto it = given.find(idx);
        c.emplace_back(idx, it == given.end() ? GroupElement::identity(s) : it->second);
        if (it != given.end()) given.erase(it);
    }
    for (const auto& [idx, x] : given) c.emplace_back(idx, x);
    return PolySeq::make(s, k, std::move(c));
}

inline json polyseq_json(const PolySeq& g)
{
    json j;
    j["k"] = g.domain_dim();
    json terms = json::array();
    for (const auto& [idx, x] : g.coeffs()) {
        if (x.is_identity()) continue;
        terms.push_back({{"j", idx}, {"g", element_json(x)}});
    }
    j["taylor"] = terms;
    return j;
}

} // namespace nilcalc::io
