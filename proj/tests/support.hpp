#pragma once

#include "nilcalc/catalog.hpp"
#include "nilcalc/polyseq.hpp"

#include <random>
#include <string>
#include <vector>

namespace support {

using namespace nilcalc;

inline Rational q(long p, long d = 1) { return Rational(p, d); }

inline GroupElement el(const SchemaPtr& s, std::vector<Rational> t) { return GroupElement(s, std::move(t)); }

inline const std::vector<std::string>& catalog_refs()
{
    static const std::vector<std::string> refs = {
        "torus(2,3)",
        "heisenberg",
        "heisenberg_degrank32",
        "free2step(3)",
        "appC_multidegree",
        "universal([2],(3,3))",
        "universal([2],(4,4))",
        "universal([2,1],(3,2))",
        "universal([1,1],(4,3))",
        "product(heisenberg,torus(1,2))",
    };
    return refs;
}

inline int natural_k(const SchemaPtr& s) { return s->kind() == FiltKind::multidegree ? s->index_arity() : 1; }

inline PolySeq random_polyseq(const SchemaPtr& s, int k, std::mt19937_64& rng, long bound = 2, long max_den = 4)
{
    return sample_polyseq(s, k, rng, bound, max_den);
}

inline int degree_bound(const NilSchema& s)
{
    int b = 0;
    for (const auto& [idx, pos] : s.filtration())
        if (!pos.empty()) b = std::max(b, idx.total());
    return b;
}

} // namespace support
