#pragma once

#include <json.hpp>
#include <string>

#include "stochorder/couplings.hpp"
#include "stochorder/lattice.hpp"
#include "stochorder/orders.hpp"

namespace stochorder::io {

using Json = nlohmann::json;

/// Parses `arg` as JSON text when it starts with '{' or '[', otherwise reads
/// the file it names. Throws InvalidArgument on unreadable or malformed input.
Json load_json(const std::string& arg);

// Distribution specs:
//   {"type":"uniform01"} {"type":"cauchy"} {"type":"pareto","alpha":a}
//   {"type":"pointmass","c":c} {"type":"discrete","atoms":[...],"probs":[...]}
//   {"type":"affine","a":a,"b":b,"base":{...}}
//   {"type":"mixture","weights":[...],"components":[{...},...]}
//   {"type":"coupling_sum","coupling":{coupling spec}}
Distribution distribution_from_json(const Json& j, const QuadConfig& cfg = {});

// Coupling specs:
//   {"type":"comonotonic"|"countermonotonic","marginals":[{...},...]}
//   {"type":"discrete_joint","atoms":[[x1,...,xd],...],"probs":[...]}
Coupling coupling_from_json(const Json& j);

// Lattice specs: {"axes":[[...],...],"pmf":...}. "pmf" is either the flat
// row-major vector (last axis fastest) or the equivalent nested arrays.
LatticeDist lattice_from_json(const Json& j);

/// Numbers pass through; the strings "inf", "-inf" and "nan" map to the
/// corresponding non-finite doubles.
double number_from_json(const Json& j);
/// Finite values as numbers, non-finite ones as "inf" / "-inf" / "nan".
Json number_to_json(double x);

Json to_json(ExtReal x);
Json to_json(const MeanClass& m);
Json to_json(const Witness& w);
Json to_json(const Certification& c);
Json to_json(const OrderVerdict& v);
Json to_json(const LatticeFn& f);
Json to_json(const LatticeDist& d);
Json to_json(const SmVerdict& v);

}  // namespace stochorder::io
