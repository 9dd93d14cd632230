#pragma once

// JSON forms of the library types.
//   matrix:           {"dim": n, "re": [[..]], "im": [[..]]}
//   subspace:         {"ambient_hilbert_dim": n, "basis": [matrix, ..]}
//   lattice element:  subspace fields + "shape": [n1, n2]
//   projector:        matrix fields + "rank"
//   face certificate: {"support": matrix, "interior_point": matrix, "reduction_steps": [matrix, ..]}

#include <string>

#include <json.hpp>

#include "qlattice/bipartite.hpp"
#include "qlattice/vn.hpp"

namespace qlattice::io {

using json = nlohmann::json;

class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

json to_json(const CMatrix& m);
json to_json(const HermOp& a);
json to_json(const DensityOp& rho);
json to_json(const HermSubspace& s);
json to_json(const LatticeElement& e);
json to_json(const VNElement& p);
json to_json(const FaceCertificate& c);
json to_json(const ProductDecomposition& d);
json to_json(const SeparabilityVerdict& v);
json to_json(const MembershipResult& m);

CMatrix matrix_from_json(const json& j);
HermOp herm_from_json(const json& j, const Tolerances& tol = {});
DensityOp density_from_json(const json& j, const Tolerances& tol = {});
HermSubspace subspace_from_json(const json& j, const Tolerances& tol = {});
/// The stored basis is closed on load, so any subspace file is accepted.
LatticeElement element_from_json(const json& j, const Settings& settings = {});
VNElement projector_from_json(const json& j, const Tolerances& tol = {});

json read_file(const std::string& path);
void write_file(const std::string& path, const json& j);

}  // namespace qlattice::io
