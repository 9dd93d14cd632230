#include "qlattice/json_io.hpp"

#include <fstream>

namespace qlattice::io {

json to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

json to_json(const HermOp& a) { return to_json(a.matrix()); }
json to_json(const DensityOp& rho) { return to_json(rho.matrix()); }

json to_json(const HermSubspace& s) {
  json basis = json::array();
  for (int i = 0; i < s.dim(); ++i) basis.push_back(to_json(s.basis_op(i)));
  return {{"ambient_hilbert_dim", s.ambient_dim()}, {"basis", basis}};
}

json to_json(const LatticeElement& e) {
  json j = to_json(e.rep());
  j["shape"] = e.shape().factors;
  return j;
}

json to_json(const VNElement& p) {
  json j = to_json(p.projector());
  j["rank"] = p.rank();
  return j;
}

json to_json(const FaceCertificate& c) {
  json steps = json::array();
  for (const auto& s : c.reduction_steps) steps.push_back(to_json(s));
  return {{"support", to_json(c.support)}, {"interior_point", to_json(c.interior_point)}, {"reduction_steps", steps}};
}

json to_json(const ProductDecomposition& d) {
  json terms = json::array();
  for (size_t k = 0; k < d.weights.size(); ++k) {
    terms.push_back({{"weight", d.weights[k]}, {"first", to_json(d.first[k])}, {"second", to_json(d.second[k])}});
  }
  return {{"terms", terms}, {"residual", d.residual}, {"rounds", d.rounds}};
}

json to_json(const SeparabilityVerdict& v) {
  json j = {{"status", to_string(v.status)}, {"ppt_min_eigenvalue", v.ppt_eigenvalue}, {"reason", v.reason}};
  if (v.decomposition) j["decomposition"] = to_json(*v.decomposition);
  return j;
}

json to_json(const MembershipResult& m) {
  json j = {{"status", to_string(m.status)}, {"reason", m.reason}};
  if (m.decomposition) j["decomposition"] = to_json(*m.decomposition);
  return j;
}

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

CMatrix matrix_from_json(const json& j) {
  try {
    const int n = field(j, "dim").get<int>();
    const json& re = field(j, "re");
    const json& im = j.contains("im") ? j.at("im") : json();
    if (n < 1 || !re.is_array() || static_cast<int>(re.size()) != n) throw FormatError("matrix: \"re\" must be dim x dim");
    CMatrix m(n, n);
    for (int r = 0; r < n; ++r) {
      if (static_cast<int>(re[r].size()) != n) throw FormatError("matrix: ragged \"re\" row");
      for (int c = 0; c < n; ++c) {
        double imag = im.is_null() ? 0.0 : im.at(r).at(c).get<double>();
        m(r, c) = cplx(re[r][c].get<double>(), imag);
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("matrix: ") + e.what());
  }
}

HermOp herm_from_json(const json& j, const Tolerances& tol) { return HermOp(matrix_from_json(j), tol); }

DensityOp density_from_json(const json& j, const Tolerances& tol) { return DensityOp(herm_from_json(j, tol), tol); }

HermSubspace subspace_from_json(const json& j, const Tolerances& tol) {
  const int n = field(j, "ambient_hilbert_dim").get<int>();
  std::vector<HermOp> gens;
  for (const auto& b : field(j, "basis")) {
    gens.push_back(herm_from_json(b, tol));
    if (gens.back().dim() != n) throw DimensionError("subspace: basis element has the wrong dimension");
  }
  if (gens.empty()) return HermSubspace::zero(n);
  return span(gens, tol);
}

LatticeElement element_from_json(const json& j, const Settings& settings) {
  HermSubspace s = subspace_from_json(j, settings.tol);
  SpaceShape shape = SpaceShape::simple(s.ambient_dim());
  if (j.contains("shape")) {
    const json& sh = j.at("shape");
    try {
      shape = sh.is_string() ? SpaceShape::parse(sh.get<std::string>()) : SpaceShape(sh.get<std::vector<int>>());
    } catch (const json::exception& e) {
      throw FormatError(std::string("shape: ") + e.what());
    }
    if (shape.total() != s.ambient_dim()) throw DimensionError("shape does not match the Hilbert dimension");
  }
  return LatticeElement::closure_of(s, shape, settings);
}

VNElement projector_from_json(const json& j, const Tolerances& tol) { return VNElement(herm_from_json(j, tol), tol); }

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace qlattice::io
