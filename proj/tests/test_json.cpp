#include "common.hpp"

#include "qlattice/json_io.hpp"

using namespace qlattice;
using namespace fixtures;
using json = nlohmann::json;

TEST_CASE("matrix and density round trip") {
  Rng rng(1);
  DensityOp rho = random_density(3, 2, rng);
  DensityOp back = io::density_from_json(io::to_json(rho));
  CHECK((back.matrix() - rho.matrix()).norm() == 0.0);
  json j = io::to_json(rho);
  CHECK(j["dim"] == 3);
  CHECK(j["re"].size() == 3);
}

TEST_CASE("lattice element round trip keeps shape") {
  BipartiteContext ctx(2, 3);
  Rng rng(2);
  LatticeElement e = psi(random_element(2, 2, rng), random_element(3, 2, rng), ctx);
  json j = io::to_json(e);
  CHECK(j["shape"] == json::array({2, 3}));
  LatticeElement back = io::element_from_json(j);
  CHECK(back.shape() == ctx.shape());
  CHECK(equal(back, e));
}

TEST_CASE("element files are closed on load") {
  json j = io::to_json(span({ket(2, 0).op(), sx()}));
  CHECK(io::element_from_json(j).rep().dim() == 1);
}

TEST_CASE("projector and verdict serialization") {
  VNElement p{ket(2, 1).op()};
  json j = io::to_json(p);
  CHECK(j["rank"] == 1);
  CHECK(io::projector_from_json(j).rank() == 1);
  BipartiteContext ctx(2, 2);
  json v = io::to_json(is_separable(werner_state(0.2), ctx));
  CHECK(v["status"] == "separable");
  CHECK(v["decomposition"]["terms"].size() >= 1);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(io::matrix_from_json(json{{"re", {{1}}}}), io::FormatError);
  CHECK_THROWS_AS(io::matrix_from_json(json{{"dim", 2}, {"re", {{1, 0}}}}), io::FormatError);
  CHECK_THROWS_AS(io::density_from_json(io::to_json(CMatrix(diag2(2, 0).matrix()))), InvalidOperator);
  json bad = io::to_json(atom(ket(2, 0)));
  bad["shape"] = json::array({3});
  CHECK_THROWS_AS(io::element_from_json(bad), DimensionError);
}
