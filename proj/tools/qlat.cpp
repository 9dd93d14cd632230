// qlat: command-line front end for the qlattice library.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qlattice/harness.hpp"
#include "qlattice/json_io.hpp"
#include "qlattice/random.hpp"

namespace {

using namespace qlattice;
using json = nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitUsage = 64;

struct Globals {
  std::uint64_t seed = 1;
  int trials = 0;
  int dim = 0;
  std::string shape;
  double tol_psd = Tolerances{}.psd;
  int budget = Settings{}.budget;
  std::string out;
  std::string format = "json";
  bool emit_certificate = false;
  bool serial = false;

  Settings settings() const {
    Settings s;
    s.tol.psd = tol_psd;
    s.budget = budget;
    return s;
  }

  // Shape from --shape, else --dim, else the fallback (possibly empty).
  SpaceShape space(SpaceShape fallback = {}) const {
    if (!shape.empty()) return SpaceShape::parse(shape);
    if (dim > 0) return SpaceShape::simple(dim);
    return fallback;
  }
};

void emit(const Globals& g, const json& j, const std::string& text = "") {
  if (!g.out.empty()) {
    io::write_file(g.out, j);
    return;
  }
  if (g.format == "text" && !text.empty()) {
    std::cout << text;
  } else {
    std::cout << j.dump(2) << '\n';
  }
}

json element_json(const Globals& g, const LatticeElement& e) {
  json j = io::to_json(e);
  if (g.emit_certificate) {
    ClosureResult c = close_subspace(e.rep(), g.settings());
    j["certificate"] = c.face ? io::to_json(*c.face) : json(nullptr);
  }
  return j;
}

LatticeElement load_element(const Globals& g, const std::string& path) {
  return io::element_from_json(io::read_file(path), g.settings());
}

int cmd_gen(const Globals& g, const std::string& what, int rank, int k) {
  SpaceShape shape = g.space(SpaceShape::simple(2));
  const int n = shape.total();
  if (what == "density") {
    DensityOp rho = random_density(n, rank > 0 ? rank : n, g.seed);
    emit(g, io::to_json(rho));
    return kExitPass;
  }
  Rng rng(g.seed);
  LatticeElement e = random_element(shape, k > 0 ? k : 1, rng);
  emit(g, element_json(g, e));
  return kExitPass;
}

int cmd_op(const Globals& g, const std::string& op, const std::vector<std::string>& files) {
  const Settings st = g.settings();
  const std::size_t need = op == "neg" ? 1 : 2;
  if (files.size() != need) throw CLI::ValidationError("op " + op, "expects " + std::to_string(need) + " input file(s)");
  LatticeElement a = load_element(g, files[0]);
  if (op == "neg") {
    emit(g, element_json(g, neg(a, st)));
    return kExitPass;
  }
  LatticeElement b = load_element(g, files[1]);
  if (op == "leq") {
    const bool r = leq(a, b, st.tol);
    emit(g, {{"leq", r}}, r ? "true\n" : "false\n");
    return r ? kExitPass : kExitFail;
  }
  emit(g, element_json(g, op == "meet" ? meet(a, b, st) : join(a, b, st)));
  return kExitPass;
}

int cmd_embed(const Globals& g, const std::string& file) {
  VNElement p = io::projector_from_json(io::read_file(file), g.settings().tol);
  emit(g, element_json(g, face_embed(p, g.space(SpaceShape::simple(p.dim())))));
  return kExitPass;
}

BipartiteContext bipartite_context(const Globals& g) {
  SpaceShape s = g.space();
  if (!s.is_bipartite()) throw CLI::ValidationError("--shape", "a bipartite shape n1xn2 is required");
  return BipartiteContext(s);
}

int cmd_psi(const Globals& g, const std::string& fa, const std::string& fb) {
  BipartiteContext ctx = bipartite_context(g);
  emit(g, element_json(g, psi(load_element(g, fa), load_element(g, fb), ctx, g.settings())));
  return kExitPass;
}

int cmd_tau(const Globals& g, const std::string& file, int keep) {
  LatticeElement l = load_element(g, file);
  BipartiteContext ctx = l.shape().is_bipartite() ? BipartiteContext(l.shape()) : bipartite_context(g);
  emit(g, element_json(g, tau(l, keep, ctx, g.settings())));
  return kExitPass;
}

int cmd_sep(const Globals& g, const std::string& file) {
  BipartiteContext ctx = bipartite_context(g);
  DensityOp rho = io::density_from_json(io::read_file(file), g.settings().tol);
  SeparabilityVerdict v = is_separable(rho, ctx, g.settings());
  std::ostringstream text;
  text << to_string(v.status) << "  (partial transpose min eigenvalue " << v.ppt_eigenvalue << ")";
  if (v.decomposition) text << "  residual " << v.decomposition->residual;
  text << "\n  " << v.reason << '\n';
  emit(g, io::to_json(v), text.str());
  switch (v.status) {
    case SepStatus::separable:
      return kExitPass;
    case SepStatus::entangled:
      return kExitFail;
    default:
      return kExitUndecided;
  }
}

int cmd_check(const Globals& g, const std::string& suite) {
  harness::SuiteConfig cfg;
  cfg.suite = suite;
  cfg.shape = g.space();
  cfg.trials = g.trials;
  cfg.seed = g.seed;
  cfg.settings = g.settings();
  cfg.execution = g.serial ? harness::Execution::serial : harness::Execution::parallel;
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = harness::suite_names();
  } else {
    suites.push_back(suite);
  }
  json reports = json::array();
  std::string text;
  bool pass = true;
  for (const auto& s : suites) {
    cfg.suite = s;
    harness::Report r = harness::run_suite(cfg);
    pass = pass && r.pass();
    reports.push_back(r.to_json());
    text += r.to_text();
  }
  emit(g, suites.size() == 1 ? reports[0] : json{{"pass", pass}, {"reports", reports}}, text);
  return pass ? kExitPass : kExitFail;
}

int cmd_demo(const Globals& g) {
  SpaceShape s = g.space(SpaceShape::bipartite(2, 2));
  if (!s.is_bipartite()) throw CLI::ValidationError("--shape", "a bipartite shape n1xn2 is required");
  const int n1 = s.factors[0], n2 = s.factors[1];
  auto ent = harness::improper_mixture_demo(n1, n2, g.seed, true, g.settings());
  auto prod = harness::improper_mixture_demo(n1, n2, g.seed, false, g.settings());
  const bool ok = ent.vn_conjunction_rank > 1 && ent.lattice_atom && ent.atom_is_meet && prod.vn_conjunction_rank == 1;
  std::ostringstream text;
  text << "entangled pure state on " << s.to_string() << " (" << ent.rejections << " rejections)\n"
       << "  projector lattice: smallest certain property has rank " << ent.vn_conjunction_rank
       << (ent.vn_conjunction_rank > 1 ? " (not an atom)\n" : "\n")
       << "  state lattice:     atom(reduced state) is an atom: " << (ent.lattice_atom ? "yes" : "no")
       << ", equals the meet of elements containing it: " << (ent.atom_is_meet ? "yes" : "no") << '\n'
       << "product pure state (control)\n"
       << "  projector lattice: rank " << prod.vn_conjunction_rank << '\n'
       << "  state lattice:     atom: " << (prod.lattice_atom ? "yes" : "no") << '\n';
  emit(g, {{"entangled", harness::to_json(ent)}, {"product", harness::to_json(prod)}, {"pass", ok}}, text.str());
  return ok ? kExitPass : kExitFail;
}

int cmd_volume(const Globals& g) {
  SpaceShape s = g.space(SpaceShape::bipartite(2, 2));
  if (!s.is_bipartite()) throw CLI::ValidationError("--shape", "a bipartite shape n1xn2 is required");
  const int samples = g.trials > 0 ? g.trials : 10000;
  auto v = harness::separable_volume(s, samples, g.seed,
                                     g.serial ? harness::Execution::serial : harness::Execution::parallel, g.settings());
  if (!v.exact) std::cerr << "warning: partial transpose does not decide separability on " << s.to_string()
                          << "; reporting the PPT fraction\n";
  std::ostringstream text;
  text << "separable fraction on " << s.to_string() << ": " << v.fraction << " +/- " << v.ci_halfwidth << " ("
       << v.separable << "/" << v.samples << ")\n";
  emit(g, harness::to_json(v), text.str());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlat: lattice of density-operator sets"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "root seed");
  app.add_option("--trials", g.trials, "trial count (samples for volume)")->check(CLI::PositiveNumber);
  app.add_option("--dim", g.dim, "Hilbert dimension of a simple system")->check(CLI::Range(1, 9));
  app.add_option("--shape", g.shape, "space shape, n or n1xn2");
  app.add_option("--tol-psd", g.tol_psd, "allowed negative eigenvalue")->check(CLI::PositiveNumber);
  app.add_option("--budget", g.budget, "iteration budget")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "write JSON here instead of stdout");
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--emit-certificate", g.emit_certificate, "attach the face certificate to element outputs");
  app.add_flag("--serial", g.serial, "run trials on one thread");

  std::string gen_what;
  int rank = 0, k = 0;
  auto* gen = app.add_subcommand("gen", "random density or lattice element");
  gen->add_option("kind", gen_what)->required()->check(CLI::IsMember({"density", "element"}));
  gen->add_option("--rank", rank, "density rank (default full)")->check(CLI::PositiveNumber);
  gen->add_option("-k", k, "number of spanning densities")->check(CLI::PositiveNumber);

  std::string op_name;
  std::vector<std::string> op_files;
  auto* op = app.add_subcommand("op", "lattice operations on element files");
  op->add_option("operation", op_name)->required()->check(CLI::IsMember({"meet", "join", "neg", "leq"}));
  op->add_option("files", op_files)->required()->check(CLI::ExistingFile);

  std::string file1, file2;
  auto* embed = app.add_subcommand("embed-face", "projector to the face it supports");
  embed->add_option("projector", file1)->required()->check(CLI::ExistingFile);

  auto* psi_cmd = app.add_subcommand("psi", "compose two factor elements");
  psi_cmd->add_option("a", file1)->required()->check(CLI::ExistingFile);
  psi_cmd->add_option("b", file2)->required()->check(CLI::ExistingFile);

  int keep = 1;
  auto* tau_cmd = app.add_subcommand("tau", "reduce an element to one factor");
  tau_cmd->add_option("element", file1)->required()->check(CLI::ExistingFile);
  tau_cmd->add_option("--keep", keep, "factor to keep")->check(CLI::IsMember({1, 2}));

  auto* sep = app.add_subcommand("sep", "separability verdict for a density");
  sep->add_option("rho", file1)->required()->check(CLI::ExistingFile);

  std::string suite;
  std::vector<std::string> suites = qlattice::harness::suite_names();
  suites.push_back("all");
  auto* check = app.add_subcommand("check", "run a property suite");
  check->add_option("suite", suite)->required()->check(CLI::IsMember(suites));

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "demonstrations");
  demo->add_option("name", demo_name)->required()->check(CLI::IsMember({"improper-mixture"}));

  auto* volume = app.add_subcommand("volume", "separable fraction of the Hilbert-Schmidt ensemble");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(g, gen_what, rank, k);
    if (op->parsed()) return cmd_op(g, op_name, op_files);
    if (embed->parsed()) return cmd_embed(g, file1);
    if (psi_cmd->parsed()) return cmd_psi(g, file1, file2);
    if (tau_cmd->parsed()) return cmd_tau(g, file1, keep);
    if (sep->parsed()) return cmd_sep(g, file1);
    if (check->parsed()) return cmd_check(g, suite);
    if (demo->parsed()) return cmd_demo(g);
    if (volume->parsed()) return cmd_volume(g);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {  // malformed input, bad dimensions, unknown shape
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UndecidedFeasibility& e) {
    std::cerr << "undecided: " << e.what() << '\n';
    return kExitUndecided;
  } catch (const FaceReductionError& e) {
    std::cerr << "undecided: " << e.what() << '\n';
    return kExitUndecided;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
