#include "qlattice/harness.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>

#include "qlattice/json_io.hpp"
#include "qlattice/random.hpp"

namespace qlattice::harness {

void for_each_trial(int count, const std::function<void(int)>& body, Execution mode) {
  std::vector<std::exception_ptr> errors(static_cast<size_t>(std::max(count, 0)));
  if (mode == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

bool Report::pass() const {
  for (const auto& p : properties)
    if (!p.pass) return false;
  return true;
}

json Report::to_json() const {
  json props = json::array();
  for (const auto& p : properties) {
    props.push_back({{"name", p.name},
                     {"pass", p.pass},
                     {"checked", p.checked},
                     {"failed", p.failed},
                     {"detail", p.detail},
                     {"counterexamples", p.counterexamples}});
  }
  return {{"suite", suite},
          {"config",
           {{"shape", config.shape.factors.empty() ? json("default") : json(config.shape.factors)},
            {"trials", config.trials},
            {"seed", config.seed},
            {"budget", config.settings.budget},
            {"tol_psd", config.settings.tol.psd},
            {"execution", config.execution == Execution::parallel ? "parallel" : "serial"}}},
          {"pass", pass()},
          {"properties", props},
          {"seconds", seconds}};
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << "suite " << suite << ": " << (pass() ? "PASS" : "FAIL") << " (" << seconds << " s)\n";
  for (const auto& p : properties) {
    os << "  [" << (p.pass ? "PASS" : "FAIL") << "] " << p.name << "  " << (p.checked - p.failed) << "/" << p.checked;
    if (!p.detail.empty()) os << "  " << p.detail;
    os << '\n';
    for (const auto& c : p.counterexamples) {
      os << "      counterexample: trial " << c.value("trial", -1) << " seed " << c.value("seed", std::uint64_t{0});
      if (c.contains("note")) os << " (" << c["note"].get<std::string>() << ")";
      os << '\n';
    }
  }
  return os.str();
}

namespace {

constexpr int kMaxCounterexamples = 5;

struct Outcome {
  bool checked = false;
  bool pass = true;
  json payload;
};

// One outcome slot per (property, trial); trials write disjoint slots.
class Tally {
 public:
  Tally(std::vector<std::string> names, int trials)
      : names_(std::move(names)), slots_(names_.size(), std::vector<Outcome>(static_cast<size_t>(trials))) {}

  void record(size_t prop, int trial, bool pass, json payload = {}) {
    Outcome& o = slots_[prop][static_cast<size_t>(trial)];
    o.checked = true;
    o.pass = pass;
    if (!pass) o.payload = std::move(payload);
  }

  // A numerical error inside a trial fails every property the trial had not
  // yet recorded, instead of aborting the suite.
  template <class F>
  void guard(int trial, std::uint64_t seed, F&& body) {
    try {
      body();
    } catch (const UndecidedFeasibility& e) {
      fail_rest(trial, seed, e.what());
    } catch (const FaceReductionError& e) {
      fail_rest(trial, seed, e.what());
    }
  }

  void append_to(Report& r, const std::string& suffix) const {
    for (size_t p = 0; p < names_.size(); ++p) {
      PropertyResult pr;
      pr.name = names_[p] + suffix;
      for (size_t t = 0; t < slots_[p].size(); ++t) {
        const Outcome& o = slots_[p][t];
        if (!o.checked) continue;
        ++pr.checked;
        if (o.pass) continue;
        ++pr.failed;
        if (static_cast<int>(pr.counterexamples.size()) < kMaxCounterexamples) pr.counterexamples.push_back(o.payload);
      }
      pr.pass = pr.failed == 0 && pr.checked > 0;
      r.properties.push_back(std::move(pr));
    }
  }

 private:
  void fail_rest(int trial, std::uint64_t seed, const std::string& what) {
    for (auto& slots : slots_) {
      Outcome& o = slots[static_cast<size_t>(trial)];
      if (o.checked) continue;
      o.checked = true;
      o.pass = false;
      o.payload = {{"trial", trial}, {"seed", seed}, {"note", "numerical error: " + what}};
    }
  }

  std::vector<std::string> names_;
  std::vector<std::vector<Outcome>> slots_;
};

PropertyResult single(const std::string& name, bool pass, const std::string& detail, json payload = {}) {
  PropertyResult p;
  p.name = name;
  p.pass = pass;
  p.checked = 1;
  p.failed = pass ? 0 : 1;
  p.detail = detail;
  if (!pass && !payload.is_null()) p.counterexamples.push_back(std::move(payload));
  return p;
}

json case_payload(int trial, std::uint64_t seed, json operands) {
  return {{"trial", trial}, {"seed", seed}, {"operands", std::move(operands)}};
}

int rand_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::uint64_t trial_seed(const SuiteConfig& cfg, int dim_index, int trial) {
  return mix64(mix64(cfg.seed, static_cast<std::uint64_t>(dim_index)), static_cast<std::uint64_t>(trial));
}

std::vector<SpaceShape> dims_or(const SuiteConfig& cfg, std::vector<SpaceShape> defaults, bool bipartite) {
  if (cfg.shape.factors.empty()) return defaults;
  if (cfg.shape.is_bipartite() != bipartite) {
    throw std::invalid_argument("suite " + cfg.suite + " needs a " + (bipartite ? "bipartite" : "simple") + " shape");
  }
  if (cfg.shape.total() > 9 || cfg.shape.total() < 2) throw std::invalid_argument("supported Hilbert dimensions: 2..9");
  return {cfg.shape};
}

int trials_or(const SuiteConfig& cfg, int def) { return cfg.trials > 0 ? cfg.trials : def; }

std::string dim_suffix(const SpaceShape& s) { return " @" + s.to_string(); }

// ---------------------------------------------------------------- suites

void suite_modularity(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::simple(2), SpaceShape::simple(3)}, false);
  const int trials = trials_or(cfg, 200);
  for (size_t di = 0; di < dims.size(); ++di) {
    const int n = dims[di].total();
    Tally tally({"modular-law"}, trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            Rng rng(seed);
            const int half = std::max(1, n * n / 2);
            LatticeElement a = random_element(n, rand_int(rng, 1, half), rng);
            LatticeElement b = random_element(n, rand_int(rng, 1, n * n - 1), rng);
            LatticeElement c = join(a, random_element(n, rand_int(rng, 1, half), rng), st);
            ModularReport m = check_modular(a, b, c, st);
            tally.record(0, t, m.holds,
                         case_payload(t, seed,
                                      {{"a", io::to_json(a)},
                                       {"b", io::to_json(b)},
                                       {"c", io::to_json(c)},
                                       {"lhs_dim", m.lhs.rep().dim()},
                                       {"rhs_dim", m.rhs.rep().dim()}}));
          });
        },
        cfg.execution);
    tally.append_to(rep, dim_suffix(dims[di]));
  }

  // a = {I/2} <= c = diagonal states, b spanned by I/2 + 0.3 sx and sz.
  CMatrix sx(2, 2), sz(2, 2), p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  LatticeElement a = atom(DensityOp::maximally_mixed(2));
  LatticeElement c = LatticeElement::closure_of(span({HermOp(p0), HermOp(p1)}), SpaceShape::simple(2), st);
  LatticeElement b = LatticeElement::closure_of(
      span({HermOp(CMatrix(0.5 * CMatrix::Identity(2, 2) + 0.3 * sx)), HermOp(sz)}), SpaceShape::simple(2), st);
  ModularReport m = check_modular(a, b, c, st);
  rep.properties.push_back(single("modular-law fixed triple @2", m.holds,
                                  "lhs dim " + std::to_string(m.lhs.rep().dim()) + ", rhs dim " +
                                      std::to_string(m.rhs.rep().dim()),
                                  {{"trial", -1}, {"seed", 0}, {"note", "deterministic triple"},
                                   {"operands", {{"a", io::to_json(a)}, {"b", io::to_json(b)}, {"c", io::to_json(c)}}}}));
}

void suite_atoms(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::simple(2), SpaceShape::simple(3)}, false);
  const int trials = trials_or(cfg, 100);
  for (size_t di = 0; di < dims.size(); ++di) {
    const int n = dims[di].total();
    Tally tally({"atom-is-good-fixpoint", "nothing-below-atom"}, trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            Rng rng(seed);
            DensityOp rho = random_density(n, rand_int(rng, 1, n), rng);
            HermSubspace closed = good_representative(span({rho.op()}), st);
            json ops = {{"rho", io::to_json(rho)}};
            tally.record(0, t, closed.dim() == 1 && contains(closed, rho.op(), st.tol), case_payload(t, seed, ops));
            LatticeElement at = atom(rho);
            LatticeElement e = random_element(n, rand_int(rng, 1, n * n - 1), rng);
            LatticeElement m = meet(at, e, st);
            const bool ok = m.is_bottom() || equal(m, at, st.tol);
            ops["element"] = io::to_json(e);
            tally.record(1, t, ok, case_payload(t, seed, ops));
          });
        },
        cfg.execution);
    tally.append_to(rep, dim_suffix(dims[di]));
  }
}

void suite_negation(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::simple(2), SpaceShape::simple(3)}, false);
  const int trials = trials_or(cfg, 100);
  for (size_t di = 0; di < dims.size(); ++di) {
    const int n = dims[di].total();
    const SpaceShape shape = SpaceShape::simple(n);
    LatticeElement mm = atom(DensityOp::maximally_mixed(n));
    LatticeElement nn = neg(neg(mm, st), st);
    rep.properties.push_back(single("double-negation-of-maximally-mixed" + dim_suffix(shape),
                                    nn.is_top() && !equal(nn, mm, st.tol),
                                    "neg(neg({I/n})) has dimension " + std::to_string(nn.rep().dim())));
    rep.properties.push_back(single("negation-of-bounds" + dim_suffix(shape),
                                    neg(LatticeElement::bottom(shape), st).is_top() &&
                                        neg(LatticeElement::top(shape), st).is_bottom(),
                                    ""));
    Tally tally({"meet-with-negation-is-bottom", "contraposition", "below-double-negation"}, trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            Rng rng(seed);
            LatticeElement a = random_element(n, rand_int(rng, 1, n * n - 1), rng);
            LatticeElement b = random_element(n, rand_int(rng, 1, n * n - 1), rng);
            json ops = {{"a", io::to_json(a)}, {"b", io::to_json(b)}};
            LatticeElement na = neg(a, st);
            tally.record(0, t, meet(a, na, st).is_bottom(), case_payload(t, seed, ops));
            LatticeElement c = join(a, b, st);  // a <= c
            tally.record(1, t, leq(neg(c, st), na, st.tol), case_payload(t, seed, ops));
            tally.record(2, t, leq(a, neg(na, st), st.tol), case_payload(t, seed, ops));
          });
        },
        cfg.execution);
    tally.append_to(rep, dim_suffix(shape));
  }
}

void suite_vn_embedding(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::simple(2), SpaceShape::simple(3)}, false);
  const int trials = trials_or(cfg, 50);
  for (size_t di = 0; di < dims.size(); ++di) {
    const int n = dims[di].total();
    Tally tally({"meet-preserved", "join-below-face-join", "negation-below-face-negation", "nested-joins-agree"},
                trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            Rng rng(seed);
            VNElement p = random_projector(n, rand_int(rng, 0, n), rng);
            VNElement q = random_projector(n, rand_int(rng, 0, n), rng);
            if (t % 4 == 3) q = vn_join(p, q, st.tol);  // exercise the nested case
            OpComparison c = compare_ops(p, q, st);
            json ops = case_payload(t, seed, {{"p", io::to_json(p)}, {"q", io::to_json(q)}});
            tally.record(0, t, c.meet_preserved, ops);
            tally.record(1, t, c.join_below, ops);
            tally.record(2, t, c.neg_below, ops);
            if (c.nested) tally.record(3, t, c.nested_joins_agree, ops);
          });
        },
        cfg.execution);
    tally.append_to(rep, dim_suffix(dims[di]));

    VNElement e0 = VNElement::from_columns(CVector::Unit(n, 0));
    VNElement e1 = VNElement::from_columns(CVector::Unit(n, 1));
    OpComparison c = compare_ops(e0, e1, st);
    rep.properties.push_back(single("orthogonal-rank-one-join-strict" + dim_suffix(dims[di]),
                                    c.join_strict && c.lattice_join_dim == 2 && c.face_join_dim == 4,
                                    "lattice join dim " + std::to_string(c.lattice_join_dim) + ", face join dim " +
                                        std::to_string(c.face_join_dim)));
  }
}

// Random subspace for the oracle comparison: a span of up to three densities
// of mixed rank, or of up to three arbitrary Hermitians.
HermSubspace oracle_instance(int n, bool densities, Rng& rng) {
  std::vector<HermOp> gens;
  const int k = rand_int(rng, 1, 3);
  for (int i = 0; i < k; ++i) {
    if (densities) {
      gens.push_back(random_density(n, rand_int(rng, 1, n), rng).op());
    } else {
      CMatrix g = ginibre(n, n, rng);
      gens.push_back(HermOp::unchecked(0.5 * (g + g.adjoint())));
    }
  }
  return span(gens);
}

void suite_oracle(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::simple(2), SpaceShape::simple(3)}, false);
  const int trials = trials_or(cfg, 100);
  constexpr int kSamples = 10000;
  constexpr double kAngle = 1e-6;
  for (size_t di = 0; di < dims.size(); ++di) {
    const int n = dims[di].total();
    Tally tally({"closure-matches-oracle (density spans)", "closure-matches-oracle (hermitian spans)"}, trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            Rng rng(seed);
            for (size_t prop : {0u, 1u}) {
              HermSubspace s = oracle_instance(n, prop == 0, rng);
              HermSubspace g = good_representative(s, st);
              json ops = {{"subspace", io::to_json(s)}, {"closure_dim", g.dim()}};
              bool ok;
              try {
                OracleSample o = brute_force_sample(s, kSamples, seed);
                double angle = max_principal_angle(g, o.span);
                ok = angle <= kAngle && static_cast<int>(o.points.size()) >= kSamples;
                ops["oracle_dim"] = o.span.dim();
                ops["accepted"] = o.points.size();
                ops["angle"] = angle;
              } catch (const OracleInconclusive&) {
                // no state found by sampling: agreement means an empty closure
                ok = g.is_zero();
                ops["oracle_dim"] = 0;
              }
              tally.record(prop, t, ok, case_payload(t, seed, ops));
            }
          });
        },
        cfg.execution);
    tally.append_to(rep, dim_suffix(dims[di]));
  }
  CMatrix p0 = CMatrix::Zero(2, 2), sx(2, 2);
  p0(0, 0) = 1;
  sx << 0, 1, 1, 0;
  HermSubspace s = span({HermOp(p0), HermOp(sx)});
  HermSubspace g = good_representative(s, st);
  OracleSample o = brute_force_sample(s, kSamples, cfg.seed);
  HermSubspace expect = span({HermOp(p0)});
  double a1 = max_principal_angle(g, expect), a2 = max_principal_angle(o.span, expect);
  rep.properties.push_back(single("boundary-case-pure-plus-coherence @2", a1 <= kAngle && a2 <= kAngle,
                                  "closure angle " + std::to_string(a1) + ", oracle angle " + std::to_string(a2)));
}

std::vector<std::pair<LatticeElement, LatticeElement>> factor_pairs(const BipartiteContext& ctx, int count, Rng& rng) {
  std::vector<std::pair<LatticeElement, LatticeElement>> out;
  for (int i = 0; i < count; ++i) {
    LatticeElement a = random_element(ctx.n1(), rand_int(rng, 1, ctx.n1() * ctx.n1()), rng);
    LatticeElement b = random_element(ctx.n2(), rand_int(rng, 1, ctx.n2() * ctx.n2()), rng);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

void suite_psi_tau(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::bipartite(2, 2), SpaceShape::bipartite(2, 3)}, true);
  const int trials = trials_or(cfg, 100);
  for (size_t di = 0; di < dims.size(); ++di) {
    BipartiteContext ctx(dims[di]);
    const std::string sfx = dim_suffix(dims[di]);
    Tally tally({"tau-after-psi-is-identity", "psi-monotone", "psi-of-atoms-is-atom", "tau-of-product-atom"}, trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            Rng rng(seed);
            auto pr = factor_pairs(ctx, 2, rng);
            const auto& [a, b] = pr[0];
            json ops = case_payload(t, seed, {{"a", io::to_json(a)}, {"b", io::to_json(b)}});
            LatticeElement up = psi(a, b, ctx, st);
            tally.record(0, t, equal(tau(up, 1, ctx, st), a, st.tol) && equal(tau(up, 2, ctx, st), b, st.tol), ops);
            LatticeElement bigger = join(a, pr[1].first, st);
            tally.record(1, t, leq(up, psi(bigger, b, ctx, st), st.tol), ops);
            DensityOp r1 = random_density(ctx.n1(), rand_int(rng, 1, ctx.n1()), rng);
            DensityOp r2 = random_density(ctx.n2(), rand_int(rng, 1, ctx.n2()), rng);
            LatticeElement prod = atom(tensor(r1, r2), ctx.shape());
            tally.record(2, t, equal(psi(atom(r1), atom(r2), ctx, st), prod, st.tol), ops);
            tally.record(3, t, equal(tau(prod, 1, ctx, st), atom(r1), st.tol) && equal(tau(prod, 2, ctx, st), atom(r2), st.tol),
                         ops);
          });
        },
        cfg.execution);
    tally.append_to(rep, sfx);

    LatticeElement bell = atom(bell_state(ctx), ctx.shape());
    LatticeElement down1 = tau(bell, 1, ctx, st);
    LatticeElement back = psi(down1, tau(bell, 2, ctx, st), ctx, st);
    rep.properties.push_back(single("psi-after-tau-not-identity (Bell atom)" + sfx,
                                    !equal(back, bell, st.tol),
                                    "recomposed element has dimension " + std::to_string(back.rep().dim())));
    rep.properties.push_back(single("tau-of-Bell-is-maximally-mixed" + sfx,
                                    equal(down1, atom(DensityOp::maximally_mixed(ctx.n1())), st.tol), ""));

    // morphism reports on fixed-size samples
    Rng rng(trial_seed(cfg, static_cast<int>(di), -1));
    std::vector<std::pair<LatticeElement, LatticeElement>> whole;
    for (int i = 0; i < 30; ++i) {
      whole.emplace_back(random_element(ctx.shape(), rand_int(rng, 1, ctx.total()), rng),
                         random_element(ctx.shape(), rand_int(rng, 1, ctx.total()), rng));
    }
    TauReport tr = tau_morphism_report(whole, ctx, mix64(cfg.seed, 77), st);
    rep.properties.push_back(single("tau-preserves-join" + sfx, tr.join_failures == 0,
                                    std::to_string(tr.join_failures) + " failures over " + std::to_string(2 * tr.pairs)));
    rep.properties.push_back(single("tau-meet-inequality" + sfx, tr.meet_below_failures == 0,
                                    std::to_string(tr.meet_below_failures) + " failures"));
    rep.properties.push_back(single("tau-meet-counterexample-strict" + sfx, tr.meet_counterexample_strict, ""));
    rep.properties.push_back(single("tau-surjective" + sfx, tr.surjectivity_failures == 0,
                                    std::to_string(tr.surjectivity_trials) + " targets"));
    rep.properties.push_back(single("tau-not-injective" + sfx, tr.non_injective_witness, ""));

    std::vector<LatticeElement> sample;
    for (int i = 0; i < 7; ++i) sample.push_back(random_element(ctx.n1(), rand_int(rng, 1, ctx.n1() * ctx.n1() - 1), rng));
    sample.push_back(atom(DensityOp::pure(CVector::Unit(ctx.n1(), 0))));
    LatticeElement fixed = atom(random_density(ctx.n2(), ctx.n2(), rng));
    PsiSlotReport pr = psi_fixed_slot_report(sample, fixed, ctx, st);
    const int npairs = static_cast<int>(sample.size() * (sample.size() + 1) / 2);
    rep.properties.push_back(single("psi-slot-preserves-meet" + sfx, pr.meet_failures == 0,
                                    std::to_string(npairs) + " pairs"));
    rep.properties.push_back(single("psi-slot-preserves-join" + sfx, pr.join_failures == 0,
                                    std::to_string(npairs) + " pairs"));
    rep.properties.push_back(single("psi-slot-injective" + sfx, pr.injectivity_failures == 0, ""));
    rep.properties.push_back(single("psi-negation-inclusion" + sfx, pr.neg_below_failures == 0, ""));
    rep.properties.push_back(single("psi-negation-strict" + sfx, pr.neg_strict > 0 && pr.product_witness,
                                    std::to_string(pr.neg_strict) + " strict of " + std::to_string(pr.elements)));
  }
}

void suite_separability(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::bipartite(2, 2), SpaceShape::bipartite(2, 3)}, true);
  const int trials = trials_or(cfg, 60);
  for (size_t di = 0; di < dims.size(); ++di) {
    BipartiteContext ctx(dims[di]);
    const std::string sfx = dim_suffix(dims[di]);
    SeparabilityVerdict bell = is_separable(bell_state(ctx), ctx, st);
    rep.properties.push_back(single("Bell-entangled" + sfx,
                                    bell.status == SepStatus::entangled && std::abs(bell.ppt_eigenvalue + 0.5) <= 1e-9,
                                    "partial transpose eigenvalue " + std::to_string(bell.ppt_eigenvalue)));
    if (ctx.n1() == 2 && ctx.n2() == 2) {
      double last_sep = -1.0, first_ent = 2.0;
      bool monotone = true, decomposed = true;
      for (int i = 0; i <= 100; ++i) {
        const double w = 0.01 * i;
        SeparabilityVerdict v = is_separable(werner_state(w), ctx, st);
        if (v.status == SepStatus::separable) {
          if (first_ent < 2.0) monotone = false;
          last_sep = w;
          decomposed = decomposed && v.decomposition && v.decomposition->residual <= 1e-7;
        } else if (v.status == SepStatus::entangled && first_ent > 1.5) {
          first_ent = w;
        }
      }
      rep.properties.push_back(single("Werner-threshold" + sfx,
                                      monotone && decomposed && last_sep > 0.32 && first_ent < 0.35,
                                      "last separable " + std::to_string(last_sep) + ", first entangled " +
                                          std::to_string(first_ent)));
    }

    Tally tally({"separable-verdict-has-decomposition", "entangled-verdict-has-witness", "products-separable"}, trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            Rng rng(seed);
            DensityOp rho;
            switch (t % 3) {
              case 0:
                rho = random_density(ctx.total(), ctx.total(), rng);
                break;
              case 1: {  // a few product terms, usually rank deficient
                const int terms = rand_int(rng, 1, 4);
                CMatrix m = CMatrix::Zero(ctx.total(), ctx.total());
                double total = 0.0;
                for (int k = 0; k < terms; ++k) {
                  double w = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
                  total += w;
                  m += w * tensor(random_density(ctx.n1(), rand_int(rng, 1, ctx.n1()), rng).op(),
                                  random_density(ctx.n2(), rand_int(rng, 1, ctx.n2()), rng).op())
                               .matrix();
                }
                rho = DensityOp(HermOp::unchecked(m / total));
                break;
              }
              default:
                rho = random_density(ctx.total(), rand_int(rng, 1, ctx.total() - 1), rng);
            }
            SeparabilityVerdict v = is_separable(rho, ctx, st);
            json ops = case_payload(t, seed, {{"rho", io::to_json(rho)}, {"verdict", io::to_json(v)}});
            if (v.status == SepStatus::separable)
              tally.record(0, t, v.decomposition && reconstruction_error(*v.decomposition, rho) <= 1e-7, ops);
            if (v.status == SepStatus::entangled) tally.record(1, t, v.ppt_eigenvalue < -st.tol.psd, ops);
            if (t % 3 == 1) tally.record(2, t, v.status == SepStatus::separable, ops);
          });
        },
        cfg.execution);
    tally.append_to(rep, sfx);

    Rng rng(trial_seed(cfg, static_cast<int>(di), -1));
    auto pairs = factor_pairs(ctx, 30, rng);
    ImPsiReport ir = im_psi_separability_report(pairs, ctx, mix64(cfg.seed, 99), st);
    rep.properties.push_back(single("image-contains-separable-product" + sfx, ir.product_in_image_failures == 0,
                                    std::to_string(ir.pairs) + " pairs"));
    rep.properties.push_back(single("image-spanned-by-products" + sfx, ir.product_span_failures == 0, ""));
    rep.properties.push_back(single("separable-state-in-image-of-its-factors" + sfx, ir.separable_failures == 0,
                                    std::to_string(ir.separable_trials) + " states"));
    rep.properties.push_back(single("Bell-atom-not-in-image" + sfx, ir.bell_equals_image == 0 && ir.bell_atom_has_no_separable,
                                    std::to_string(ir.bell_below_image) + " sampled images contain the Bell state"));
  }
}

void suite_convex_tensor(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::bipartite(2, 2), SpaceShape::bipartite(2, 3)}, true);
  const int trials = trials_or(cfg, 30);
  for (size_t di = 0; di < dims.size(); ++di) {
    BipartiteContext ctx(dims[di]);
    const std::string sfx = dim_suffix(dims[di]);
    std::vector<int> inconclusive(static_cast<size_t>(trials), 0);
    Tally tally({"product-of-members-is-member", "members-lie-in-psi", "outside-has-certificate"}, trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            Rng rng(seed);
            auto pr = factor_pairs(ctx, 1, rng);
            const auto& [a, b] = pr[0];
            json ops = {{"a", io::to_json(a)}, {"b", io::to_json(b)}};
            DensityOp x = *feasible_point(a.rep(), st).witness;
            DensityOp y = *feasible_point(b.rep(), st).witness;
            MembershipResult m1 = convex_tensor_membership(tensor(x, y), a, b, ctx, st);
            tally.record(0, t, m1.status == MembershipStatus::member, case_payload(t, seed, ops));

            // mixture of products of boundary states of a and b
            auto xs = sample_body(state_body(a.rep(), st), 3, rng);
            auto ys = sample_body(state_body(b.rep(), st), 3, rng);
            CMatrix mix = CMatrix::Zero(ctx.total(), ctx.total());
            for (int i = 0; i < 3; ++i) mix += tensor(xs[static_cast<size_t>(i)].op(), ys[static_cast<size_t>((i + 1) % 3)].op()).matrix() / 3.0;
            DensityOp rho(HermOp::unchecked(mix));
            MembershipResult m2 = convex_tensor_membership(rho, a, b, ctx, st);
            ops["mixture"] = io::to_json(rho);
            LatticeElement image = psi(a, b, ctx, st);
            bool inside = true;
            for (const auto* m : {&m1, &m2}) {
              if (m->status == MembershipStatus::member) {
                const ProductDecomposition& d = *m->decomposition;
                inside = inside && reconstruction_error(d, m == &m1 ? tensor(x, y) : rho) <= 1e-7;
                for (size_t k = 0; k < d.weights.size(); ++k) {
                  inside = inside && contains(a.rep(), d.first[k].op(), st.tol) && contains(b.rep(), d.second[k].op(), st.tol);
                }
              }
            }
            inside = inside && contains(image.rep(), rho.op(), st.tol);
            tally.record(1, t, inside, case_payload(t, seed, ops));
            tally.record(2, t, m2.status != MembershipStatus::outside, case_payload(t, seed, ops));
            inconclusive[static_cast<size_t>(t)] = m2.status == MembershipStatus::inconclusive;
          });
        },
        cfg.execution);
    tally.append_to(rep, sfx);
    int inc = 0;
    for (int v : inconclusive) inc += v;
    rep.properties.back().detail = std::to_string(inc) + " boundary mixtures inconclusive (allowed)";

    LatticeElement top1 = LatticeElement::top(ctx.factor_shape(1)), top2 = LatticeElement::top(ctx.factor_shape(2));
    MembershipResult bell = convex_tensor_membership(bell_state(ctx), top1, top2, ctx, st);
    rep.properties.push_back(single("Bell-outside-separable-states" + sfx, bell.status == MembershipStatus::outside,
                                    bell.reason));
  }
}

void suite_sublattice(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::bipartite(2, 2), SpaceShape::bipartite(2, 3)}, true);
  for (size_t di = 0; di < dims.size(); ++di) {
    BipartiteContext ctx(dims[di]);
    const std::string sfx = dim_suffix(dims[di]);
    Rng rng(trial_seed(cfg, static_cast<int>(di), 0));
    auto bounds = generate_sublattice({LatticeElement::bottom(ctx.shape()), LatticeElement::top(ctx.shape())}, 10, st);
    rep.properties.push_back(single("bounds-closed" + sfx, bounds.elements.size() == 2 && !bounds.truncated, ""));
    auto two = generate_sublattice({atom(random_density(ctx.total(), ctx.total(), rng), ctx.shape()),
                                    atom(random_density(ctx.total(), 1, rng), ctx.shape())},
                                   10, st);
    rep.properties.push_back(single("two-atoms-generate-four" + sfx, two.elements.size() == 4 && !two.truncated,
                                    std::to_string(two.elements.size()) + " elements"));
    // low-dimensional factor elements keep the images away from the top
    std::vector<LatticeElement> as, bs;
    for (int i = 0; i < 2; ++i) {
      as.push_back(random_element(ctx.n1(), i + 1, rng));
      bs.push_back(random_element(ctx.n2(), 2 - i, rng));
    }
    std::vector<LatticeElement> seeds;
    for (const auto& a : as)
      for (const auto& b : bs) seeds.push_back(psi(a, b, ctx, st));
    const int cap = cfg.trials > 0 ? cfg.trials : 200;
    auto gen = generate_sublattice(seeds, cap, st);
    bool holds = gen.truncated || is_closed_under_meet_join(gen.elements, st);
    for (const auto& s : seeds) {
      bool found = false;
      for (const auto& e : gen.elements) found = found || equal(e, s, st.tol);
      holds = holds && found;
    }
    rep.properties.push_back(single("image-generated-sublattice-closed" + sfx, holds,
                                    std::to_string(gen.elements.size()) + " elements" +
                                        (gen.truncated ? " (truncated)" : "")));
  }
}

void suite_improper(const SuiteConfig& cfg, Report& rep) {
  const Settings& st = cfg.settings;
  auto dims = dims_or(cfg, {SpaceShape::bipartite(2, 2), SpaceShape::bipartite(2, 3)}, true);
  const int trials = trials_or(cfg, 20);
  for (size_t di = 0; di < dims.size(); ++di) {
    const int n1 = dims[di].factors[0], n2 = dims[di].factors[1];
    Tally tally({"entangled-vn-conjunction-not-atom", "reduced-state-is-lattice-atom", "product-vn-conjunction-rank-one"},
                trials);
    for_each_trial(
        trials,
        [&](int t) {
          std::uint64_t seed = trial_seed(cfg, static_cast<int>(di), t);
          tally.guard(t, seed, [&] {
            ImproperMixtureCase c = improper_mixture_demo(n1, n2, seed, true, st);
            json ops = case_payload(t, seed, to_json(c));
            tally.record(0, t, c.vn_conjunction_rank == std::min(n1, n2), ops);
            tally.record(1, t, c.lattice_atom && c.atom_is_meet, ops);
            ImproperMixtureCase p = improper_mixture_demo(n1, n2, seed, false, st);
            tally.record(2, t, p.vn_conjunction_rank == 1 && p.lattice_atom, case_payload(t, seed, to_json(p)));
          });
        },
        cfg.execution);
    tally.append_to(rep, dim_suffix(dims[di]));
  }
}

void suite_volume(const SuiteConfig& cfg, Report& rep) {
  auto dims = dims_or(cfg, {SpaceShape::bipartite(2, 2)}, true);
  const int samples = trials_or(cfg, 10000);
  for (const auto& shape : dims) {
    VolumeEstimate a = separable_volume(shape, samples, mix64(cfg.seed, 1), cfg.execution, cfg.settings);
    VolumeEstimate b = separable_volume(shape, samples, mix64(cfg.seed, 2), cfg.execution, cfg.settings);
    const double combined = std::sqrt(a.ci_halfwidth * a.ci_halfwidth + b.ci_halfwidth * b.ci_halfwidth);
    std::ostringstream d;
    d << "fractions " << a.fraction << " and " << b.fraction << ", combined half-width " << combined;
    rep.properties.push_back(single("disjoint-seeds-agree" + dim_suffix(shape),
                                    std::abs(a.fraction - b.fraction) < 3.0 * combined, d.str()));
    rep.properties.push_back(single("fraction-strictly-inside" + dim_suffix(shape),
                                    a.fraction > 0.0 && a.fraction < 1.0 && b.fraction > 0.0 && b.fraction < 1.0,
                                    a.exact ? "" : "partial-transpose fraction (not exact in these dimensions)"));
  }
}

using SuiteFn = void (*)(const SuiteConfig&, Report&);

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> r = {
      {"modularity", suite_modularity},     {"atoms", suite_atoms},
      {"negation", suite_negation},         {"vn-embedding", suite_vn_embedding},
      {"oracle", suite_oracle},             {"psi-tau", suite_psi_tau},
      {"separability", suite_separability}, {"convex-tensor", suite_convex_tensor},
      {"sublattice", suite_sublattice},     {"improper-demo", suite_improper},
      {"volume", suite_volume},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"modularity",   "atoms",         "negation",   "vn-embedding",
                                                 "oracle",       "psi-tau",       "separability", "convex-tensor",
                                                 "sublattice",   "improper-demo", "volume"};
  return names;
}

Report run_suite(const SuiteConfig& cfg) {
  auto it = registry().find(cfg.suite);
  if (it == registry().end()) throw std::invalid_argument("unknown suite: " + cfg.suite);
  Report rep;
  rep.suite = cfg.suite;
  rep.config = cfg;
  auto t0 = std::chrono::steady_clock::now();
  it->second(cfg, rep);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// ------------------------------------------------------------ demo / volume

ImproperMixtureCase improper_mixture_demo(int n1, int n2, std::uint64_t seed, bool entangled, const Settings& settings) {
  if (n1 < 2 || n2 < 2) throw DimensionError("improper_mixture_demo: factors must have dimension >= 2");
  const SpaceShape shape = SpaceShape::bipartite(n1, n2);
  Rng rng(seed);
  ImproperMixtureCase c;
  constexpr int kMaxRejections = 1000;
  while (true) {
    if (entangled) {
      c.state = DensityOp::pure(haar_state(n1 * n2, rng));
    } else {
      DensityOp x = DensityOp::pure(haar_state(n1, rng));
      c.state = tensor(x, DensityOp::pure(haar_state(n2, rng)));
    }
    c.reduced = partial_trace(c.state, shape, 1);
    if (!entangled || !is_pure(c.reduced, settings.tol)) break;
    if (++c.rejections > kMaxRejections) throw std::runtime_error("improper_mixture_demo: no entangled state found");
  }
  // the smallest projector P with tr(reduced P) = 1 is the support projector
  c.vn_conjunction_rank = VNElement::from_columns(support_columns(c.reduced.op(), settings.tol.rank)).rank();

  LatticeElement a = atom(c.reduced);
  c.lattice_atom = is_atom(a) && equal(LatticeElement::closure_of(a.rep(), a.shape(), settings), a, settings.tol);
  LatticeElement m = LatticeElement::top(a.shape());
  for (int i = 0; i < 4; ++i) {
    LatticeElement e = join(a, random_element(n1, rand_int(rng, 1, std::max(1, n1 * n1 - 2)), rng), settings);
    m = meet(m, e, settings);
  }
  c.atom_is_meet = equal(m, a, settings.tol);
  return c;
}

json to_json(const ImproperMixtureCase& c) {
  return {{"state", io::to_json(c.state)},
          {"reduced", io::to_json(c.reduced)},
          {"vn_conjunction_rank", c.vn_conjunction_rank},
          {"lattice_atom", c.lattice_atom},
          {"atom_is_meet_of_containing_elements", c.atom_is_meet},
          {"rejections", c.rejections}};
}

VolumeEstimate separable_volume(const SpaceShape& shape, int samples, std::uint64_t seed, Execution mode,
                                const Settings& settings) {
  BipartiteContext ctx(shape);
  if (samples < 1) throw std::invalid_argument("separable_volume: need at least one sample");
  VolumeEstimate v;
  v.samples = samples;
  v.exact = ppt_is_exact(ctx);
  std::vector<char> sep(static_cast<size_t>(samples), 0);
  for_each_trial(
      samples,
      [&](int i) {
        DensityOp rho = random_density(ctx.total(), ctx.total(), mix64(seed, static_cast<std::uint64_t>(i)));
        sep[static_cast<size_t>(i)] = ppt_min_eigenvalue(rho, ctx) >= -settings.tol.psd;
      },
      mode);
  for (char s : sep) v.separable += s;
  v.fraction = static_cast<double>(v.separable) / samples;
  v.ci_halfwidth = 1.96 * std::sqrt(v.fraction * (1.0 - v.fraction) / samples);
  return v;
}

json to_json(const VolumeEstimate& v) {
  return {{"samples", v.samples},
          {"separable", v.separable},
          {"fraction", v.fraction},
          {"ci_halfwidth", v.ci_halfwidth},
          {"exact", v.exact}};
}

}  // namespace qlattice::harness
