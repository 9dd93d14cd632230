#include "qlattice/detail/barrier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qlattice::detail {

namespace {

struct Eval {
  bool feasible = false;
  double logdet = 0.0;
  Eigen::LLT<CMatrix> llt;
};

Eval evaluate(const CMatrix& a) {
  Eval e;
  e.llt.compute(a);
  if (e.llt.info() != Eigen::Success) return e;
  const auto& l = e.llt.matrixLLT();
  double ld = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    double d = l(i, i).real();
    if (!(d > 0.0)) return e;
    ld += 2.0 * std::log(d);
  }
  e.feasible = std::isfinite(ld);
  e.logdet = ld;
  return e;
}

}  // namespace

CMatrix lmi_value(const LmiProblem& problem, const RVector& z) {
  CMatrix a = problem.base;
  for (size_t i = 0; i < problem.dirs.size(); ++i) a += z(static_cast<Eigen::Index>(i)) * problem.dirs[i];
  return a;
}

BarrierResult maximize_with_barrier(const LmiProblem& problem, RVector z0, const BarrierOptions& opts,
                                    const StagePredicate& stop) {
  const Eigen::Index p = static_cast<Eigen::Index>(problem.dirs.size());
  const Eigen::Index m = problem.base.rows();
  if (z0.size() != p || problem.objective.size() != p) {
    throw std::invalid_argument("barrier: variable count mismatch");
  }

  BarrierResult res;
  res.z = std::move(z0);
  CMatrix a = lmi_value(problem, res.z);
  Eval cur = evaluate(a);
  if (!cur.feasible) throw std::invalid_argument("barrier: start point is not strictly feasible");

  double mu = opts.mu_start;
  std::vector<CMatrix> ra(static_cast<size_t>(p));
  const CMatrix eye = CMatrix::Identity(m, m);

  while (true) {
    // centering at this mu
    for (int inner = 0; inner < 200; ++inner) {
      if (res.newton_steps >= opts.max_newton) {
        res.budget_exhausted = true;
        break;
      }
      CMatrix r = cur.llt.solve(eye);
      RVector g(p);
      for (Eigen::Index i = 0; i < p; ++i) {
        ra[static_cast<size_t>(i)] = r * problem.dirs[static_cast<size_t>(i)];
        g(i) = problem.objective(i) + mu * ra[static_cast<size_t>(i)].trace().real();
      }
      if (p == 0) break;
      // H_ij = tr(R A_i R A_j), positive semidefinite
      RMatrix h(p, p);
      for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i; j < p; ++j) {
          double v = (ra[static_cast<size_t>(i)].array() * ra[static_cast<size_t>(j)].transpose().array()).sum().real();
          h(i, j) = h(j, i) = v;
        }
      }
      h *= mu;
      Eigen::LDLT<RMatrix> ldlt(h);
      RVector step = ldlt.solve(g);
      if (!step.allFinite() || ldlt.info() != Eigen::Success) {
        RMatrix reg = h + 1e-14 * (h.diagonal().cwiseAbs().maxCoeff() + 1.0) * RMatrix::Identity(p, p);
        step = reg.ldlt().solve(g);
      }
      double decrement = g.dot(step);  // = step' H step
      ++res.newton_steps;
      if (!(decrement >= 0.0) || decrement / mu <= opts.centering_tol) break;

      const double f0 = problem.objective.dot(res.z) + mu * cur.logdet;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        RVector trial = res.z + alpha * step;
        CMatrix at = lmi_value(problem, trial);
        Eval ev = evaluate(at);
        if (ev.feasible) {
          double f1 = problem.objective.dot(trial) + mu * ev.logdet;
          if (f1 >= f0 + 0.25 * alpha * decrement || alpha * decrement < 1e-15 * (1.0 + std::abs(f0))) {
            res.z = std::move(trial);
            cur = std::move(ev);
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }

    res.mu = mu;
    if (res.budget_exhausted) break;
    if (stop && stop(res.z, mu)) {
      res.stopped_early = true;
      break;
    }
    if (mu <= opts.mu_final) break;
    mu = std::max(mu * opts.mu_shrink, opts.mu_final);
  }
  res.slack_inverse = cur.llt.solve(eye);
  return res;
}

}  // namespace qlattice::detail
