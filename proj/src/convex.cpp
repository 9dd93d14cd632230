#include "qlattice/convex.hpp"

#include <algorithm>
#include <cmath>

#include "qlattice/detail/barrier.hpp"

namespace qlattice {

using detail::BarrierOptions;
using detail::LmiProblem;

namespace {

// Eigenvalues of the certificate counted as its range, relative to the largest.
constexpr double kCertificateRange = 1e-3;
// Stationarity / complementarity residual a certificate must meet.
constexpr double kCertificateResidual = 1e-8;
// Off-face component below which a representative direction counts as inside the face.
constexpr double kFaceResidual = 1e-8;

// Real coordinates of an m x m Hermitian matrix (see to_coords).
RVector hcoords(const CMatrix& a) { return to_coords(HermOp::unchecked(a)); }

// Trace-one affine slice of a subspace compressed onto span(v):
// points are x0 + sum_j y_j dirs[j].
struct Slice {
  bool has_trace_one = false;
  CMatrix x0;
  std::vector<CMatrix> dirs;
  RVector x0_coeff;    // x0 as a combination of the subspace basis
  RMatrix dir_coeff;   // column j: dirs[j] as a combination of the basis
};

Slice make_slice(const RMatrix& basis, int n, const CMatrix& v) {
  const Eigen::Index k = basis.cols();
  const Eigen::Index m = v.cols();
  Slice sl;
  if (k == 0 || m == 0) return sl;
  std::vector<CMatrix> comp(static_cast<size_t>(k));
  RMatrix cc(m * m, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    comp[static_cast<size_t>(i)] = v.adjoint() * from_coords(n, basis.col(i)).matrix() * v;
    cc.col(i) = hcoords(comp[static_cast<size_t>(i)]);
  }
  // Orthonormalize the compressed generators; a is the coefficient map.
  Eigen::JacobiSVD<RMatrix> svd(cc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > 1e-12) ++r;
  if (r == 0) return sl;
  RMatrix a = svd.matrixV().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal();  // k x r
  RMatrix e = svd.matrixU().leftCols(r);                                             // m^2 x r

  RVector id = hcoords(CMatrix::Identity(m, m));
  RVector tau = e.transpose() * id;  // traces of the orthonormal elements
  double tn = tau.norm();
  if (tn <= 1e-10) return sl;
  sl.has_trace_one = true;
  RVector x0c = tau / (tn * tn);
  sl.x0_coeff = a * x0c;
  sl.x0 = from_coords(static_cast<int>(m), e * x0c).matrix();

  // orthonormal basis of tau's complement inside R^r
  RMatrix frame = RMatrix::Identity(r, r);
  if (r > 1) {
    Eigen::HouseholderQR<RMatrix> qr(tau);
    frame = qr.householderQ() * RMatrix::Identity(r, r);
  }
  RMatrix perp = frame.rightCols(r - 1);
  sl.dir_coeff = a * perp;
  for (Eigen::Index j = 0; j < r - 1; ++j) {
    sl.dirs.push_back(from_coords(static_cast<int>(m), e * perp.col(j)).matrix());
  }
  return sl;
}

LmiProblem lambda_min_problem(const Slice& sl) {
  LmiProblem p;
  const Eigen::Index m = sl.x0.rows();
  p.base = sl.x0;
  p.dirs = sl.dirs;
  p.dirs.push_back(-CMatrix::Identity(m, m));
  p.objective = RVector::Zero(static_cast<Eigen::Index>(p.dirs.size()));
  p.objective(p.objective.size() - 1) = 1.0;
  return p;
}

RVector lambda_min_start(const Slice& sl) {
  RVector z = RVector::Zero(static_cast<Eigen::Index>(sl.dirs.size()) + 1);
  z(z.size() - 1) = HermOp::unchecked(sl.x0).min_eigenvalue() - 1.0;
  return z;
}

CMatrix slice_point(const Slice& sl, const RVector& z) {
  CMatrix x = sl.x0;
  for (size_t j = 0; j < sl.dirs.size(); ++j) x += z(static_cast<Eigen::Index>(j)) * sl.dirs[j];
  return x;
}

enum class RoundOutcome { interior, boundary, empty };

struct RoundResult {
  RoundOutcome outcome = RoundOutcome::empty;
  double value = 0.0;  // best lambda_min
  CMatrix point;       // compressed slice point at the optimum
  CMatrix dual;        // trace-normalized dual estimate
  RVector z;
};

// One maximization of lambda_min over a compressed slice.
RoundResult solve_round(const Slice& sl, const Settings& st, int round, bool stop_at_interior) {
  const double m = static_cast<double>(sl.x0.rows());
  LmiProblem prob = lambda_min_problem(sl);
  BarrierOptions opts;
  opts.max_newton = st.budget;
  const Tolerances& tol = st.tol;
  auto stop = [&](const RVector& z, double mu) {
    double t = z(z.size() - 1);
    if (stop_at_interior && t > tol.interior) return true;
    return t + 2.0 * m * mu < -tol.infeasible;
  };
  auto br = detail::maximize_with_barrier(prob, lambda_min_start(sl), opts, stop);
  RoundResult rr;
  rr.z = br.z;
  rr.value = br.z(br.z.size() - 1);
  rr.point = slice_point(sl, br.z);
  rr.dual = br.slack_inverse / br.slack_inverse.trace().real();
  if (br.budget_exhausted) throw FaceReductionError("inner ascent did not converge within budget", round, rr.value);

  const double upper = rr.value + 2.0 * m * br.mu;
  if (rr.value > tol.interior) {
    rr.outcome = RoundOutcome::interior;
  } else if (rr.value >= -tol.psd) {
    rr.outcome = RoundOutcome::boundary;
  } else if (upper < -tol.infeasible) {
    rr.outcome = RoundOutcome::empty;
  } else {
    throw UndecidedFeasibility(rr.value, round);
  }
  return rr;
}

// Least-squares refit of a trace-one dual estimate: restricted to the span of
// its eigenvectors above range * top, projected onto the constraints
// <Z, x0> = <Z, d_j> = 0, tr Z = 1.
CMatrix polish_certificate(const CMatrix& raw, const Slice& sl, double range) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(raw);
  const RVector& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) >= range * top) idx.push_back(i);
  CMatrix w(raw.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t c = 0; c < idx.size(); ++c) w.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(idx[c]);
  const Eigen::Index q = w.cols();

  RMatrix a(static_cast<Eigen::Index>(sl.dirs.size()) + 2, q * q);
  RVector b = RVector::Zero(a.rows());
  a.row(0) = hcoords(w.adjoint() * sl.x0 * w).transpose();
  for (size_t j = 0; j < sl.dirs.size(); ++j)
    a.row(static_cast<Eigen::Index>(j) + 1) = hcoords(w.adjoint() * sl.dirs[j] * w).transpose();
  a.row(a.rows() - 1) = hcoords(CMatrix::Identity(q, q)).transpose();
  b(b.size() - 1) = 1.0;

  RVector u0 = hcoords(w.adjoint() * raw * w);
  // constraints that are numerically void on range(W) must not be enforced
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod;
  cod.setThreshold(1e-10);
  cod.compute(a);
  RVector u = u0 - cod.solve(a * u0 - b);
  return w * from_coords(static_cast<int>(q), u).matrix() * w.adjoint();
}

struct Reduction {
  bool empty = false;
  RMatrix basis;       // final representative, ambient coordinates
  CMatrix support;     // n x r
  std::vector<HermOp> steps;
  CMatrix interior;    // ambient
};

Reduction reduce(const HermSubspace& s, const Settings& st) {
  const int n = s.ambient_dim();
  Reduction red;
  red.basis = s.coords();
  red.support = CMatrix::Identity(n, n);
  if (s.is_zero()) {
    red.empty = true;
    return red;
  }
  for (int round = 0; round <= n; ++round) {
    Slice sl = make_slice(red.basis, n, red.support);
    if (!sl.has_trace_one) {
      red.empty = true;
      return red;
    }
    RoundResult rr = solve_round(sl, st, round, true);
    if (rr.outcome == RoundOutcome::empty) {
      red.empty = true;
      return red;
    }
    if (rr.outcome == RoundOutcome::interior) {
      red.interior = red.support * rr.point * red.support.adjoint();
      return red;
    }

    // Boundary: the dual estimate Z is PSD, orthogonal to every slice
    // direction, and (since the optimum is zero) orthogonal to x0. The raw
    // barrier estimate is only accurate to the centering precision, so it is
    // re-fitted on its dominant eigenspace before validation, widening the
    // eigenspace when the true certificate has a large eigenvalue spread.
    CMatrix zcert;
    Eigen::SelfAdjointEigenSolver<CMatrix> es;
    bool valid = false;
    for (double range : {kCertificateRange, 1e-6, 1e-9}) {
      zcert = polish_certificate(rr.dual, sl, range);
      double resid = std::abs((zcert.array() * sl.x0.array().conjugate()).sum().real());
      for (const auto& d : sl.dirs) resid = std::max(resid, std::abs((zcert.array() * d.array().conjugate()).sum().real()));
      es.compute(zcert);
      const RVector& ev = es.eigenvalues();
      valid = resid <= kCertificateResidual && ev(ev.size() - 1) > 0.0 && ev(0) >= -kCertificateResidual;
      if (valid) break;
    }
    if (!valid) throw FaceReductionError("face certificate failed validation", round, rr.value);
    const RVector& zev = es.eigenvalues();
    const double zmax = zev(zev.size() - 1);
    std::vector<Eigen::Index> keep, drop;
    for (Eigen::Index i = 0; i < zev.size(); ++i) {
      (zev(i) >= kCertificateRange * zmax ? drop : keep).push_back(i);
    }
    CMatrix wcols(es.eigenvectors().rows(), static_cast<Eigen::Index>(drop.size()));
    CMatrix zpart = CMatrix::Zero(zev.size(), zev.size());
    for (size_t c = 0; c < drop.size(); ++c) {
      wcols.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(drop[c]);
      zpart += zev(drop[c]) * es.eigenvectors().col(drop[c]) * es.eigenvectors().col(drop[c]).adjoint();
    }
    red.steps.push_back(HermOp::unchecked(red.support * zpart * red.support.adjoint()));
    if (keep.empty()) {
      red.empty = true;
      return red;
    }
    CMatrix kcols(es.eigenvectors().rows(), static_cast<Eigen::Index>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c) kcols.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);

    // Directions of the representative whose compression has no component
    // touching range(W).
    const Eigen::Index k = red.basis.cols();
    const Eigen::Index m = red.support.cols();
    const Eigen::Index w = wcols.cols();
    RMatrix off(2 * w * m, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      CMatrix ci = red.support.adjoint() * from_coords(n, red.basis.col(i)).matrix() * red.support;
      CMatrix block = wcols.adjoint() * ci;  // w x m
      Eigen::Index p = 0;
      for (Eigen::Index a = 0; a < w; ++a)
        for (Eigen::Index b = 0; b < m; ++b) {
          off(p++, i) = block(a, b).real();
          off(p++, i) = block(a, b).imag();
        }
    }
    Eigen::JacobiSVD<RMatrix> svd(off, Eigen::ComputeFullV);
    const RVector& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > kFaceResidual) ++rank;
    RMatrix nullspace = svd.matrixV().rightCols(k - rank);
    red.basis = red.basis * nullspace;
    red.support = red.support * kcols;
    if (red.basis.cols() == 0) {
      red.empty = true;
      return red;
    }
  }
  throw FaceReductionError("facial reduction did not terminate", n + 1, 0.0);
}

}  // namespace

FeasibilityResult feasible_point(const HermSubspace& s, const Settings& settings) {
  FeasibilityResult out;
  if (s.is_zero()) return out;
  const int n = s.ambient_dim();
  Slice sl = make_slice(s.coords(), n, CMatrix::Identity(n, n));
  if (!sl.has_trace_one) return out;
  RoundResult rr = solve_round(sl, settings, 0, false);
  out.best_lambda_min = rr.value;
  if (rr.outcome == RoundOutcome::empty) return out;
  out.status = Feasibility::feasible;
  HermOp x = HermOp::unchecked(rr.point);
  x = x * (1.0 / x.trace());
  out.witness = DensityOp(x, settings.tol);
  return out;
}

ClosureResult close_subspace(const HermSubspace& s, const Settings& settings) {
  Reduction red = reduce(s, settings);
  const int n = s.ambient_dim();
  ClosureResult out;
  if (red.empty) {
    out.closure = HermSubspace::zero(n);
    return out;
  }
  out.closure = span_coords(n, red.basis, settings.tol);
  HermOp interior = HermOp::unchecked(red.interior);
  interior = interior * (1.0 / interior.trace());
  Tolerances loose = settings.tol;
  loose.trace = std::max(loose.trace, 1e-9);
  out.face = FaceCertificate{HermOp::unchecked(red.support * red.support.adjoint()), std::move(red.steps),
                             DensityOp(interior, loose)};
  return out;
}

HermSubspace good_representative(const HermSubspace& s, const Settings& settings) {
  return close_subspace(s, settings).closure;
}

FaceCertificate minimal_face(const HermSubspace& s, const Settings& settings) {
  ClosureResult c = close_subspace(s, settings);
  if (!c.face) throw std::invalid_argument("minimal_face: subspace does not meet the state space");
  return std::move(*c.face);
}

// ------------------------------------------------------------------ bodies

StateBody state_body(const HermSubspace& good_rep, const Settings& settings) {
  ClosureResult c = close_subspace(good_rep, settings);
  if (!c.face) throw std::invalid_argument("state_body: subspace does not meet the state space");
  const int n = good_rep.ambient_dim();
  StateBody body;
  body.n = n;
  body.center = c.face->interior_point.op();
  body.support = support_columns(c.face->support, 0.5);
  // traceless part of the closure
  const RMatrix& q = c.closure.coords();
  RVector id = to_coords(HermOp::identity(n));
  RVector tau = q.transpose() * id;
  const Eigen::Index k = q.cols();
  if (k > 1) {
    Eigen::HouseholderQR<RMatrix> qr(tau);
    RMatrix frame = qr.householderQ() * RMatrix::Identity(k, k);
    RMatrix dirs = q * frame.rightCols(k - 1);
    for (Eigen::Index j = 0; j < dirs.cols(); ++j) body.directions.push_back(from_coords(n, dirs.col(j)));
  }
  return body;
}

namespace {

double compressed_min_eig(const StateBody& body, const CMatrix& x) {
  CMatrix c = body.support.adjoint() * x * body.support;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

DensityOp linear_maximize(const StateBody& body, const HermOp& c, const Settings& settings) {
  if (c.dim() != body.n) throw DimensionError("linear_maximize: dimension mismatch");
  if (body.directions.empty()) return DensityOp(body.center, settings.tol);
  if (body.is_full()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c.matrix());
    return DensityOp::pure(es.eigenvectors().col(body.n - 1));
  }
  LmiProblem prob;
  prob.base = body.support.adjoint() * body.center.matrix() * body.support;
  prob.objective.resize(static_cast<Eigen::Index>(body.directions.size()));
  for (size_t j = 0; j < body.directions.size(); ++j) {
    prob.dirs.push_back(body.support.adjoint() * body.directions[j].matrix() * body.support);
    prob.objective(static_cast<Eigen::Index>(j)) = hs_inner(c, body.directions[j]);
  }
  const double scale = std::max(prob.objective.norm(), 1e-12);
  BarrierOptions opts;
  opts.mu_start = scale;
  opts.mu_final = 1e-10 * scale;
  opts.max_newton = settings.budget;
  auto br = detail::maximize_with_barrier(prob, RVector::Zero(prob.objective.size()), opts);
  CMatrix x = body.center.matrix();
  for (size_t j = 0; j < body.directions.size(); ++j) x += br.z(static_cast<Eigen::Index>(j)) * body.directions[j].matrix();
  HermOp h = HermOp::unchecked(x);
  return DensityOp(h * (1.0 / h.trace()), settings.tol);
}

std::vector<DensityOp> sample_body(const StateBody& body, int count, std::mt19937_64& rng) {
  std::vector<DensityOp> out;
  const size_t d = body.directions.size();
  if (d == 0) {
    out.assign(static_cast<size_t>(std::max(count, 0)), DensityOp(body.center));
    return out;
  }
  std::normal_distribution<double> gauss;
  while (static_cast<int>(out.size()) < count) {
    CMatrix u = CMatrix::Zero(body.n, body.n);
    double norm2 = 0.0;
    std::vector<double> y(d);
    for (auto& v : y) {
      v = gauss(rng);
      norm2 += v * v;
    }
    for (size_t j = 0; j < d; ++j) u += (y[j] / std::sqrt(norm2)) * body.directions[j].matrix();
    // lambda_min along the ray is concave; bisect for the boundary
    double lo = 0.0, hi = 2.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (compressed_min_eig(body, body.center.matrix() + mid * u) >= 0.0) lo = mid; else hi = mid;
    }
    HermOp p = HermOp::unchecked(body.center.matrix() + lo * u);
    out.emplace_back(p * (1.0 / p.trace()));
  }
  return out;
}

// ------------------------------------------------------------------ oracle

OracleSample brute_force_sample(const HermSubspace& s, int samples, std::uint64_t seed) {
  const int n = s.ambient_dim();
  if (s.is_zero()) throw OracleInconclusive("oracle: zero subspace has no trace-one points");
  // Slice of s itself, uncompressed: min-norm trace-one element and an
  // orthonormal traceless frame.
  const RMatrix& q = s.coords();
  RVector id = to_coords(HermOp::identity(n));
  RVector tau = q.transpose() * id;
  const double tn = tau.norm();
  if (tn <= 1e-12) throw OracleInconclusive("oracle: subspace has no trace-one element");
  const Eigen::Index k = q.cols();
  RVector x0 = q * (tau / (tn * tn));
  RMatrix dirs(n * n, k - 1);
  if (k > 1) {
    Eigen::HouseholderQR<RMatrix> qr(tau);
    RMatrix frame = qr.householderQ() * RMatrix::Identity(k, k);
    dirs = q * frame.rightCols(k - 1);
  }
  const Eigen::Index d = k - 1;
  if (d > 6) throw DimensionError("oracle: slice dimension above 6");

  constexpr double kAccept = -1e-14;
  auto min_eig = [&](const RVector& y) {
    RVector x = x0 + dirs * y;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(from_coords(n, x).matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };

  std::vector<RVector> accepted;
  // grid containing the origin; densities have HS norm <= 1, so |y| <= 1
  int g = 1;
  if (d > 0) {
    g = 101;
    while (g > 3 && std::pow(double(g), double(d)) > 20000.0) g -= 2;
  }
  const long total = d == 0 ? 1 : static_cast<long>(std::pow(double(g), double(d)));
  for (long idx = 0; idx < total; ++idx) {
    RVector y(d);
    long rem = idx;
    for (Eigen::Index j = 0; j < d; ++j) {
      y(j) = -1.0 + 2.0 * double(rem % g) / double(g - 1);
      rem /= g;
    }
    if (min_eig(y) >= kAccept) accepted.push_back(y);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  if (d > 0) {
    for (int i = 0; i < samples; ++i) {
      RVector y(d);
      for (Eigen::Index j = 0; j < d; ++j) y(j) = unif(rng);
      if (min_eig(y) >= kAccept) accepted.push_back(y);
    }
  }
  if (accepted.empty() && d > 0) {
    // Thin bodies can slip between grid points: pattern search on lambda_min
    // from the best few samples.
    std::vector<std::pair<double, RVector>> starts;
    for (long idx = 0; idx < total; ++idx) {
      RVector y(d);
      long rem = idx;
      for (Eigen::Index j = 0; j < d; ++j) {
        y(j) = -1.0 + 2.0 * double(rem % g) / double(g - 1);
        rem /= g;
      }
      starts.emplace_back(min_eig(y), y);
    }
    const size_t top = std::min<size_t>(5, starts.size());
    std::partial_sort(starts.begin(), starts.begin() + static_cast<long>(top), starts.end(),
                      [](const auto& x, const auto& y) { return x.first > y.first; });
    std::normal_distribution<double> gauss;
    for (size_t s0 = 0; s0 < top && accepted.empty(); ++s0) {
      RVector y = starts[s0].second;
      double val = starts[s0].first;
      double step = 2.0 / double(g - 1);
      while (step > 1e-13 && val < kAccept) {
        bool improved = false;
        for (int trial = 0; trial < 2 * static_cast<int>(d) + 8 && !improved; ++trial) {
          RVector u = RVector::Zero(d);
          if (trial < 2 * d) {
            u(trial / 2) = trial % 2 ? -1.0 : 1.0;
          } else {
            for (Eigen::Index j = 0; j < d; ++j) u(j) = gauss(rng);
            u.normalize();
          }
          const double v = min_eig(y + step * u);
          if (v > val) {
            y += step * u;
            val = v;
            improved = true;
          }
        }
        if (!improved) step *= 0.5;
      }
      if (val >= kAccept) accepted.push_back(y);
    }
  }
  if (accepted.empty()) throw OracleInconclusive("oracle: no sampled point was positive semidefinite");

  // chord end points from accepted points, toward extreme points
  if (d > 0) {
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<size_t> pick(0, accepted.size() - 1);
    const size_t seeds = accepted.size();
    int attempts = 0;
    while (static_cast<int>(accepted.size()) < samples && attempts < 4 * samples) {
      ++attempts;
      const RVector base = accepted[pick(rng) % seeds];
      RVector u(d);
      for (Eigen::Index j = 0; j < d; ++j) u(j) = gauss(rng);
      u.normalize();
      for (double sign : {1.0, -1.0}) {
        double lo = 0.0, hi = 2.0;
        for (int it = 0; it < 50; ++it) {
          double mid = 0.5 * (lo + hi);
          if (min_eig(base + sign * mid * u) >= kAccept) lo = mid; else hi = mid;
        }
        accepted.push_back(base + sign * lo * u);
      }
    }
  } else {
    accepted.resize(static_cast<size_t>(std::max(samples, 1)), accepted.front());
  }

  OracleSample out;
  RMatrix cols(n * n, static_cast<Eigen::Index>(accepted.size()));
  for (size_t i = 0; i < accepted.size(); ++i) {
    RVector x = x0 + dirs * accepted[i];
    cols.col(static_cast<Eigen::Index>(i)) = x;
    out.points.push_back(from_coords(n, x));
  }
  Tolerances span_tol;
  span_tol.rank = 1e-6;
  out.span = span_coords(n, cols, span_tol);
  return out;
}

HermSubspace brute_force_span(const HermSubspace& s, int samples, std::uint64_t seed) {
  return brute_force_sample(s, samples, seed).span;
}

}  // namespace qlattice
