#include "hsdoa/l1_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hsdoa/errors.hpp"

namespace hsdoa {

cplx soft_threshold(cplx v, double t) {
  const double mag = std::abs(v);
  if (mag <= t) return {};
  return v * (1.0 - t / mag);
}

double lipschitz_estimate(const CMatrix& a) {
  if (a.size() == 0) throw ParameterError("lipschitz_estimate: empty matrix");
  // The nonzero spectra of A^H A and A A^H coincide; iterate on the smaller one.
  const CMatrix gram = a.rows() <= a.cols() ? CMatrix(a * a.adjoint()) : CMatrix(a.adjoint() * a);
  const Eigen::Index n = gram.rows();
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = cplx(1.0 + 0.1 * std::sin(1.0 + static_cast<double>(i)),
                0.05 * std::cos(3.0 * static_cast<double>(i)));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    CVector w = gram * v;
    const double next = std::real(v.dot(w));
    const double norm = w.norm();
    if (!std::isfinite(norm)) throw NumericError("lipschitz_estimate: non-finite iterate");
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= 1e-6 * std::abs(next)) {
      return 2.0 * next * 1.01;
    }
    lambda = next;
  }
  throw NumericError("lipschitz_estimate: power iteration did not converge");
}

double l1_objective(const CMatrix& a, const CVector& z, const CVector& x, double mu) {
  return (z - a * x).squaredNorm() + mu * x.cwiseAbs().sum();
}

KktReport kkt_residual(const CMatrix& a, const CVector& z, const CVector& x, double mu) {
  const CVector g = a.adjoint() * (z - a * x);
  const double half = 0.5 * mu;
  KktReport r;
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double ratio = std::abs(g[n]) / half;
    if (x[n] == cplx{}) {
      r.zero_violation = std::max(r.zero_violation, ratio - 1.0);
    } else {
      ++r.support_size;
      r.support_violation = std::max(r.support_violation, std::abs(ratio - 1.0));
    }
  }
  return r;
}

namespace {

bool all_finite(const CVector& v) { return v.allFinite(); }

using RArray = Eigen::ArrayXd;

// Linear operators in split real/imaginary form. Vectors on the grid side
// have length padded() >= cols() with zeros in the tail.

// Dense fallback for arbitrary A.
class DenseOperator {
 public:
  explicit DenseOperator(const CMatrix& a) : a_(a), grid_(a.cols()), data_(a.rows()) {}
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index padded() const { return a_.cols(); }

 private:
  void adjoint(const RArray& rr, const RArray& ri, RArray& gr, RArray& gi) const {
    data_.real() = rr.matrix();
    data_.imag() = ri.matrix();
    grid_.noalias() = a_.adjoint() * data_;
    gr = grid_.real().array();
    gi = grid_.imag().array();
  }
  void apply(const RArray& xr, const RArray& xi, RArray& out_r, RArray& out_i) const {
    grid_.real() = xr.matrix();
    grid_.imag() = xi.matrix();
    data_.noalias() = a_ * grid_;
    out_r = data_.real().array();
    out_i = data_.imag().array();
  }

 public:
  // x_new = shrink(y + step * A^H (z - A y)) and its image; returns ||x_new||_1.
  double prox_step(const RArray& rr, const RArray& ri, const RArray& yr, const RArray& yi,
                   double step, double thresh, RArray& nr, RArray& ni, RArray& anr,
                   RArray& ani) const {
    RArray gr(padded()), gi(padded());
    adjoint(rr, ri, gr, gi);
    nr = yr + step * gr;
    ni = yi + step * gi;
    // sqrt of the squared modulus avoids the slow hypot inside std::abs.
    const RArray mag = (nr.square() + ni.square()).sqrt();
    const RArray shrink = 1.0 - thresh / mag.max(thresh);
    nr *= shrink;
    ni *= shrink;
    apply(nr, ni, anr, ani);
    return (mag - thresh).max(0.0).sum();
  }

 private:
  const CMatrix& a_;
  mutable CVector grid_, data_;
};

// Matrix-free operator for A(m, n) = w_n^m, the steering matrix of a uniform
// line array. Products run as Horner recurrences over blocks of the grid.
class PowerOperator {
 public:
  static constexpr Eigen::Index kBlock = 64;

  PowerOperator(const CVector& nodes, Eigen::Index rows) : rows_(rows) {
    const Eigen::Index n = nodes.size();
    const Eigen::Index np = (n + kBlock - 1) / kBlock * kBlock;
    wr_ = RArray::Zero(np);
    wi_ = RArray::Zero(np);
    wr_.head(n) = nodes.real().array();
    wi_.head(n) = nodes.imag().array();
    live_ = RArray::Zero(np);
    live_.head(n).setOnes();
  }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index padded() const { return wr_.size(); }

  // One blocked sweep: g = A^H r by Horner, the soft-threshold step, then
  // A x_new accumulated from the powers of w. Returns ||x_new||_1.
  double prox_step(const RArray& rr, const RArray& ri, const RArray& yr, const RArray& yi,
                   double step, double thresh, RArray& nr, RArray& ni, RArray& anr,
                   RArray& ani) const {
    using Block = Eigen::Array<double, kBlock, 1>;
    using Acc = Eigen::Array<double, kBlock, Eigen::Dynamic>;
    Acc acc_r = Acc::Zero(kBlock, rows_), acc_i = Acc::Zero(kBlock, rows_);
    Block l1 = Block::Zero();
    const Eigen::Index top = rows_ - 1;
    for (Eigen::Index n0 = 0; n0 < padded(); n0 += kBlock) {
      const Eigen::Map<const Block> wr(wr_.data() + n0), wi(wi_.data() + n0);
      const Eigen::Map<const Block> live(live_.data() + n0);
      Block a = Block::Constant(rr[top]), b = Block::Constant(ri[top]);
      for (Eigen::Index m = top - 1; m >= 0; --m) {
        const Block t = a * wr + b * wi + rr[m];
        b = b * wr - a * wi + ri[m];
        a = t;
      }
      const Block vr = Eigen::Map<const Block>(yr.data() + n0) + step * a;
      const Block vi = Eigen::Map<const Block>(yi.data() + n0) + step * b;
      // sqrt of the squared modulus avoids the slow hypot inside std::abs.
      const Block mag = (vr.square() + vi.square()).sqrt();
      const Block shrink = (1.0 - thresh / mag.max(thresh)) * live;
      a = vr * shrink;
      b = vi * shrink;
      l1 += (mag - thresh).max(0.0) * live;
      Eigen::Map<Block>(nr.data() + n0) = a;
      Eigen::Map<Block>(ni.data() + n0) = b;
      for (Eigen::Index m = 0; m < rows_; ++m) {
        acc_r.col(m) += a;
        acc_i.col(m) += b;
        const Block t = a * wr - b * wi;
        b = a * wi + b * wr;
        a = t;
      }
    }
    anr = acc_r.colwise().sum().transpose();
    ani = acc_i.colwise().sum().transpose();
    return l1.sum();
  }

 private:
  Eigen::Index rows_;
  RArray wr_, wi_, live_;  // live_ masks the zero padding
};

// Nodes w_n when every column of A is (1, w_n, w_n^2, ...) to rounding.
std::optional<CVector> power_nodes(const CMatrix& a) {
  if (a.rows() < 2) return std::nullopt;
  constexpr double kTol = 1e-10;
  const CVector w = a.row(1).transpose();
  for (Eigen::Index n = 0; n < a.cols(); ++n) {
    if (std::abs(a(0, n) - 1.0) > kTol) return std::nullopt;
    cplx p = 1.0;
    for (Eigen::Index m = 1; m < a.rows(); ++m) {
      p *= w[n];
      if (std::abs(a(m, n) - p) > kTol) return std::nullopt;
    }
  }
  return w;
}

struct Fista {
  RArray x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

template <class Op>
Fista fista(const Op& op, Eigen::Index n, const CVector& z, double f0, double step, double thresh,
            const L1Options& opt, std::vector<double>& history) {
  const Eigen::Index np = op.padded();
  const RArray zr = z.real().array(), zi = z.imag().array();
  RArray xr = RArray::Zero(np), xi = RArray::Zero(np);
  RArray yr = xr, yi = xi, nr = xr, ni = xi;
  RArray axr = RArray::Zero(op.rows()), axi = axr, ayr = axr, ayi = axr, anr = axr, ani = axr;
  double f = f0;
  double t = 1.0;
  bool restarted_last = false;
  Fista out;

  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const double l1 = op.prox_step(zr - ayr, zi - ayi, yr, yi, step, thresh, nr, ni, anr, ani);
    const double f_new = (zr - anr).square().sum() + (zi - ani).square().sum() + opt.mu * l1;
    if (!std::isfinite(f_new)) throw NumericError("L1 solver produced a non-finite objective");

    if (f_new > f) {
      if (restarted_last) {
        // A plain proximal step from x failed to descend: only rounding is left.
        out.converged = true;
        break;
      }
      t = 1.0;
      yr = xr;
      yi = xi;
      ayr = axr;
      ayi = axi;
      restarted_last = true;
      continue;
    }
    restarted_last = false;
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_new;
    yr = nr + beta * (nr - xr);
    yi = ni + beta * (ni - xi);
    ayr = anr + beta * (anr - axr);
    ayi = ani + beta * (ani - axi);
    const double rel = (f - f_new) / std::max(f_new, std::numeric_limits<double>::min());
    std::swap(xr, nr);
    std::swap(xi, ni);
    std::swap(axr, anr);
    std::swap(axi, ani);
    f = f_new;
    t = t_new;
    if (opt.record_history) history.push_back(f);
    if (rel < opt.tol) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.iterations = std::min(it, opt.max_iter);
  out.objective = f;
  out.x = RArray(2 * n);
  out.x << xr.head(n), xi.head(n);
  return out;
}

// Cyclic coordinate descent restricted to `active`, then a full gradient
// check that admits violating coordinates. Monotone in the objective.
void polish(const CMatrix& a, double mu, CVector& x, CVector& residual) {
  const double half = 0.5 * mu;
  std::vector<Eigen::Index> active;
  for (Eigen::Index n = 0; n < x.size(); ++n)
    if (x[n] != cplx{}) active.push_back(n);
  const RVector col_norm2 = a.colwise().squaredNorm().transpose();

  for (int outer = 0; outer < 50; ++outer) {
    for (int sweep = 0; sweep < 20000; ++sweep) {
      // Stationarity gap of each coordinate, measured before its update.
      double gap = 0.0;
      for (const Eigen::Index n : active) {
        const double c = col_norm2[n];
        if (c == 0.0) continue;
        const cplx old = x[n];
        const cplx corr = a.col(n).dot(residual);  // a_n^H r
        const double r = std::abs(old);
        gap = std::max(gap, r == 0.0 ? std::abs(corr) / half - 1.0
                                     : std::abs(corr / half - old / r));
        const cplx next = soft_threshold(old + corr / c, half / c);
        if (next != old) {
          residual.noalias() -= a.col(n) * (next - old);
          x[n] = next;
        }
      }
      std::erase_if(active, [&](Eigen::Index n) { return x[n] == cplx{}; });
      if (gap <= 1e-4) break;
    }
    const CVector g = a.adjoint() * residual;
    bool added = false;
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      if (x[n] == cplx{} && std::abs(g[n]) > half * (1.0 + 1e-6) &&
          std::find(active.begin(), active.end(), n) == active.end()) {
        active.push_back(n);
        added = true;
      }
    }
    if (!added) break;
    std::sort(active.begin(), active.end());
  }
}

// Coordinate descent crawls between nearly collinear neighbours, so a single
// atom is tried directly: a 1-sparse point meeting every KKT condition is the
// global minimizer.
void certify_single_atom(const CMatrix& a, const CVector& z, double mu, CVector& x,
                         CVector& residual) {
  const double half = 0.5 * mu;
  std::vector<Eigen::Index> support;
  for (Eigen::Index n = 0; n < x.size(); ++n)
    if (x[n] != cplx{}) support.push_back(n);
  if (support.size() < 2) return;
  const double current = residual.squaredNorm() + mu * x.cwiseAbs().sum();
  for (const Eigen::Index n : support) {
    const double c = a.col(n).squaredNorm();
    const cplx xn = soft_threshold(a.col(n).dot(z), half) / c;
    if (xn == cplx{}) continue;
    const CVector r = z - a.col(n) * xn;
    if ((a.adjoint() * r).cwiseAbs().maxCoeff() > half * (1.0 + 1e-9)) continue;
    if (r.squaredNorm() + mu * std::abs(xn) > current) continue;
    x.setZero();
    x[n] = xn;
    residual = r;
    return;
  }
}

}  // namespace

L1Solution solve_l1(const CMatrix& a, const CVector& z, const L1Options& opt,
                    std::optional<double> lipschitz) {
  if (!(opt.mu > 0.0)) throw ParameterError("L1 weight mu must be positive");
  if (!(opt.tol > 0.0)) throw ParameterError("L1 tolerance must be positive");
  if (opt.max_iter < 1) throw ParameterError("L1 max_iter must be at least 1");
  if (z.size() != a.rows()) throw ParameterError("L1 problem: data length != matrix rows");
  if (!all_finite(z) || !a.allFinite()) throw NumericError("L1 problem has non-finite entries");

  const Eigen::Index n = a.cols();
  L1Solution sol;
  sol.x = CVector::Zero(n);
  const double f0 = z.squaredNorm();
  if (opt.record_history) sol.history.push_back(f0);

  CVector grad = a.adjoint() * z;  // A^H (z - A*0)
  if (2.0 * grad.cwiseAbs().maxCoeff() <= opt.mu) {
    sol.objective = f0;
    sol.iterations = 1;
    sol.converged = true;
    return sol;
  }

  const double lip = lipschitz ? *lipschitz : lipschitz_estimate(a);
  if (!(lip > 0.0) || !std::isfinite(lip)) throw NumericError("invalid Lipschitz constant");
  const double step = 2.0 / lip;       // gradient of ||z - Ax||^2 is -2 A^H r
  const double thresh = opt.mu / lip;

  Fista run;
  if (const auto nodes = power_nodes(a)) {
    run = fista(PowerOperator(*nodes, a.rows()), n, z, f0, step, thresh, opt, sol.history);
  } else {
    run = fista(DenseOperator(a), n, z, f0, step, thresh, opt, sol.history);
  }
  sol.iterations = run.iterations;
  sol.converged = run.converged;
  double f = run.objective;
  CVector xc(n);
  xc.real() = run.x.head(n).matrix();
  xc.imag() = run.x.tail(n).matrix();
  if (opt.polish) {
    CVector residual = z - a * xc;
    polish(a, opt.mu, xc, residual);
    certify_single_atom(a, z, opt.mu, xc, residual);
    // Coordinate descent never increases the objective.
    f = std::min(f, residual.squaredNorm() + opt.mu * xc.cwiseAbs().sum());
    if (opt.record_history) sol.history.push_back(f);
  }
  if (!all_finite(xc)) throw NumericError("L1 solver produced non-finite coefficients");
  sol.x = std::move(xc);
  sol.objective = f;
  return sol;
}

}  // namespace hsdoa
