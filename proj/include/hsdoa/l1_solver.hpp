#pragma once

// Complex L1-regularized least squares
//
//   minimize_x  ||z - A x||_2^2 + mu ||x||_1
//
// by accelerated proximal gradient with function-value restart. Optimality
// is |(A^H (z - A x))_n| <= mu/2 where x_n == 0 and == mu/2 on the support.

#include <complex>
#include <optional>
#include <vector>

#include "hsdoa/types.hpp"

namespace hsdoa {

/// Proximal map of t * |.|: shrinks the magnitude by t, keeps the phase.
cplx soft_threshold(cplx v, double t);

/// 2 * sigma_max(A)^2 * 1.01, sigma_max by power iteration to 1e-6 relative.
/// Throws NumericError if the iteration has not settled after 10000 steps.
double lipschitz_estimate(const CMatrix& a);

struct L1Options {
  double mu = 0.1;
  double tol = 1e-6;      ///< relative objective change
  int max_iter = 2000;
  bool polish = true;     ///< active-set coordinate descent after the momentum phase
  bool record_history = false;
};

struct L1Solution {
  CVector x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  ///< accepted objective values, non-increasing
};

double l1_objective(const CMatrix& a, const CVector& z, const CVector& x, double mu);

/// Largest violation of the optimality conditions relative to mu/2:
/// max over zero coords of (|g_n| / (mu/2) - 1)_+ and over the support of
/// ||g_n| / (mu/2) - 1|, with g = A^H (z - A x).
struct KktReport {
  double zero_violation = 0.0;
  double support_violation = 0.0;
  std::size_t support_size = 0;
};

KktReport kkt_residual(const CMatrix& a, const CVector& z, const CVector& x, double mu);

/// `lipschitz` may be supplied when A is reused across many solves.
L1Solution solve_l1(const CMatrix& a, const CVector& z, const L1Options& opt = {},
                    std::optional<double> lipschitz = std::nullopt);

}  // namespace hsdoa
