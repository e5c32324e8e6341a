#pragma once

// Reduction of Q_{h,k} near a focus-focus value to
//   u * (l^4 + a l^2 + b l + 1),
// the map F(h,k) = (a - 2, b) and its Jacobian at the critical value.

#include <array>
#include <utility>

#include "laxmono/cpoly.hpp"
#include "laxmono/models.hpp"

namespace laxmono {

struct NormalFormResult {
  double a = 2.0;
  double b = 0.0;
  double u = 1.0;
  /// lambda = shift0 + scale0 * (sigma + s * lhat)
  double shift0 = 0.0;
  double scale0 = 1.0;
  double sigma = 0.0;
  double s = 1.0;

  double hhat() const { return a - 2.0; }
  double khat() const { return b; }
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct GenericityReport {
  /// D[i][j] = dF_i / dx_j with x = (h, k).
  Matrix2 D{};
  double det = 0.0;
  int orientation = 1;
  bool pass = false;
};

/// Coefficients of p(alpha + beta x) from those of p(lambda).
std::array<Complex, 5> affine_substitute(const std::array<Complex, 5>& c, Complex alpha, Complex beta);

/// The non-real double root of Q at the critical value, taken in the upper
/// half plane. Throws NonGeneric when there is none.
Complex critical_double_root(const Model& m);

/// Throws BranchFailure when a0'/a4' <= 0 after the cubic shift.
NormalFormResult normalize_quartic(const Quartic& q, Complex lambda0);

/// Inverse of normalize_quartic: rebuilds Q(lambda) from the normal form.
Quartic reconstruct_quartic(const NormalFormResult& nf);

std::pair<double, double> F_map(const Model& m, double h, double k);

/// Central differences of F at the critical value; step <= 0 selects
/// 1e-5 * (|h0| + |k0| + 1).
GenericityReport jacobian_F(const Model& m, double step = 0.0);

/// Throws NonGeneric when |det D| <= 1e-8.
GenericityReport genericity_check(const Model& m);

}  // namespace laxmono
