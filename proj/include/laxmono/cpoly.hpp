#pragma once

// Complex quartic polynomials: evaluation, closed-form roots, discriminant,
// and continuation of the four roots along a closed parameter path.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace laxmono {

using Complex = std::complex<double>;

/// a[i] is the coefficient of lambda^i.
struct Quartic {
  std::array<Complex, 5> a{};
  bool real_coeffs = false;

  Quartic() = default;
  explicit Quartic(const std::array<Complex, 5>& coeffs);

  /// Real-coefficient constructor, lowest degree first.
  static Quartic real(double a0, double a1, double a2, double a3, double a4);

  Complex leading() const { return a[4]; }
  double max_abs_coeff() const;
};

struct RootSet {
  std::array<Complex, 4> roots{};

  Complex& operator[](std::size_t i) { return roots[i]; }
  const Complex& operator[](std::size_t i) const { return roots[i]; }
  double min_separation() const;
};

/// image[i] is the index in the *next* root set that root i of the *previous*
/// root set moves to.
struct Permutation4 {
  std::array<int, 4> image{0, 1, 2, 3};

  static Permutation4 identity() { return {}; }
  bool is_identity() const;
  /// (this after first): i -> this.image[first.image[i]]
  Permutation4 after(const Permutation4& first) const;
  /// True for a product of two disjoint transpositions.
  bool is_double_transposition() const;
  /// Cycle notation over 1-based indices, e.g. "(1 2)(3 4)" or "()".
  std::string cycle_notation() const;

  friend bool operator==(const Permutation4&, const Permutation4&) = default;
};

Complex eval_poly(const Quartic& q, Complex lambda);
Complex eval_derivative(const Quartic& q, Complex lambda);

/// Ferrari resolvent with one Newton polish per root.
/// Throws DegenerateLeadingCoefficient when |a4| < 1e-300.
RootSet solve_quartic(const Quartic& q);

/// Classical discriminant of a4 x^4 + ... + a0 (zero iff a repeated root).
Complex discriminant(const Quartic& q);

struct RootMatch {
  Permutation4 perm;
  /// second-best / best assignment cost; +inf when the best cost is zero.
  double quality = std::numeric_limits<double>::infinity();
  double cost = 0.0;
};

/// Exhaustive minimisation of total squared displacement over 24 assignments.
RootMatch match_roots(const RootSet& prev, const RootSet& next);

using CoefficientPath = std::function<Quartic(double)>;

struct RootTrack {
  std::vector<double> params;
  /// Roots in tracked order: roots[j][i] is the continuation of roots[0][i].
  std::vector<RootSet> rootsets;
  /// Matching between raw solver outputs of consecutive samples.
  std::vector<Permutation4> step_perms;
  std::vector<double> quality;
  /// Raw (solver-order) roots per sample, needed to compose step_perms.
  std::vector<RootSet> raw;
  Quartic first;
  Quartic last;
};

struct TrackOptions {
  int n_samples = 256;
  double guard = 3.0;
  int max_depth = 20;
};

/// Adaptive continuation of the roots along s in [0,1]. Each step is bisected
/// until the matching quality reaches `guard` and no root moves more than half
/// of the current minimal root separation.
RootTrack track_roots(const CoefficientPath& path, const TrackOptions& opts = {});

/// Composition of the step permutations of a closed track: root i of the
/// initial set ends at the position of initial root image[i].
/// Throws NotClosed when the end coefficients differ by more than 1e-12.
Permutation4 loop_permutation(const RootTrack& track);

}  // namespace laxmono
