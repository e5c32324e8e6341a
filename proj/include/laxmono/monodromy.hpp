#pragma once

#include <optional>
#include <string>
#include <vector>

#include "laxmono/cpoly.hpp"
#include "laxmono/error.hpp"
#include "laxmono/models.hpp"
#include "laxmono/normalform.hpp"

namespace laxmono {

/// Circle in the (h, k) plane; orientation +1 is counter-clockwise with h on
/// the horizontal axis. s = 0 is the point center + (radius, 0).
struct LoopSpec {
  EMValue center;
  double radius = 0.1;
  int n_samples = 512;
  int orientation = 1;

  EMValue at(double s) const;
  /// The same circle traversed the other way.
  LoopSpec reversed() const;
};

void validate(const LoopSpec& loop);

struct MonodromyMatrix {
  std::array<std::array<int, 2>, 2> entries{{{1, 0}, {0, 1}}};
  /// Basis in which `entries` acts.
  std::string basis = "(gamma_K, gamma_H)";

  int det() const { return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]; }
  bool is_identity() const { return entries[0][0] == 1 && entries[0][1] == 0 && entries[1][0] == 0 && entries[1][1] == 1; }
};

Complex residue_at_infinity(const OneFormCoeffs& xi, Complex a4);
Complex variation_of_integral(const OneFormCoeffs& xi, Complex a4);

/// -(1/2 pi i) times the integral of xi over |lambda| = Rbig on the sheet
/// mu ~ +sqrt(a4) lambda^2, by the trapezoidal rule.
Complex numeric_residue(const Model& m, double h, double k, const OneFormCoeffs& xi, double Rbig,
                        int nodes = 1024);

/// True when p is the double transposition that swaps the two roots of each
/// half plane and commutes with complex conjugation of `roots`.
bool is_conjugate_exchange(const Permutation4& p, const RootSet& roots);

struct MonodromyReport {
  GenericityReport genericity;
  LoopSpec traversed;
  RootTrack track;
  Permutation4 permutation;
  Complex residue;
  bool genericity_ok = false;
  bool permutation_ok = false;
  bool residue_ok = false;
  MonodromyMatrix matrix;
  std::optional<ErrorKind> failure;
  std::string message;
};

/// Runs every check and records the first failure instead of throwing
/// (except for RefinementExhausted and BranchFailure, which propagate).
MonodromyReport analyze_monodromy(const Model& m, const LoopSpec& loop, const TrackOptions& opts = {});

/// Throws NonGeneric, UnexpectedPermutation or ResidueMismatch.
MonodromyMatrix monodromy_matrix(const Model& m, const LoopSpec& loop, const TrackOptions& opts = {});

enum class CriticalClass { FocusFocusCandidate, BoundaryCandidate };
std::string_view to_string(CriticalClass c);

struct BifurcationHit {
  EMValue at;
  CriticalClass cls;
  /// log10 of the scale-normalised |discriminant| at `at`.
  double log10_abs_disc;
};

struct ScanGrid {
  double h_min, h_max, k_min, k_max;
  int n = 64;
};

/// Discriminant scaled by max|a_i|^6.
double normalized_discriminant(const Quartic& q);

std::vector<BifurcationHit> bifurcation_scan(const Model& m, const ScanGrid& grid);

}  // namespace laxmono
