#pragma once

// Integrable models with a spectral (or quasi-spectral) curve
// mu^2 = Q_{h,k}(lambda): energy-momentum map, vector field, reduced
// coordinates and the angle one-form.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "laxmono/cpoly.hpp"

namespace laxmono {

using PhaseState = std::vector<double>;

struct EMValue {
  double h = 0.0;
  double k = 0.0;
};

struct ReducedPoint {
  Complex lam;
  Complex mu;
};

/// xi = c1 * lambda dlambda / mu + c2 * dlambda / mu.
/// With `basis == false` the form is (c1 * lambda + c2) dlambda / (1 + lambda^2).
struct OneFormCoeffs {
  Complex c1;
  Complex c2;
  bool basis = true;
};

struct JCParams {
  double omega0 = 1.0;
  double omega = 2.0;
  double g = 1.0;
  double S0 = 1.0;
};

struct QuasiParams {
  double R = 1.0;
};

enum class ModelKind { JaynesCummings, SphericalPendulum, QuasiLax, Custom };

class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const { return ModelKind::Custom; }
  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;

  /// Largest violation of the phase-space constraints (0 when there are none).
  virtual double constraint_residual(const PhaseState&) const { return 0.0; }
  /// Restores constraints after an integration step.
  virtual void project(PhaseState&) const {}

  virtual EMValue energy_momentum(const PhaseState& s) const = 0;
  virtual void vector_field(const PhaseState& s, PhaseState& ds) const = 0;
  virtual Quartic spectral_coeffs(double h, double k) const = 0;

  /// Denominator of lambda-tilde; its argument is the angle conjugate to K.
  virtual Complex angle_carrier(const PhaseState& s) const = 0;
  virtual ReducedPoint reduce(const PhaseState& s) const = 0;
  virtual Complex theta_dot(Complex lam) const = 0;
  /// Time derivative of lambda-tilde expressed on the curve.
  virtual Complex lambda_dot(const ReducedPoint& p) const = 0;
  virtual OneFormCoeffs rotation_one_form() const = 0;

  virtual EMValue critical_value() const = 0;
  virtual PhaseState fixed_point() const = 0;
  virtual PhaseState seed_state(double h, double k) const = 0;

  /// Time scale of the linearised motion near the critical value.
  virtual double t_char() const { return 2.0 * 3.141592653589793; }
};

using ModelHandle = std::shared_ptr<const Model>;

ModelHandle make_jaynes_cummings(const JCParams& p = {});
ModelHandle make_spherical_pendulum();
ModelHandle make_quasi_lax(const QuasiParams& p = {});

/// Checked entry points (ConstraintViolation above 1e-6, AtInfinity on a
/// vanishing denominator).
EMValue em_map(const Model& m, const PhaseState& s);
PhaseState hamiltonian_vector_field(const Model& m, const PhaseState& s);
ReducedPoint reduce(const Model& m, const PhaseState& s);

/// Model parameters, when the model has any.
const JCParams* jc_params(const Model& m);
const QuasiParams* quasi_params(const Model& m);

}  // namespace laxmono
