#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arnoldi_lindblad/lindblad.hpp"

namespace arnoldi_lindblad {

enum class IntegratorMethod { RK4, DormandPrince45 };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::RK4;
  // Fixed-step mode: steps per propagated interval, or an explicit dt.
  int substeps = 200;
  std::optional<double> dt;
  // Raise the step count when the generator bound would put RK4 outside
  // its stability region.
  bool stability_guard = true;
  // Adaptive mode.
  double rtol = 1e-10;
  double atol = 1e-12;
  double min_step = 1e-13;

  void validate() const;
};

class StepSizeUnderflow : public std::runtime_error {
 public:
  StepSizeUnderflow(double time, double step);
  [[nodiscard]] double time() const { return time_; }

 private:
  double time_;
};

/// Largest |z| = |lambda dt| accepted for fixed-step RK4.
inline constexpr double kRk4StableRadius = 2.0;

/// Number of RK4 steps used for an interval of length `interval`.
int fixed_step_count(const LindbladModel& model, double interval, const IntegratorConfig& cfg);

/// rho(t0 + interval) from rho(t0). Input may be any operator; the
/// generator is linear and nothing is renormalized.
Matrix propagate(const LindbladModel& model, const Matrix& rho0, double t0, double interval,
                 const IntegratorConfig& cfg = {});
Operator propagate(const LindbladModel& model, const Operator& rho0, double t0, double interval,
                   const IntegratorConfig& cfg = {});

struct NamedObservable {
  std::string name;
  Operator op;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<cplx>> values;  // values[row][observable]
};

/// One integration pass through ascending sample times starting at times[0].
Trajectory observable_trajectory(const LindbladModel& model, const Operator& rho0,
                                 const std::vector<double>& times,
                                 const std::vector<NamedObservable>& observables,
                                 const IntegratorConfig& cfg = {});

/// Columns: t, re(<name>), im(<name>), ...
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace arnoldi_lindblad
