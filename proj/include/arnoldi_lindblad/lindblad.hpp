#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "arnoldi_lindblad/operator.hpp"

namespace arnoldi_lindblad {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// f(t) = f0 + f1 cos(omega t) multiplying the drive Hamiltonian.
struct DriveProtocol {
  double f0 = 0.0;
  double f1 = 0.0;
  double omega = 1.0;

  [[nodiscard]] double at(double t) const;
  [[nodiscard]] double period() const;
};

struct JumpTerm {
  Operator op;
  double rate = 1.0;
};

/// Hamiltonian H(t) = H0 + f(t) H1 plus static jump operators.
/// Rates are folded into the jumps as sqrt(rate) on construction, so every
/// stored jump carries unit rate.
class LindbladModel {
 public:
  LindbladModel(Operator h0, std::vector<JumpTerm> jumps);
  LindbladModel(Operator h0, Operator h1, DriveProtocol drive, std::vector<JumpTerm> jumps);

  [[nodiscard]] const HilbertSpec& space() const { return h0_.space(); }
  [[nodiscard]] Eigen::Index dim() const { return h0_.dim(); }
  [[nodiscard]] const Operator& hamiltonian_static() const { return h0_; }
  [[nodiscard]] const std::optional<Operator>& hamiltonian_drive() const { return h1_; }
  [[nodiscard]] const std::optional<DriveProtocol>& drive() const { return drive_; }
  [[nodiscard]] const std::vector<Operator>& jumps() const { return jumps_; }
  [[nodiscard]] bool is_time_dependent() const { return drive_.has_value(); }
  [[nodiscard]] std::optional<double> period() const;

  /// Upper bound on the spectral radius of L(t) over all t: the largest
  /// spread of H(t) plus 2 Σ ||J||².
  [[nodiscard]] double generator_radius_bound() const { return radius_bound_; }

  /// Stable digest of the model matrices and drive parameters.
  [[nodiscard]] std::string hash() const;

  /// out = L(t) rho. `out` must not alias `rho`.
  void apply(const Matrix& rho, double t, Matrix& out) const;

 private:
  void validate_and_cache();

  Operator h0_;
  std::optional<Operator> h1_;
  std::optional<DriveProtocol> drive_;
  std::vector<Operator> jumps_;

  // Hot-loop caches: H_eff = H0 - (i/2) Σ J†J, stored sparse.
  SparseMatrix heff_;
  SparseMatrix heff_adj_;
  SparseMatrix h1_sparse_;
  std::vector<SparseMatrix> jump_sparse_;
  std::vector<SparseMatrix> jump_adj_sparse_;
  double radius_bound_ = 0.0;
};

Operator hamiltonian_at(const LindbladModel& model, double t);

/// -i[H(t), rho] + Σ (J rho J† - ½{J†J, rho}).
Operator apply_liouvillian(const LindbladModel& model, const Operator& rho, double t);

/// Tr[A rho].
cplx expectation(const Operator& a, const Operator& rho);

}  // namespace arnoldi_lindblad
