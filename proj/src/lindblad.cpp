#include "arnoldi_lindblad/lindblad.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

namespace arnoldi_lindblad {

double DriveProtocol::at(double t) const { return f0 + f1 * std::cos(omega * t); }

double DriveProtocol::period() const { return 2.0 * std::numbers::pi / omega; }

namespace {

constexpr double kHermiticityTol = 1e-12;

SparseMatrix to_sparse(const Matrix& m) {
  return m.sparseView(cplx(0.0), 0.0);
}

double spread(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

std::vector<Operator> fold_rates(std::vector<JumpTerm> jumps) {
  std::vector<Operator> folded;
  for (auto& j : jumps) {
    if (!(j.rate >= 0.0)) throw std::invalid_argument("LindbladModel: negative jump rate");
    folded.push_back(std::sqrt(j.rate) * std::move(j.op));
  }
  return folded;
}

}  // namespace

LindbladModel::LindbladModel(Operator h0, std::vector<JumpTerm> jumps)
    : h0_(std::move(h0)), jumps_(fold_rates(std::move(jumps))) {
  validate_and_cache();
}

LindbladModel::LindbladModel(Operator h0, Operator h1, DriveProtocol drive,
                             std::vector<JumpTerm> jumps)
    : h0_(std::move(h0)), h1_(std::move(h1)), drive_(drive),
      jumps_(fold_rates(std::move(jumps))) {
  if (!(drive.omega > 0.0)) throw std::invalid_argument("LindbladModel: drive omega must be > 0");
  validate_and_cache();
}

std::optional<double> LindbladModel::period() const {
  if (!drive_) return std::nullopt;
  return drive_->period();
}

void LindbladModel::validate_and_cache() {
  const auto check_herm = [](const Operator& h, const char* name) {
    if (!h.is_hermitian(kHermiticityTol * std::max(1.0, h.norm())))
      throw std::invalid_argument(std::string("LindbladModel: ") + name + " is not Hermitian");
  };
  check_herm(h0_, "H0");
  if (h1_) {
    check_herm(*h1_, "H1");
    if (h1_->dim() != dim()) throw DimensionError("LindbladModel: H1 dimension mismatch");
  }
  for (const auto& j : jumps_)
    if (j.dim() != dim()) throw DimensionError("LindbladModel: jump dimension mismatch");

  Matrix heff = h0_.matrix();
  jump_sparse_.clear();
  jump_adj_sparse_.clear();
  double dissipative_bound = 0.0;
  for (const auto& j : jumps_) {
    Matrix jdj = j.matrix().adjoint() * j.matrix();
    heff -= cplx(0.0, 0.5) * jdj;
    jump_sparse_.push_back(to_sparse(j.matrix()));
    jump_adj_sparse_.push_back(to_sparse(j.matrix().adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(jdj, Eigen::EigenvaluesOnly);
    dissipative_bound += 2.0 * es.eigenvalues().maxCoeff();
  }
  heff_ = to_sparse(heff);
  heff_adj_ = to_sparse(heff.adjoint());

  // spread(H0 + f H1) is convex in f, so its maximum over the drive range
  // sits at one of the two extremes.
  double coherent_bound = 0.0;
  if (h1_) {
    h1_sparse_ = to_sparse(h1_->matrix());
    const double lo = drive_->f0 - std::abs(drive_->f1);
    const double hi = drive_->f0 + std::abs(drive_->f1);
    coherent_bound = std::max(spread(h0_.matrix() + lo * h1_->matrix()),
                              spread(h0_.matrix() + hi * h1_->matrix()));
  } else {
    coherent_bound = spread(h0_.matrix());
  }
  radius_bound_ = coherent_bound + dissipative_bound;
}

std::string LindbladModel::hash() const {
  std::ostringstream raw;
  const auto dump = [&raw](const Matrix& m) {
    raw.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(cplx)));
  };
  dump(h0_.matrix());
  if (h1_) dump(h1_->matrix());
  for (const auto& j : jumps_) dump(j.matrix());
  if (drive_) {
    raw.write(reinterpret_cast<const char*>(&drive_->f0), sizeof(double));
    raw.write(reinterpret_cast<const char*>(&drive_->f1), sizeof(double));
    raw.write(reinterpret_cast<const char*>(&drive_->omega), sizeof(double));
  }
  // FNV-1a, 64 bit: stable across runs and standard libraries.
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : raw.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

void LindbladModel::apply(const Matrix& rho, double t, Matrix& out) const {
  const cplx i(0.0, 1.0);
  out.noalias() = -i * (heff_ * rho);
  out.noalias() += i * (rho * heff_adj_);
  if (h1_) {
    const double f = drive_->at(t);
    if (f != 0.0) {
      out.noalias() += (-i * f) * (h1_sparse_ * rho);
      out.noalias() += (i * f) * (rho * h1_sparse_);
    }
  }
  for (std::size_t k = 0; k < jump_sparse_.size(); ++k) {
    const Matrix jr = jump_sparse_[k] * rho;
    out.noalias() += jr * jump_adj_sparse_[k];
  }
}

Operator hamiltonian_at(const LindbladModel& model, double t) {
  if (!model.is_time_dependent()) return model.hamiltonian_static();
  const double f = model.drive()->at(t);
  return model.hamiltonian_static() + cplx(f) * *model.hamiltonian_drive();
}

Operator apply_liouvillian(const LindbladModel& model, const Operator& rho, double t) {
  if (rho.dim() != model.dim())
    throw DimensionError("apply_liouvillian: operator dimension " + std::to_string(rho.dim()) +
                         " does not match model dimension " + std::to_string(model.dim()));
  Matrix out(rho.dim(), rho.dim());
  model.apply(rho.matrix(), t, out);
  return Operator(rho.space(), std::move(out));
}

cplx expectation(const Operator& a, const Operator& rho) {
  if (a.dim() != rho.dim()) throw DimensionError("expectation: dimension mismatch");
  // Tr[A rho] = sum_ij A_ij rho_ji
  return (a.matrix().transpose().cwiseProduct(rho.matrix())).sum();
}

}  // namespace arnoldi_lindblad
