#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arnoldi_lindblad/propagator.hpp"

namespace arnoldi_lindblad {

/// Orthonormal snapshot basis σ_1…σ_k and the Hessenberg coefficients
/// e_{i,j} = Tr[σ_i† E σ_j]. Column j is complete once σ_j has been
/// propagated; `hessenberg` is (columns + 1) × columns.
struct KrylovBasis {
  std::vector<Operator> basis;
  Matrix hessenberg;
  double interval = 0.0;
  double reference_norm = 0.0;  // norm of the first snapshot

  [[nodiscard]] int columns() const { return static_cast<int>(hessenberg.cols()); }
  [[nodiscard]] int steps_taken() const { return columns(); }

  /// Starts a basis from a seed operator (normalized to Frobenius norm 1).
  static KrylovBasis seeded(const Operator& seed, double interval);

  /// max_{i,j} |Tr[σ_i† σ_j] - δ_ij|.
  [[nodiscard]] double orthonormality_error() const;
};

inline constexpr double kBreakdownRelTol = 1e-12;

struct OrthonormalizeResult {
  double subdiag = 0.0;
  bool appended = false;
  bool reorthogonalized = false;
  int passes = 1;
};

/// Modified Gram-Schmidt of `nu` (the image of the last basis element)
/// against the basis, run twice, plus a third pass when the second still
/// removes more than half the norm.
/// Writes the new Hessenberg column; appends nu/||nu|| unless the
/// residual norm is below kBreakdownRelTol times the first snapshot norm.
OrthonormalizeResult orthonormalize_step(KrylovBasis& basis, Operator nu);

struct RitzPair {
  cplx eps;       // eigenvalue of the evolution or Floquet map
  cplx lambda;    // generator eigenvalue ln(eps)/T
  Operator eigenmatrix;
  double residual = -1.0;   // -1 until computed
  double estimate = 0.0;    // |e_{k+1,k}| |y_k|
  bool converged = false;
  bool alias_flag = false;  // |Im lambda| close to the pi/T branch cut
};

/// Ritz pairs of the leading square Hessenberg block, sorted by |eps|
/// descending. Eigenmatrices have Frobenius norm 1.
std::vector<RitzPair> ritz_extract(const KrylovBasis& basis);

class EigensolverFailure : public std::runtime_error {
 public:
  EigensolverFailure(const std::string& what, Matrix block)
      : std::runtime_error(what), block_(std::move(block)) {}
  [[nodiscard]] const Matrix& block() const { return block_; }

 private:
  Matrix block_;
};

/// Principal-branch ln(eps)/T.
cplx eps_to_lambda(cplx eps, double interval);
bool is_aliased(cplx eps);

struct ResidualOptions {
  IntegratorConfig integrator;
  unsigned threads = 0;
  double prefilter_factor = 10.0;
};

/// residual_j = ||E ρ_j - eps_j ρ_j||_F by one propagation per pair; pairs
/// whose Arnoldi estimate already exceeds prefilter_factor × tol keep the
/// estimate as their residual and are marked unconverged.
void residual_check(const LindbladModel& model, std::vector<RitzPair>& pairs, double interval,
                    double tol, const ResidualOptions& opts = {});

enum class Termination { Converged, HappyBreakdown, MaxIterations };
std::string to_string(Termination t);

struct ArnoldiOptions {
  int m = 1;
  double tol = 1e-3;
  int check_every = 10;
  int max_iter = 2000;
  IntegratorConfig integrator;
  unsigned threads = 0;
  bool keep_basis = false;
};

struct SpectralResult {
  std::vector<RitzPair> pairs;  // sorted by |eps| descending
  int iterations = 0;
  double wall_time = 0.0;
  double interval = 0.0;
  double tol = 0.0;
  int m = 0;
  std::string model_hash;
  Termination termination = Termination::MaxIterations;
  double orthonormality_error = 0.0;
  std::optional<KrylovBasis> basis;

  [[nodiscard]] double simulated_time() const { return iterations * interval; }
  [[nodiscard]] int converged_count() const;
};

/// Arnoldi iteration on the snapshot map E = exp(L T) (or the one-period
/// Floquet map), built by propagating each new basis element for T.
SpectralResult arnoldi_lindblad(const LindbladModel& model, const Operator& rho0, double interval,
                                const ArnoldiOptions& opts);

class SteadyStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hermitized, unit-trace eigenmatrix of the converged pair closest to eps = 1.
/// Throws if its smallest eigenvalue is below -psd_tol; pass infinity to
/// get the raw estimate of a loosely converged run.
DensityMatrix steady_state_extract(const SpectralResult& result, double psd_tol = 1e-6);

/// Number of converged pairs with |eps - 1| < tol.
int unit_eigenvalue_multiplicity(const SpectralResult& result, double tol);

/// Alternative convergence indicator: |Tr[ρ† L ρ]|² and |Tr[ρ† L² ρ]|,
/// reported separately along with the absolute difference.
struct TraceIndicator {
  double first_moment_sq = 0.0;
  double second_moment = 0.0;
  double difference = 0.0;
};
TraceIndicator trace_indicator(const LindbladModel& model, const Operator& eigenmatrix);

nlohmann::json to_json(const SpectralResult& result, const std::string& source = "arnoldi-lindblad");

}  // namespace arnoldi_lindblad
