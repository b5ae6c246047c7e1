#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arnoldi_lindblad/krylov.hpp"

namespace arnoldi_lindblad {

/// Hilbert dimension above which dense superoperators are refused.
inline constexpr Eigen::Index kOracleDimGuard = 256;

class SizeGuardError : public std::length_error {
 public:
  SizeGuardError(Eigen::Index dim, Eigen::Index limit);
  [[nodiscard]] Eigen::Index dim() const { return dim_; }

 private:
  Eigen::Index dim_;
};

enum class SuperopSource { Liouvillian, FloquetMap };
std::string to_string(SuperopSource s);

/// Dense dim² × dim² superoperator acting on row-major vectorized operators.
struct SuperoperatorMatrix {
  static constexpr const char* kConvention = "row-major";

  Matrix data;
  HilbertSpec space;
  SuperopSource source = SuperopSource::Liouvillian;
  double time = 0.0;    // evaluation time of L(t)
  double period = 0.0;  // one-period map only

  [[nodiscard]] Matrix apply(const Matrix& rho) const;
};

struct OracleGuard {
  Eigen::Index max_dim = kOracleDimGuard;
};

/// -i(H⊗I - I⊗Hᵀ) + Σ [J⊗conj(J) - ½(J†J⊗I + I⊗(J†J)ᵀ)].
SuperoperatorMatrix build_liouvillian_matrix(const LindbladModel& model, double t = 0.0,
                                             const OracleGuard& guard = {});

/// One-period map in action form: column i·d + j holds vec(F(|i⟩⟨j|)).
/// The row-stacked matrix of the basis-evolution construction is its
/// transpose. Trajectories run in parallel.
SuperoperatorMatrix floquet_map_matrix(const LindbladModel& model, const IntegratorConfig& cfg = {},
                                       unsigned threads = 0, const OracleGuard& guard = {});

struct ExactSpectrum {
  SuperopSource source = SuperopSource::Liouvillian;
  HilbertSpec space;
  Vector values;
  std::vector<Operator> eigenmatrices;  // empty when vectors were not requested
  int steady_index = -1;
  double spectral_scale = 0.0;  // max |value|
};

/// Dense eigendecomposition (LAPACK zgeev). Liouvillian spectra are sorted
/// by |Re λ| ascending, map spectra by |φ| descending; ties by Im descending.
ExactSpectrum exact_spectrum(const SuperoperatorMatrix& mat, bool vectors = true);

/// Same result, diagonalizing the even and odd blocks of the superoperator
/// under the conjugation ρ ↦ PρP for a Hilbert-space permutation P that
/// commutes with the model. Throws if the symmetry does not hold.
ExactSpectrum exact_spectrum_symmetric(const SuperoperatorMatrix& mat,
                                       const std::vector<Eigen::Index>& hilbert_perm,
                                       bool vectors = true);

/// Raw zgeev wrapper; `vectors` receives right eigenvectors column-wise.
Vector dense_eigen(Matrix a, Matrix* vectors);

using LinearMap = std::function<void(const Vector& in, Vector& out)>;

struct GenericArnoldiOptions {
  int m = 1;
  double tol = 1e-10;
  int max_iter = 500;
  int check_every = 1;
};

struct GenericRitzPair {
  cplx value;
  Vector vector;  // unit 2-norm
  double residual = -1.0;
  bool converged = false;
};

struct GenericArnoldiResult {
  std::vector<GenericRitzPair> pairs;  // sorted by |value| descending
  int iterations = 0;
  Termination termination = Termination::MaxIterations;
};

/// Plain Arnoldi on a black-box map with true residuals ||A v - θ v||.
GenericArnoldiResult generic_arnoldi(const LinearMap& apply, const Vector& v0,
                                     const GenericArnoldiOptions& opts = {});

struct ShiftBound {
  double mu = 0.0;
  double ratio = 0.0;  // max_{j≠0} |λ_j| / mu
};

/// mu = max_{j≠0} |λ_j|² / (-2 Re λ_j); the steady eigenvalue is the one of
/// smallest modulus.
ShiftBound shift_bound(const Vector& spectrum);

/// exp(A) for small dense matrices (scaling and squaring).
Matrix expm_dense(const Matrix& a, Eigen::Index max_size = kOracleDimGuard * kOracleDimGuard);

/// exp(t A) v by scaled Taylor steps, without forming the exponential.
Vector expm_action(const Matrix& a, double t, const Vector& v);

struct ExpFitResult {
  double steady = 0.0;
  cplx amplitude;  // b - i c in the oscillatory model
  cplx rate;       // a + i omega
  double residual = 0.0;
  bool oscillatory = false;
  bool converged = false;
};

/// Least-squares fit of y(t) = ss + c e^{λ t} over the samples with
/// t >= window_start, falling back to ss + e^{at}(b cos ωt + c sin ωt) when
/// the exponential leaves more than ten times the estimated noise floor.
ExpFitResult exp_fit_extrapolate(const std::vector<double>& t, const std::vector<cplx>& y,
                                 double window_start = -std::numeric_limits<double>::infinity());

struct EigenMatch {
  int index_a;
  int index_b;
  double distance;
};

/// Greedy nearest-neighbour matching of each entry of `a` into `b`.
std::vector<EigenMatch> match_eigenvalues(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// 1 - |Tr[A† B]| / (||A|| ||B||).
double overlap_deficit(const Matrix& a, const Matrix& b);

/// Same schema as the Arnoldi export; `interval` maps λ ↔ ε.
nlohmann::json to_json(const ExactSpectrum& spec, double interval, int count, const std::string& model_hash);

}  // namespace arnoldi_lindblad
