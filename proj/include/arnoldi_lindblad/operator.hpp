#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace arnoldi_lindblad {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Truncated bosonic Hilbert space: either the full product space of `sites`
/// modes with local cutoff n_max, or the fixed-N sector of two modes.
struct HilbertSpec {
  int sites = 1;
  int n_max = 1;
  std::optional<int> sector;  // total particle number N (two-mode only)

  static HilbertSpec full(int sites, int n_max);
  static HilbertSpec two_mode_sector(int n_total);

  [[nodiscard]] bool is_sector() const { return sector.has_value(); }
  [[nodiscard]] int local_dim() const { return n_max + 1; }
  [[nodiscard]] std::int64_t dim() const;

  bool operator==(const HilbertSpec&) const = default;
};

/// Dense complex square matrix tagged with the space it acts on.
class Operator {
 public:
  Operator() = default;
  Operator(HilbertSpec space, Matrix entries);

  static Operator zero(const HilbertSpec& space);
  static Operator identity(const HilbertSpec& space);

  [[nodiscard]] Eigen::Index dim() const { return entries_.rows(); }
  [[nodiscard]] const HilbertSpec& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return entries_; }
  [[nodiscard]] Matrix& matrix() { return entries_; }

  [[nodiscard]] Operator adjoint() const;
  [[nodiscard]] cplx trace() const { return entries_.trace(); }
  [[nodiscard]] double norm() const { return entries_.norm(); }
  [[nodiscard]] bool is_hermitian(double tol) const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  HilbertSpec space_;
  Matrix entries_;
};

/// Hermitian, unit-trace operator. Positivity is checked on demand.
class DensityMatrix {
 public:
  static constexpr double kHermiticityTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;

  explicit DensityMatrix(Operator op);

  [[nodiscard]] const Operator& op() const { return op_; }
  [[nodiscard]] double min_eigenvalue() const;
  [[nodiscard]] bool is_positive(double tol = 1e-10) const { return min_eigenvalue() >= -tol; }

 private:
  Operator op_;
};

/// Truncated annihilation operator on n_max+1 Fock levels.
Operator destroy(int n_max);

/// Single-mode annihilation operator with the space tag of one site.
inline Operator create(int n_max) { return destroy(n_max).adjoint(); }

/// I ⊗ … ⊗ local ⊗ … ⊗ I with `local` at 1-based `site`; site 1 is the
/// slowest index of the Fock basis |n_1 n_2 … n_L>.
Operator embed(const Operator& local, int site, const HilbertSpec& space);

enum class SectorOp { Hop12, Hop21, N1, N2 };

/// Two-mode operators in the basis |n, N-n>, n = 0…N.
/// Hop12 is a1†a2, Hop21 is a2†a1.
Operator sector_ladder(SectorOp kind, int n_total);

/// Hilbert-Schmidt inner product Tr[A† B].
cplx hs_inner(const Operator& a, const Operator& b);
cplx hs_inner(const Matrix& a, const Matrix& b);

DensityMatrix random_density_matrix(const HilbertSpec& space, std::uint64_t seed);

/// Row-major flattening: [[a,b],[c,d]] -> (a,b,c,d).
Vector vectorize(const Matrix& a);
Vector vectorize(const Operator& a);
Matrix devectorize(const Vector& v);
Operator devectorize(const Vector& v, const HilbertSpec& space);

void write_operator(std::ostream& out, const Operator& op);
Operator read_operator(std::istream& in);
void write_operators(const std::string& path, const std::vector<Operator>& ops);
std::vector<Operator> read_operators(const std::string& path);

}  // namespace arnoldi_lindblad
