#include "arnoldi_lindblad/operator.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

namespace arnoldi_lindblad {

static_assert(std::endian::native == std::endian::little,
              "operator binary format is little-endian");

HilbertSpec HilbertSpec::full(int sites, int n_max) {
  if (sites < 1) throw std::invalid_argument("HilbertSpec: sites must be >= 1");
  if (n_max < 1) throw std::invalid_argument("HilbertSpec: n_max must be >= 1");
  return HilbertSpec{sites, n_max, std::nullopt};
}

HilbertSpec HilbertSpec::two_mode_sector(int n_total) {
  if (n_total < 1) throw std::invalid_argument("HilbertSpec: sector N must be >= 1");
  return HilbertSpec{2, n_total, n_total};
}

std::int64_t HilbertSpec::dim() const {
  if (sector) return *sector + 1;
  std::int64_t d = 1;
  for (int i = 0; i < sites; ++i) d *= local_dim();
  return d;
}

Operator::Operator(HilbertSpec space, Matrix entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw DimensionError("Operator: entries must be square");
  if (entries_.rows() != space_.dim())
    throw DimensionError("Operator: entries do not match space dimension " +
                         std::to_string(space_.dim()));
}

Operator Operator::zero(const HilbertSpec& space) {
  const auto d = space.dim();
  return Operator(space, Matrix::Zero(d, d));
}

Operator Operator::identity(const HilbertSpec& space) {
  const auto d = space.dim();
  return Operator(space, Matrix::Identity(d, d));
}

Operator Operator::adjoint() const { return Operator(space_, entries_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).norm() < tol;
}

static void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_dim(dim(), other.dim(), "Operator +=");
  entries_ += other.entries_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_dim(dim(), other.dim(), "Operator -=");
  entries_ -= other.entries_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  entries_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_dim(a.dim(), b.dim(), "Operator *");
  return Operator(a.space(), a.matrix() * b.matrix());
}

DensityMatrix::DensityMatrix(Operator op) : op_(std::move(op)) {
  const double scale = std::max(1.0, op_.norm());
  if (!op_.is_hermitian(kHermiticityTol * scale))
    throw std::invalid_argument("DensityMatrix: operator is not Hermitian");
  if (std::abs(op_.trace() - 1.0) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(op_.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Operator destroy(int n_max) {
  if (n_max < 1) throw std::invalid_argument("destroy: n_max must be >= 1");
  Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(HilbertSpec::full(1, n_max), std::move(a));
}

Operator embed(const Operator& local, int site, const HilbertSpec& space) {
  if (space.is_sector()) throw DimensionError("embed: not defined on a particle-number sector");
  if (local.dim() != space.local_dim())
    throw DimensionError("embed: local operator has dimension " + std::to_string(local.dim()) +
                         ", expected " + std::to_string(space.local_dim()));
  if (site < 1 || site > space.sites)
    throw std::out_of_range("embed: site " + std::to_string(site) + " outside 1.." +
                            std::to_string(space.sites));
  const Eigen::Index d = space.local_dim();
  Eigen::Index left = 1;
  for (int i = 1; i < site; ++i) left *= d;
  Eigen::Index right = 1;
  for (int i = site + 1; i <= space.sites; ++i) right *= d;

  // index = (l * d + s) * right + r
  const Eigen::Index n = space.dim();
  Matrix out = Matrix::Zero(n, n);
  const Matrix& m = local.matrix();
  for (Eigen::Index l = 0; l < left; ++l)
    for (Eigen::Index si = 0; si < d; ++si)
      for (Eigen::Index sj = 0; sj < d; ++sj) {
        const cplx v = m(si, sj);
        if (v == cplx{}) continue;
        for (Eigen::Index r = 0; r < right; ++r)
          out((l * d + si) * right + r, (l * d + sj) * right + r) = v;
      }
  return Operator(space, std::move(out));
}

Operator sector_ladder(SectorOp kind, int n_total) {
  const auto space = HilbertSpec::two_mode_sector(n_total);
  Matrix m = Matrix::Zero(n_total + 1, n_total + 1);
  switch (kind) {
    case SectorOp::Hop12:
      for (int n = 0; n < n_total; ++n)
        m(n + 1, n) = std::sqrt(static_cast<double>((n + 1) * (n_total - n)));
      break;
    case SectorOp::Hop21:
      for (int n = 0; n < n_total; ++n)
        m(n, n + 1) = std::sqrt(static_cast<double>((n + 1) * (n_total - n)));
      break;
    case SectorOp::N1:
      for (int n = 0; n <= n_total; ++n) m(n, n) = n;
      break;
    case SectorOp::N2:
      for (int n = 0; n <= n_total; ++n) m(n, n) = n_total - n;
      break;
  }
  return Operator(space, std::move(m));
}

cplx hs_inner(const Matrix& a, const Matrix& b) {
  require_same_dim(a.rows(), b.rows(), "hs_inner");
  require_same_dim(a.cols(), b.cols(), "hs_inner");
  // Tr[A† B] = sum_ij conj(A_ij) B_ij
  return a.reshaped().dot(b.reshaped());
}

cplx hs_inner(const Operator& a, const Operator& b) { return hs_inner(a.matrix(), b.matrix()); }

DensityMatrix random_density_matrix(const HilbertSpec& space, std::uint64_t seed) {
  const auto d = space.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  // Fill in a fixed order so the result depends only on (dim, seed).
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx(re, im);
    }
  Matrix rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return DensityMatrix(Operator(space, std::move(rho)));
}

Vector vectorize(const Matrix& a) {
  Vector v(a.size());
  const Eigen::Index n = a.cols();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = a(i, j);
  return v;
}

Vector vectorize(const Operator& a) { return vectorize(a.matrix()); }

Matrix devectorize(const Vector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) throw DimensionError("devectorize: length is not a perfect square");
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = v(i * n + j);
  return a;
}

Operator devectorize(const Vector& v, const HilbertSpec& space) {
  return Operator(space, devectorize(v));
}

namespace {

constexpr std::array<char, 4> kOperatorMagic{'A', 'L', 'O', 'P'};
constexpr std::array<char, 4> kListMagic{'A', 'L', 'O', 'S'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("operator stream truncated");
  return value;
}

}  // namespace

// Layout: "ALOP" | u64 dim | u32 sites | u32 n_max | u8 sector flag |
// u64 sector N | dim*dim (re, im) f64 pairs, row-major.
void write_operator(std::ostream& out, const Operator& op) {
  out.write(kOperatorMagic.data(), kOperatorMagic.size());
  const auto& s = op.space();
  put<std::uint64_t>(out, static_cast<std::uint64_t>(op.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.sites));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.n_max));
  put<std::uint8_t>(out, s.is_sector() ? 1 : 0);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(s.sector.value_or(0)));
  const Matrix& m = op.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put<double>(out, m(i, j).real());
      put<double>(out, m(i, j).imag());
    }
}

Operator read_operator(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kOperatorMagic) throw std::runtime_error("not an operator record");
  const auto dim = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  HilbertSpec space;
  space.sites = static_cast<int>(get<std::uint32_t>(in));
  space.n_max = static_cast<int>(get<std::uint32_t>(in));
  const bool sector = get<std::uint8_t>(in) != 0;
  const auto n_total = get<std::uint64_t>(in);
  if (sector) space.sector = static_cast<int>(n_total);
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = get<double>(in);
      const double im = get<double>(in);
      m(i, j) = cplx(re, im);
    }
  return Operator(space, std::move(m));
}

void write_operators(const std::string& path, const std::vector<Operator>& ops) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kListMagic.data(), kListMagic.size());
  put<std::uint64_t>(out, ops.size());
  for (const auto& op : ops) write_operator(out, op);
}

std::vector<Operator> read_operators(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kListMagic) throw std::runtime_error(path + ": not an operator list");
  const auto count = get<std::uint64_t>(in);
  std::vector<Operator> ops;
  ops.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) ops.push_back(read_operator(in));
  return ops;
}

}  // namespace arnoldi_lindblad
