#include "arnoldi_lindblad/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <unsupported/Eigen/NonLinearOptimization>

#include "arnoldi_lindblad/parallel.hpp"

namespace arnoldi_lindblad {

SizeGuardError::SizeGuardError(Eigen::Index dim, Eigen::Index limit)
    : std::length_error("Hilbert dimension " + std::to_string(dim) +
                        " exceeds the dense-superoperator guard of " + std::to_string(limit)),
      dim_(dim) {}

std::string to_string(SuperopSource s) {
  return s == SuperopSource::Liouvillian ? "liouvillian" : "floquet_map";
}

Matrix SuperoperatorMatrix::apply(const Matrix& rho) const {
  if (rho.rows() * rho.cols() != data.cols())
    throw DimensionError("SuperoperatorMatrix::apply: operator dimension mismatch");
  return devectorize(Vector(data * vectorize(rho)));
}

namespace {

void check_guard(const LindbladModel& model, const OracleGuard& guard) {
  if (model.dim() > guard.max_dim) throw SizeGuardError(model.dim(), guard.max_dim);
}

}  // namespace

SuperoperatorMatrix build_liouvillian_matrix(const LindbladModel& model, double t,
                                             const OracleGuard& guard) {
  check_guard(model, guard);
  const Eigen::Index d = model.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix h = hamiltonian_at(model, t).matrix();

  Matrix l = cplx(0.0, -1.0) * (Matrix(Eigen::kroneckerProduct(h, id)) -
                                Matrix(Eigen::kroneckerProduct(id, h.transpose())));
  for (const auto& jump : model.jumps()) {
    const Matrix& j = jump.matrix();
    const Matrix k = j.adjoint() * j;
    l += Eigen::kroneckerProduct(j, j.conjugate());
    l -= 0.5 * (Matrix(Eigen::kroneckerProduct(k, id)) +
                Matrix(Eigen::kroneckerProduct(id, k.transpose())));
  }
  SuperoperatorMatrix out;
  out.data = std::move(l);
  out.space = model.space();
  out.source = SuperopSource::Liouvillian;
  out.time = t;
  return out;
}

SuperoperatorMatrix floquet_map_matrix(const LindbladModel& model, const IntegratorConfig& cfg,
                                       unsigned threads, const OracleGuard& guard) {
  const auto period = model.period();
  if (!period) throw std::invalid_argument("floquet_map_matrix: model has no drive period");
  check_guard(model, guard);
  const Eigen::Index d = model.dim();
  SuperoperatorMatrix out;
  out.data = Matrix::Zero(d * d, d * d);
  out.space = model.space();
  out.source = SuperopSource::FloquetMap;
  out.period = *period;
  parallel_for(static_cast<std::size_t>(d * d), threads, [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx) / d;
    const auto j = static_cast<Eigen::Index>(idx) % d;
    Matrix basis = Matrix::Zero(d, d);
    basis(i, j) = 1.0;
    out.data.col(static_cast<Eigen::Index>(idx)) =
        vectorize(propagate(model, basis, 0.0, *period, cfg));
  });
  return out;
}

Vector dense_eigen(Matrix a, Matrix* vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw DimensionError("dense_eigen: matrix must be square");
  Vector w(n);
  Matrix vl(1, 1);
  Matrix vr;
  if (vectors) vr.resize(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a.data(), n, w.data(),
                    vl.data(), 1, vectors ? vr.data() : vl.data(), vectors ? n : 1);
  if (info != 0)
    throw std::runtime_error("dense_eigen: zgeev failed with info " + std::to_string(info));
  if (vectors) *vectors = std::move(vr);
  return w;
}

namespace {

std::vector<int> sorted_order(const Vector& values, SuperopSource source) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const cplx x = values(a), y = values(b);
    const double kx = source == SuperopSource::Liouvillian ? std::abs(x.real()) : -std::abs(x);
    const double ky = source == SuperopSource::Liouvillian ? std::abs(y.real()) : -std::abs(y);
    if (kx != ky) return kx < ky;
    return x.imag() > y.imag();
  });
  return order;
}

ExactSpectrum assemble(const SuperoperatorMatrix& mat, const Vector& values, const Matrix* vecs) {
  ExactSpectrum spec;
  spec.source = mat.source;
  spec.space = mat.space;
  const auto order = sorted_order(values, mat.source);
  spec.values.resize(values.size());
  for (std::size_t k = 0; k < order.size(); ++k) spec.values(k) = values(order[k]);
  spec.spectral_scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  if (vecs) {
    spec.eigenmatrices.reserve(order.size());
    for (int idx : order) {
      Vector v = vecs->col(idx);
      v.normalize();
      spec.eigenmatrices.push_back(devectorize(v, mat.space));
    }
  }
  if (spec.values.size() == 0) return spec;
  if (mat.source == SuperopSource::Liouvillian) {
    Eigen::Index best = 0;
    spec.values.cwiseAbs().minCoeff(&best);
    if (std::abs(spec.values(best)) < 1e-10 * std::max(spec.spectral_scale, 1.0))
      spec.steady_index = static_cast<int>(best);
  } else {
    Eigen::Index best = 0;
    (spec.values.array() - cplx(1.0)).abs().minCoeff(&best);
    // A map assembled by integration is accurate only to the integrator error.
    if (std::abs(spec.values(best) - 1.0) < 1e-6) spec.steady_index = static_cast<int>(best);
  }
  return spec;
}

}  // namespace

ExactSpectrum exact_spectrum(const SuperoperatorMatrix& mat, bool vectors) {
  Matrix vecs;
  const Vector values = dense_eigen(mat.data, vectors ? &vecs : nullptr);
  return assemble(mat, values, vectors ? &vecs : nullptr);
}

ExactSpectrum exact_spectrum_symmetric(const SuperoperatorMatrix& mat,
                                       const std::vector<Eigen::Index>& hilbert_perm,
                                       bool vectors) {
  const Eigen::Index d = mat.space.dim();
  const Eigen::Index n = d * d;
  if (static_cast<Eigen::Index>(hilbert_perm.size()) != d)
    throw DimensionError("exact_spectrum_symmetric: permutation size mismatch");
  std::vector<Eigen::Index> sigma(n);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) sigma[i * d + j] = hilbert_perm[i] * d + hilbert_perm[j];
  for (Eigen::Index a = 0; a < n; ++a)
    if (sigma[sigma[a]] != a)
      throw std::invalid_argument("exact_spectrum_symmetric: permutation is not an involution");

  double asym = 0.0;
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < n; ++a)
      asym = std::max(asym, std::abs(mat.data(sigma[a], sigma[b]) - mat.data(a, b)));
  const double scale = mat.data.cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0))
    throw std::invalid_argument("exact_spectrum_symmetric: superoperator does not commute with "
                                "the permutation");

  // Columns of the even / odd orthonormal bases: up to two support indices.
  struct Col {
    Eigen::Index a, b;
    double ca, cb;
  };
  std::vector<Col> even, odd;
  const double r = std::sqrt(0.5);
  for (Eigen::Index a = 0; a < n; ++a) {
    if (sigma[a] == a) {
      even.push_back({a, -1, 1.0, 0.0});
    } else if (a < sigma[a]) {
      even.push_back({a, sigma[a], r, r});
      odd.push_back({a, sigma[a], r, -r});
    }
  }

  std::vector<cplx> all_values;
  std::vector<Vector> all_vectors;
  for (const auto* cols : {&even, &odd}) {
    const auto k = static_cast<Eigen::Index>(cols->size());
    if (k == 0) continue;
    Matrix lq(n, k);
    for (Eigen::Index q = 0; q < k; ++q) {
      const Col& c = (*cols)[q];
      lq.col(q) = c.ca * mat.data.col(c.a);
      if (c.b >= 0) lq.col(q) += c.cb * mat.data.col(c.b);
    }
    Matrix block(k, k);
    for (Eigen::Index p = 0; p < k; ++p) {
      const Col& c = (*cols)[p];
      block.row(p) = c.ca * lq.row(c.a);
      if (c.b >= 0) block.row(p) += c.cb * lq.row(c.b);
    }
    lq.resize(0, 0);
    Matrix y;
    const Vector w = dense_eigen(std::move(block), vectors ? &y : nullptr);
    for (Eigen::Index j = 0; j < k; ++j) {
      all_values.push_back(w(j));
      if (!vectors) continue;
      Vector v = Vector::Zero(n);
      for (Eigen::Index q = 0; q < k; ++q) {
        const Col& c = (*cols)[q];
        v(c.a) += c.ca * y(q, j);
        if (c.b >= 0) v(c.b) += c.cb * y(q, j);
      }
      all_vectors.push_back(std::move(v));
    }
  }
  const Vector values = Eigen::Map<const Vector>(all_values.data(), all_values.size());
  if (!vectors) return assemble(mat, values, nullptr);
  Matrix vecs(n, static_cast<Eigen::Index>(all_vectors.size()));
  for (std::size_t j = 0; j < all_vectors.size(); ++j) vecs.col(j) = all_vectors[j];
  return assemble(mat, values, &vecs);
}

GenericArnoldiResult generic_arnoldi(const LinearMap& apply, const Vector& v0,
                                     const GenericArnoldiOptions& opts) {
  if (opts.m < 1 || opts.max_iter < 1 || opts.check_every < 1 || !(opts.tol > 0.0))
    throw std::invalid_argument("generic_arnoldi: invalid options");
  const double n0 = v0.norm();
  if (!(n0 > 0.0)) throw std::invalid_argument("generic_arnoldi: zero start vector");

  std::vector<Vector> basis{v0 / n0};
  Matrix h = Matrix::Zero(1, 0);
  double reference = -1.0;
  GenericArnoldiResult result;
  Vector w(v0.size());

  auto extract = [&](int k) {
    Eigen::ComplexEigenSolver<Matrix> es(h.topLeftCorner(k, k), true);
    if (es.info() != Eigen::Success)
      throw EigensolverFailure("generic_arnoldi: Hessenberg eigensolve failed", h.topLeftCorner(k, k));
    std::vector<GenericRitzPair> pairs;
    for (int j = 0; j < k; ++j) {
      GenericRitzPair p;
      p.value = es.eigenvalues()(j);
      Vector x = Vector::Zero(v0.size());
      for (int i = 0; i < k; ++i) x += es.eigenvectors()(i, j) * basis[i];
      p.vector = x.normalized();
      pairs.push_back(std::move(p));
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      const double ma = std::abs(a.value), mb = std::abs(b.value);
      if (ma != mb) return ma > mb;
      return a.value.imag() > b.value.imag();
    });
    bool all = pairs.size() >= static_cast<std::size_t>(opts.m);
    Vector image(v0.size());
    for (std::size_t j = 0; j < std::min<std::size_t>(opts.m, pairs.size()); ++j) {
      apply(pairs[j].vector, image);
      pairs[j].residual = (image - pairs[j].value * pairs[j].vector).norm();
      pairs[j].converged = pairs[j].residual < opts.tol;
      all = all && pairs[j].converged;
    }
    result.pairs = std::move(pairs);
    return all;
  };

  for (int it = 1; it <= opts.max_iter; ++it) {
    const auto k = static_cast<Eigen::Index>(basis.size());
    apply(basis.back(), w);
    if (reference < 0.0) reference = w.norm();
    Vector coeff = Vector::Zero(k);
    const double before = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const cplx c = basis[j].dot(w);
        coeff(j) += c;
        w -= c * basis[j];
      }
      if (w.norm() >= 0.5 * before) break;
    }
    const double sub = w.norm();
    h.conservativeResize(k + 1, k);
    h.row(k).setZero();
    h.col(k - 1).head(k) = coeff;
    h(k, k - 1) = sub;
    result.iterations = it;
    const bool breakdown = sub <= 1e-12 * reference;
    if (!breakdown) basis.push_back(w / sub);
    if (breakdown || it % opts.check_every == 0 || it == opts.max_iter) {
      if (extract(static_cast<int>(k))) {
        result.termination = Termination::Converged;
        return result;
      }
      if (breakdown) {
        result.termination = Termination::HappyBreakdown;
        return result;
      }
    }
  }
  result.termination = Termination::MaxIterations;
  return result;
}

ShiftBound shift_bound(const Vector& spectrum) {
  if (spectrum.size() < 2) throw std::invalid_argument("shift_bound: need at least two eigenvalues");
  if (spectrum.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("shift_bound: spectrum is identically zero");
  Eigen::Index steady = 0;
  spectrum.cwiseAbs().minCoeff(&steady);
  ShiftBound out;
  double largest = 0.0;
  for (Eigen::Index j = 0; j < spectrum.size(); ++j) {
    if (j == steady) continue;
    const cplx l = spectrum(j);
    largest = std::max(largest, std::abs(l));
    const double bound = l.real() < 0.0 ? std::norm(l) / (-2.0 * l.real())
                                        : std::numeric_limits<double>::infinity();
    out.mu = std::max(out.mu, bound);
  }
  out.ratio = largest / out.mu;
  return out;
}

Matrix expm_dense(const Matrix& a, Eigen::Index max_size) {
  if (a.rows() != a.cols()) throw DimensionError("expm_dense: matrix must be square");
  if (a.rows() > max_size) throw SizeGuardError(a.rows(), max_size);
  return a.exp();
}

Vector expm_action(const Matrix& a, double t, const Vector& v) {
  if (a.rows() != a.cols() || a.cols() != v.size()) throw DimensionError("expm_action: size mismatch");
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff() * std::abs(t);
  const int steps = std::max(1, static_cast<int>(std::ceil(norm1)));
  const double h = t / steps;
  Vector out = v;
  for (int s = 0; s < steps; ++s) {
    Vector term = out;
    for (int k = 1; k < 100; ++k) {
      term = (h / k) * (a * term);
      out += term;
      if (term.norm() <= 1e-17 * out.norm()) break;
    }
  }
  return out;
}

namespace {

// Eigen's MINPACK-style LM expects these typedefs and size queries.
struct FitFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Eigen::VectorXd& t;
  const Eigen::VectorXd& y;
  bool oscillatory;

  [[nodiscard]] int inputs() const { return oscillatory ? 5 : 3; }
  [[nodiscard]] int values() const { return static_cast<int>(t.size()); }

  // exp: x = (ss, c, lambda); oscillatory: x = (ss, a, b, c, omega)
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    for (Eigen::Index i = 0; i < t.size(); ++i) f(i) = model(x, t(i)) - y(i);
    return 0;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double ti = t(i);
      if (!oscillatory) {
        const double e = std::exp(x(2) * ti);
        jac.row(i) << 1.0, e, x(1) * ti * e;
      } else {
        const double e = std::exp(x(1) * ti), c = std::cos(x(4) * ti), s = std::sin(x(4) * ti);
        const double osc = x(2) * c + x(3) * s;
        jac.row(i) << 1.0, ti * e * osc, e * c, e * s, e * ti * (-x(2) * s + x(3) * c);
      }
    }
    return 0;
  }
  [[nodiscard]] double model(const Eigen::VectorXd& x, double ti) const {
    if (!oscillatory) return x(0) + x(1) * std::exp(x(2) * ti);
    return x(0) + std::exp(x(1) * ti) * (x(2) * std::cos(x(4) * ti) + x(3) * std::sin(x(4) * ti));
  }
};

/// Linear least squares for the amplitudes at fixed nonlinear parameters;
/// returns the residual 2-norm and writes the linear coefficients.
double project(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y, Eigen::VectorXd& coef) {
  coef = basis.colPivHouseholderQr().solve(y);
  return (basis * coef - y).norm();
}

struct LmOutcome {
  Eigen::VectorXd x;
  double residual;
  bool converged;
};

LmOutcome refine(FitFunctor f, Eigen::VectorXd x) {
  Eigen::LevenbergMarquardt<FitFunctor> lm(f);
  lm.parameters.xtol = 1e-15;
  lm.parameters.ftol = 1e-15;
  lm.parameters.maxfev = 4000;
  const auto status = lm.minimize(x);
  Eigen::VectorXd r(f.values());
  f(x, r);
  const bool ok = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;
  return {x, r.norm(), ok && x.allFinite()};
}

}  // namespace

ExpFitResult exp_fit_extrapolate(const std::vector<double>& t, const std::vector<cplx>& y,
                                 double window_start) {
  if (t.size() != y.size()) throw DimensionError("exp_fit_extrapolate: length mismatch");
  std::vector<double> tw, yw;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window_start) continue;
    if (std::abs(y[i].imag()) >= 1e-10)
      throw std::invalid_argument("exp_fit_extrapolate: series has a non-negligible imaginary part");
    tw.push_back(t[i]);
    yw.push_back(y[i].real());
  }
  if (tw.size() < 9)
    throw std::invalid_argument("exp_fit_extrapolate: need at least 9 samples in the window");
  const auto n = static_cast<Eigen::Index>(tw.size());
  // Shift time to the window start so amplitudes stay O(1).
  const double t0 = tw.front();
  Eigen::VectorXd ts(n), ys(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ts(i) = tw[i] - t0;
    ys(i) = yw[i];
  }
  const double span = std::max(ts(n - 1), 1e-300);
  const double yscale = std::max(ys.cwiseAbs().maxCoeff(), 1e-300);

  // Noise floor from third differences, which annihilate smooth trends.
  double noise = 0.0;
  for (Eigen::Index i = 3; i < n; ++i) {
    const double d3 = ys(i) - 3 * ys(i - 1) + 3 * ys(i - 2) - ys(i - 3);
    noise += d3 * d3;
  }
  noise = std::sqrt(noise / std::max<Eigen::Index>(n - 3, 1) / 20.0);
  const double floor = std::max(noise, 1e-14 * yscale) * std::sqrt(static_cast<double>(n));

  // Grid over the decay rate, linear amplitudes solved exactly.
  Eigen::VectorXd best_x(3);
  double best_res = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd basis(n, 2);
  Eigen::VectorXd coef;
  for (int g = 0; g <= 120; ++g) {
    const double rate = -std::pow(10.0, -3.0 + 6.0 * g / 120.0) / span;
    basis.col(0).setOnes();
    basis.col(1) = (rate * ts.array()).exp().matrix();
    const double res = project(basis, ys, coef);
    if (res < best_res) {
      best_res = res;
      best_x << coef(0), coef(1), rate;
    }
  }
  FitFunctor fexp{ts, ys, false};
  const LmOutcome e = refine(fexp, best_x);

  ExpFitResult out;
  out.steady = e.x(0);
  out.amplitude = e.x(1) * std::exp(-e.x(2) * t0);
  out.rate = e.x(2);
  out.residual = e.residual;
  out.converged = e.converged && e.x(2) < 0.0;
  if (e.residual <= 10.0 * floor || n < 15) return out;

  Eigen::VectorXd best_o(5);
  double best_ores = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd obasis(n, 3);
  const double dt = span / static_cast<double>(n - 1);
  for (int ga = 0; ga <= 40; ++ga) {
    const double a = -std::pow(10.0, -3.0 + 5.0 * ga / 40.0) / span;
    for (int gw = 1; gw <= 400; ++gw) {
      const double w = (std::numbers::pi / dt) * gw / 400.0;
      const Eigen::ArrayXd e_at = (a * ts.array()).exp();
      obasis.col(0).setOnes();
      obasis.col(1) = (e_at * (w * ts.array()).cos()).matrix();
      obasis.col(2) = (e_at * (w * ts.array()).sin()).matrix();
      const double res = project(obasis, ys, coef);
      if (res < best_ores) {
        best_ores = res;
        best_o << coef(0), a, coef(1), coef(2), w;
      }
    }
  }
  FitFunctor fosc{ts, ys, true};
  const LmOutcome o = refine(fosc, best_o);
  if (!(o.residual < e.residual)) return out;

  out.oscillatory = true;
  out.steady = o.x(0);
  // Undo the time shift: e^{λ(t - t0)} (b - i c) = e^{λ t} [e^{-λ t0} (b - i c)].
  const cplx lambda(o.x(1), o.x(4));
  out.rate = lambda;
  out.amplitude = cplx(o.x(2), -o.x(3)) * std::exp(-lambda * t0);
  out.residual = o.residual;
  out.converged = o.converged && o.x(1) < 0.0;
  return out;
}

std::vector<EigenMatch> match_eigenvalues(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<bool> used(b.size(), false);
  std::vector<EigenMatch> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(a[i] - b[j]);
      if (d < dist) {
        dist = d;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) break;
    used[best] = true;
    out.push_back({static_cast<int>(i), best, dist});
  }
  return out;
}

double overlap_deficit(const Matrix& a, const Matrix& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("overlap_deficit: zero operator");
  return 1.0 - std::abs(hs_inner(a, b)) / (na * nb);
}

nlohmann::json to_json(const ExactSpectrum& spec, double interval, int count,
                       const std::string& model_hash) {
  if (!(interval > 0.0)) throw std::invalid_argument("to_json: interval must be > 0");
  nlohmann::json pairs = nlohmann::json::array();
  const auto total = static_cast<int>(spec.values.size());
  for (int j = 0; j < std::min(count, total); ++j) {
    const cplx v = spec.values(j);
    cplx eps, lambda;
    if (spec.source == SuperopSource::Liouvillian) {
      lambda = v;
      eps = std::exp(v * interval);
    } else {
      eps = v;
      lambda = std::abs(v) > 0.0 ? eps_to_lambda(v, interval)
                                 : cplx(-std::numeric_limits<double>::infinity(), 0.0);
    }
    pairs.push_back({{"re_eps", eps.real()},
                     {"im_eps", eps.imag()},
                     {"re_lambda", lambda.real()},
                     {"im_lambda", lambda.imag()},
                     {"residual", 0.0},
                     {"converged", true},
                     {"alias_flag", is_aliased(eps)}});
  }
  return {{"source", "oracle"},
          {"model_hash", model_hash},
          {"T", interval},
          {"superoperator", to_string(spec.source)},
          {"convention", SuperoperatorMatrix::kConvention},
          {"steady_index", spec.steady_index},
          {"dimension", total},
          {"pairs", std::move(pairs)}};
}

}  // namespace arnoldi_lindblad
