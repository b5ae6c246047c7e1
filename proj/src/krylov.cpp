#include "arnoldi_lindblad/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "arnoldi_lindblad/parallel.hpp"

namespace arnoldi_lindblad {

KrylovBasis KrylovBasis::seeded(const Operator& seed, double interval) {
  const double n = seed.norm();
  if (!(n > 0.0)) throw std::invalid_argument("KrylovBasis: seed operator has zero norm");
  KrylovBasis b;
  b.basis.push_back(cplx(1.0 / n) * seed);
  b.hessenberg = Matrix::Zero(1, 0);
  b.interval = interval;
  return b;
}

double KrylovBasis::orthonormality_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      const cplx g = hs_inner(basis[i], basis[j]);
      worst = std::max(worst, std::abs(g - (i == j ? cplx(1.0) : cplx(0.0))));
    }
  return worst;
}

OrthonormalizeResult orthonormalize_step(KrylovBasis& kb, Operator nu) {
  if (kb.basis.empty()) throw std::invalid_argument("orthonormalize_step: empty basis");
  if (nu.dim() != kb.basis.front().dim())
    throw DimensionError("orthonormalize_step: operator dimension mismatch");

  const int col = kb.columns();
  const auto k = static_cast<Eigen::Index>(kb.basis.size());
  if (col != k - 1)
    throw std::logic_error("orthonormalize_step: basis already has a pending column");

  const double input_norm = nu.norm();
  if (kb.reference_norm == 0.0) kb.reference_norm = input_norm;

  // Two MGS passes always; MGS-Arnoldi alone loses orthogonality
  // geometrically once Ritz vectors start to converge, without the norm ever
  // dropping by half. A third pass only when the second one still cancels.
  Vector coeffs = Vector::Zero(k);
  Matrix& v = nu.matrix();
  const auto pass = [&] {
    for (Eigen::Index j = 0; j < k; ++j) {
      const cplx c = hs_inner(kb.basis[j].matrix(), v);
      coeffs(j) += c;
      v -= c * kb.basis[j].matrix();
    }
  };
  OrthonormalizeResult res;
  pass();
  const double before = nu.norm();
  pass();
  double norm = nu.norm();
  res.reorthogonalized = true;
  res.passes = 2;
  if (norm < 0.5 * before) {
    pass();
    norm = nu.norm();
    res.passes = 3;
  }

  kb.hessenberg.conservativeResize(k + 1, k);
  kb.hessenberg.row(k).setZero();
  kb.hessenberg.col(k - 1).head(k) = coeffs;
  kb.hessenberg(k, k - 1) = norm;

  res.subdiag = norm;
  if (norm > kBreakdownRelTol * kb.reference_norm) {
    nu *= cplx(1.0 / norm);
    kb.basis.push_back(std::move(nu));
    res.appended = true;
  }
  return res;
}

cplx eps_to_lambda(cplx eps, double interval) {
  if (!(interval > 0.0)) throw std::invalid_argument("eps_to_lambda: interval must be > 0");
  const double mag = std::abs(eps);
  if (!(mag > std::numeric_limits<double>::min()))
    throw std::domain_error("eps_to_lambda: eigenvalue is zero (decay beyond resolution)");
  return cplx(std::log(mag), std::arg(eps)) / interval;
}

bool is_aliased(cplx eps) { return std::abs(std::arg(eps)) >= 0.9 * std::numbers::pi; }

namespace {

void sort_pairs(std::vector<RitzPair>& pairs) {
  std::stable_sort(pairs.begin(), pairs.end(), [](const RitzPair& a, const RitzPair& b) {
    const double ma = std::abs(a.eps), mb = std::abs(b.eps);
    if (ma != mb) return ma > mb;
    return a.eps.imag() > b.eps.imag();
  });
}

}  // namespace

std::vector<RitzPair> ritz_extract(const KrylovBasis& kb) {
  const int k = kb.columns();
  if (k < 1) throw std::invalid_argument("ritz_extract: no completed Hessenberg column");
  const Matrix block = kb.hessenberg.topLeftCorner(k, k);
  Eigen::ComplexEigenSolver<Matrix> es(block, true);
  if (es.info() != Eigen::Success)
    throw EigensolverFailure("ritz_extract: eigensolver failed on Hessenberg block", block);

  const double subdiag = std::abs(kb.hessenberg(k, k - 1));
  const Eigen::Index d = kb.basis.front().dim();
  std::vector<RitzPair> pairs;
  pairs.reserve(k);
  for (int j = 0; j < k; ++j) {
    Vector y = es.eigenvectors().col(j);
    y.normalize();
    Matrix acc = Matrix::Zero(d, d);
    for (int i = 0; i < k; ++i) acc += y(i) * kb.basis[i].matrix();
    const double n = acc.norm();
    if (n > 0.0) acc /= n;
    RitzPair p;
    p.eps = es.eigenvalues()(j);
    p.lambda = std::abs(p.eps) > std::numeric_limits<double>::min()
                   ? eps_to_lambda(p.eps, kb.interval)
                   : cplx(-std::numeric_limits<double>::infinity(), 0.0);
    p.eigenmatrix = Operator(kb.basis.front().space(), std::move(acc));
    p.estimate = subdiag * std::abs(y(k - 1));
    p.alias_flag = is_aliased(p.eps);
    pairs.push_back(std::move(p));
  }
  sort_pairs(pairs);
  return pairs;
}

void residual_check(const LindbladModel& model, std::vector<RitzPair>& pairs, double interval,
                    double tol, const ResidualOptions& opts) {
  parallel_for(pairs.size(), opts.threads, [&](std::size_t idx) {
    auto& p = pairs[idx];
    if (p.estimate > opts.prefilter_factor * tol) {
      p.residual = p.estimate;
      p.converged = false;
      return;
    }
    // The stroboscopic map always starts at drive phase zero.
    const Matrix image = propagate(model, p.eigenmatrix.matrix(), 0.0, interval, opts.integrator);
    p.residual = (image - p.eps * p.eigenmatrix.matrix()).norm();
    p.converged = p.residual < tol;
  });
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::HappyBreakdown: return "happy_breakdown";
    case Termination::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

int SpectralResult::converged_count() const {
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(),
                                        [](const RitzPair& p) { return p.converged; }));
}

namespace {

bool near_conjugate(cplx a, cplx b) {
  return std::abs(a - std::conj(b)) <= 1e-6 * std::max(std::abs(a), 1e-300);
}

bool is_real_eps(cplx e) { return std::abs(e.imag()) <= 1e-10 * std::abs(e); }

/// Leading m pairs, extended by the conjugate partner of every non-real
/// pair when that partner is present in the full Ritz set.
std::vector<RitzPair> select_wanted(std::vector<RitzPair> all, int m) {
  const std::size_t head = std::min<std::size_t>(m, all.size());
  std::vector<RitzPair> wanted(std::make_move_iterator(all.begin()),
                               std::make_move_iterator(all.begin() + head));
  all.erase(all.begin(), all.begin() + head);
  for (std::size_t i = 0; i < head; ++i) {
    const cplx e = wanted[i].eps;
    if (is_real_eps(e)) continue;
    const bool have = std::any_of(wanted.begin(), wanted.end(),
                                  [&](const RitzPair& q) { return near_conjugate(q.eps, e); });
    if (have) continue;
    auto it = std::find_if(all.begin(), all.end(),
                           [&](const RitzPair& q) { return near_conjugate(q.eps, e); });
    if (it != all.end()) {
      wanted.push_back(std::move(*it));
      all.erase(it);
    }
  }
  return wanted;
}

/// Appends (conj eps, ρ†) for converged non-real pairs whose partner is
/// missing; E(ρ†) = (Eρ)† for a Hermiticity-preserving map.
void close_under_conjugation(std::vector<RitzPair>& pairs, double interval) {
  std::vector<RitzPair> extra;
  for (const auto& p : pairs) {
    if (!p.converged || is_real_eps(p.eps)) continue;
    const auto has_partner = [&](const RitzPair& q) { return near_conjugate(q.eps, p.eps); };
    if (std::any_of(pairs.begin(), pairs.end(), has_partner) ||
        std::any_of(extra.begin(), extra.end(), has_partner))
      continue;
    RitzPair c;
    c.eps = std::conj(p.eps);
    c.lambda = eps_to_lambda(c.eps, interval);
    c.eigenmatrix = p.eigenmatrix.adjoint();
    c.estimate = p.estimate;
    c.alias_flag = p.alias_flag;
    extra.push_back(std::move(c));
  }
  for (auto& c : extra) pairs.push_back(std::move(c));
}

}  // namespace

SpectralResult arnoldi_lindblad(const LindbladModel& model, const Operator& rho0, double interval,
                                const ArnoldiOptions& opts) {
  if (!(interval > 0.0)) throw std::invalid_argument("arnoldi_lindblad: interval must be > 0");
  if (opts.m < 1) throw std::invalid_argument("arnoldi_lindblad: m must be >= 1");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("arnoldi_lindblad: tol must be > 0");
  if (opts.check_every < 1) throw std::invalid_argument("arnoldi_lindblad: check_every must be >= 1");
  if (opts.max_iter < 1) throw std::invalid_argument("arnoldi_lindblad: max_iter must be >= 1");
  if (rho0.dim() != model.dim()) throw DimensionError("arnoldi_lindblad: seed dimension mismatch");
  if (const auto period = model.period();
      period && std::abs(interval - *period) > 1e-12 * *period)
    throw std::invalid_argument("arnoldi_lindblad: interval must equal the drive period for a "
                                "periodically driven model");
  opts.integrator.validate();

  const auto start = std::chrono::steady_clock::now();
  ResidualOptions ropts{opts.integrator, opts.threads, 10.0};

  SpectralResult result;
  result.interval = interval;
  result.tol = opts.tol;
  result.m = opts.m;
  result.model_hash = model.hash();

  KrylovBasis kb = KrylovBasis::seeded(rho0, interval);
  std::vector<RitzPair> wanted;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Operator& last = kb.basis.back();
    Operator nu(last.space(), propagate(model, last.matrix(), 0.0, interval, opts.integrator));
    const auto step = orthonormalize_step(kb, std::move(nu));
    result.iterations = it;
    const bool breakdown = !step.appended;
    if (!breakdown && it % opts.check_every != 0 && it != opts.max_iter) continue;

    wanted = select_wanted(ritz_extract(kb), opts.m);
    const bool estimates_pass = std::all_of(wanted.begin(), wanted.end(), [&](const RitzPair& p) {
      return p.estimate <= ropts.prefilter_factor * opts.tol;
    });
    if (estimates_pass || breakdown || it == opts.max_iter)
      residual_check(model, wanted, interval, opts.tol, ropts);
    else
      for (auto& p : wanted) p.residual = p.estimate;

    const std::size_t head = std::min<std::size_t>(opts.m, wanted.size());
    const bool converged = head == static_cast<std::size_t>(opts.m) &&
                           std::all_of(wanted.begin(), wanted.begin() + head,
                                       [](const RitzPair& p) { return p.converged; });
    if (converged) {
      result.termination = Termination::Converged;
      break;
    }
    if (breakdown) {
      result.termination = Termination::HappyBreakdown;
      break;
    }
    result.termination = Termination::MaxIterations;
  }

  const std::size_t before = wanted.size();
  close_under_conjugation(wanted, interval);
  if (wanted.size() > before) {
    std::vector<RitzPair> appended(std::make_move_iterator(wanted.begin() + before),
                                   std::make_move_iterator(wanted.end()));
    wanted.resize(before);
    ResidualOptions strict = ropts;
    strict.prefilter_factor = std::numeric_limits<double>::infinity();
    residual_check(model, appended, interval, opts.tol, strict);
    for (auto& p : appended) wanted.push_back(std::move(p));
  }
  sort_pairs(wanted);
  result.pairs = std::move(wanted);
  result.orthonormality_error = kb.orthonormality_error();
  if (opts.keep_basis) result.basis = std::move(kb);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

DensityMatrix steady_state_extract(const SpectralResult& result, double psd_tol) {
  const RitzPair* best = nullptr;
  for (const auto& p : result.pairs)
    if (p.converged && (!best || std::abs(p.eps - 1.0) < std::abs(best->eps - 1.0))) best = &p;
  if (!best || std::abs(best->eps - 1.0) >= 0.1)
    throw SteadyStateError("no converged pair with |eps - 1| < 0.1; the run did not converge or "
                           "the interval is too short");
  Matrix rho = best->eigenmatrix.matrix();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-8)
    throw SteadyStateError("selected eigenmatrix is traceless; the unit eigenvalue may be "
                           "degenerate (restrict the seed to one symmetry sector)");
  rho /= tr.real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  DensityMatrix dm(Operator(best->eigenmatrix.space(), std::move(rho)));
  if (!dm.is_positive(psd_tol))
    throw SteadyStateError("steady state is not positive semidefinite (min eigenvalue " +
                           std::to_string(dm.min_eigenvalue()) + ")");
  return dm;
}

int unit_eigenvalue_multiplicity(const SpectralResult& result, double tol) {
  return static_cast<int>(std::count_if(result.pairs.begin(), result.pairs.end(), [&](const RitzPair& p) {
    return p.converged && std::abs(p.eps - 1.0) < tol;
  }));
}

TraceIndicator trace_indicator(const LindbladModel& model, const Operator& eigenmatrix) {
  const Operator l1 = apply_liouvillian(model, eigenmatrix, 0.0);
  const Operator l2 = apply_liouvillian(model, l1, 0.0);
  TraceIndicator ti;
  ti.first_moment_sq = std::norm(hs_inner(eigenmatrix, l1));
  ti.second_moment = std::abs(hs_inner(eigenmatrix, l2));
  ti.difference = std::abs(ti.first_moment_sq - ti.second_moment);
  return ti;
}

nlohmann::json to_json(const SpectralResult& result, const std::string& source) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : result.pairs)
    pairs.push_back({{"re_eps", p.eps.real()},
                     {"im_eps", p.eps.imag()},
                     {"re_lambda", p.lambda.real()},
                     {"im_lambda", p.lambda.imag()},
                     {"residual", p.residual},
                     {"converged", p.converged},
                     {"alias_flag", p.alias_flag}});
  return {{"source", source},
          {"model_hash", result.model_hash},
          {"T", result.interval},
          {"tol", result.tol},
          {"m", result.m},
          {"iterations", result.iterations},
          {"simulated_time", result.simulated_time()},
          {"termination", to_string(result.termination)},
          {"wall_time", result.wall_time},
          {"orthonormality_error", result.orthonormality_error},
          {"pairs", std::move(pairs)}};
}

}  // namespace arnoldi_lindblad
