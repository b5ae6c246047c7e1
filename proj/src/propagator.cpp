#include "arnoldi_lindblad/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace arnoldi_lindblad {

void IntegratorConfig::validate() const {
  if (substeps < 1) throw std::invalid_argument("IntegratorConfig: substeps must be >= 1");
  if (dt && !(*dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw std::invalid_argument("IntegratorConfig: rtol and atol must be > 0");
}

StepSizeUnderflow::StepSizeUnderflow(double time, double step)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "adaptive step size underflow at t = " << std::setprecision(17) << time
            << " (step " << step << ")";
        return msg.str();
      }()),
      time_(time) {}

int fixed_step_count(const LindbladModel& model, double interval, const IntegratorConfig& cfg) {
  double steps = cfg.dt ? std::ceil(interval / *cfg.dt - 1e-9) : cfg.substeps;
  if (cfg.stability_guard)
    steps = std::max(steps, std::ceil(interval * model.generator_radius_bound() / kRk4StableRadius));
  return std::max(1, static_cast<int>(steps));
}

namespace {

void rk4(const LindbladModel& model, Matrix& rho, double t0, double interval, int steps) {
  const Eigen::Index d = rho.rows();
  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);
  const double h = interval / steps;
  for (int s = 0; s < steps; ++s) {
    // Absolute time is evaluated per stage so H(t) is sampled correctly.
    const double t = t0 + s * h;
    model.apply(rho, t, k1);
    tmp = rho + (0.5 * h) * k1;
    model.apply(tmp, t + 0.5 * h, k2);
    tmp = rho + (0.5 * h) * k2;
    model.apply(tmp, t + 0.5 * h, k3);
    tmp = rho + h * k3;
    model.apply(tmp, t + h, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

void dopri45(const LindbladModel& model, Matrix& rho, double t0, double interval,
             const IntegratorConfig& cfg) {
  const Eigen::Index d = rho.rows();
  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d);
  Matrix tmp(d, d), next(d, d), err(d, d);
  const double t_end = t0 + interval;
  double t = t0;
  double h = std::min(interval, 1.0 / std::max(1.0, model.generator_radius_bound()));
  model.apply(rho, t, k1);
  while (t < t_end) {
    h = std::min(h, t_end - t);
    tmp = rho + h * a21 * k1;
    model.apply(tmp, t + c2 * h, k2);
    tmp = rho + h * (a31 * k1 + a32 * k2);
    model.apply(tmp, t + c3 * h, k3);
    tmp = rho + h * (a41 * k1 + a42 * k2 + a43 * k3);
    model.apply(tmp, t + c4 * h, k4);
    tmp = rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    model.apply(tmp, t + c5 * h, k5);
    tmp = rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    model.apply(tmp, t + h, k6);
    next = rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    model.apply(next, t + h, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double acc = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) {
        const double scale =
            cfg.atol + cfg.rtol * std::max(std::abs(rho(i, j)), std::abs(next(i, j)));
        const double r = std::abs(err(i, j)) / scale;
        acc += r * r;
      }
    const double norm = std::sqrt(acc / static_cast<double>(d * d));

    if (norm <= 1.0) {
      t += h;
      rho.swap(next);
      k1.swap(k7);  // first-same-as-last
    }
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h *= norm <= 1.0 ? factor : std::min(1.0, factor);
    if (t < t_end && h < cfg.min_step * std::max(1.0, std::abs(t))) throw StepSizeUnderflow(t, h);
  }
}

}  // namespace

Matrix propagate(const LindbladModel& model, const Matrix& rho0, double t0, double interval,
                 const IntegratorConfig& cfg) {
  if (!(interval > 0.0)) throw std::invalid_argument("propagate: interval must be > 0");
  if (rho0.rows() != model.dim() || rho0.cols() != model.dim())
    throw DimensionError("propagate: operator does not match model dimension");
  cfg.validate();
  Matrix rho = rho0;
  if (cfg.method == IntegratorMethod::RK4)
    rk4(model, rho, t0, interval, fixed_step_count(model, interval, cfg));
  else
    dopri45(model, rho, t0, interval, cfg);
  return rho;
}

Operator propagate(const LindbladModel& model, const Operator& rho0, double t0, double interval,
                   const IntegratorConfig& cfg) {
  return Operator(rho0.space(), propagate(model, rho0.matrix(), t0, interval, cfg));
}

Trajectory observable_trajectory(const LindbladModel& model, const Operator& rho0,
                                 const std::vector<double>& times,
                                 const std::vector<NamedObservable>& observables,
                                 const IntegratorConfig& cfg) {
  if (times.empty()) throw std::invalid_argument("observable_trajectory: no sample times");
  if (times.front() < 0.0) throw std::invalid_argument("observable_trajectory: negative time");
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("observable_trajectory: times must be ascending");
  for (const auto& o : observables)
    if (o.op.dim() != model.dim())
      throw DimensionError("observable_trajectory: observable " + o.name + " dimension mismatch");

  Trajectory traj;
  traj.times = times;
  for (const auto& o : observables) traj.names.push_back(o.name);

  Operator rho = rho0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && times[i] > times[i - 1])
      rho = propagate(model, rho, times[i - 1], times[i] - times[i - 1], cfg);
    std::vector<cplx> row;
    row.reserve(observables.size());
    for (const auto& o : observables) row.push_back(expectation(o.op, rho));
    traj.values.push_back(std::move(row));
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (const auto& n : traj.names) out << ",re(" << n << "),im(" << n << ")";
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << traj.times[i];
    for (const auto& v : traj.values[i]) out << ',' << v.real() << ',' << v.imag();
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trajectory CSV: missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "t" || header.size() % 2 != 1)
    throw std::runtime_error("trajectory CSV: header must be t,re(x),im(x),...");
  for (std::size_t c = 1; c < header.size(); c += 2) {
    const auto& re = header[c];
    if (re.size() < 5 || re.rfind("re(", 0) != 0 || re.back() != ')')
      throw std::runtime_error("trajectory CSV: bad column " + re);
    traj.names.push_back(re.substr(3, re.size() - 4));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    if (cells.size() != header.size())
      throw std::runtime_error("trajectory CSV: row width does not match header");
    traj.times.push_back(cells[0]);
    std::vector<cplx> row;
    for (std::size_t c = 1; c < cells.size(); c += 2) row.emplace_back(cells[c], cells[c + 1]);
    traj.values.push_back(std::move(row));
  }
  return traj;
}

}  // namespace arnoldi_lindblad
