#include "arnoldi_lindblad/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace arnoldi_lindblad {

void DDBHParams::validate() const {
  if (sites < 1) throw std::invalid_argument("DDBHParams: sites must be >= 1");
  if (n_max < 1) throw std::invalid_argument("DDBHParams: n_max must be >= 1");
  if (!(z >= 1.0)) throw std::invalid_argument("DDBHParams: z must be >= 1");
  if (static_cast<int>(drives.size()) != sites)
    throw std::invalid_argument("DDBHParams: need one drive amplitude per site");
  if (!(gamma >= 0.0)) throw std::invalid_argument("DDBHParams: gamma must be >= 0");
  if (geometry == Geometry::Ring && sites < 3)
    throw std::invalid_argument("DDBHParams: ring geometry needs at least 3 sites");
}

void FloquetDimerParams::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("FloquetDimerParams: omega must be > 0");
  if (n_total < 1) throw std::invalid_argument("FloquetDimerParams: n_total must be >= 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("FloquetDimerParams: gamma must be >= 0");
}

LindbladModel ddbh_model(const DDBHParams& p) {
  p.validate();
  const auto space = HilbertSpec::full(p.sites, p.n_max);
  const Operator a = destroy(p.n_max);
  std::vector<Operator> ann;
  for (int l = 1; l <= p.sites; ++l) ann.push_back(embed(a, l, space));

  Operator h = Operator::zero(space);
  std::vector<JumpTerm> jumps;
  for (int l = 0; l < p.sites; ++l) {
    const Operator& al = ann[l];
    const Operator ad = al.adjoint();
    const Operator n = ad * al;
    h += cplx(-p.delta) * n;
    h += cplx(0.5 * p.u) * (ad * ad * al * al);
    h += cplx(p.drives[l]) * (ad + al);
    jumps.push_back({al, p.gamma});
  }

  // Each unordered nearest-neighbour pair counted once, plus its adjoint.
  std::vector<std::pair<int, int>> bonds;
  for (int l = 0; l + 1 < p.sites; ++l) bonds.emplace_back(l, l + 1);
  if (p.geometry == Geometry::Ring) bonds.emplace_back(p.sites - 1, 0);
  for (const auto& [l, m] : bonds) {
    const Operator hop = ann[l].adjoint() * ann[m];
    h -= cplx(p.j_hop / p.z) * (hop + hop.adjoint());
  }
  // Remove rounding asymmetry so the Hermiticity check is exact.
  h.matrix() = 0.5 * (h.matrix() + h.matrix().adjoint()).eval();
  return LindbladModel(std::move(h), std::move(jumps));
}

LindbladModel floquet_dimer_model(const FloquetDimerParams& p) {
  p.validate();
  const int n = p.n_total;
  const Operator n1 = sector_ladder(SectorOp::N1, n);
  const Operator n2 = sector_ladder(SectorOp::N2, n);
  const Operator hop12 = sector_ladder(SectorOp::Hop12, n);
  const Operator hop21 = sector_ladder(SectorOp::Hop21, n);
  const Operator id = Operator::identity(n1.space());

  // (a†)^2 a^2 = n (n - 1)
  Operator h0 = cplx(0.5 * p.u) * (n1 * (n1 - id) + n2 * (n2 - id));
  h0 -= cplx(p.j_hop) * (hop12 + hop21);
  Operator h1 = n2 - n1;

  // (a1† + a2†)(a1 - a2) = n1 - a1†a2 + a2†a1 - n2
  Operator v = n1 - hop12 + hop21 - n2;
  std::vector<JumpTerm> jumps{{std::move(v), p.gamma}};
  return LindbladModel(std::move(h0), std::move(h1), DriveProtocol{p.f0, p.f1, p.omega},
                       std::move(jumps));
}

DDBHParams dimer_fig3_params(int n_max) {
  DDBHParams p;
  p.sites = 2;
  p.delta = 5.0;
  p.drives = {4.5, 4.5};
  p.u = 20.0;
  p.j_hop = 10.0;
  p.z = 1.0;
  p.gamma = 1.0;
  p.n_max = n_max;
  return p;
}

DDBHParams trimer_fig5_params(int n_max) {
  // J here is already the per-bond value J/z.
  DDBHParams p = dimer_fig3_params(n_max);
  p.sites = 3;
  p.drives = {4.5, 4.5, 4.5};
  return p;
}

DDBHParams asymmetric_dimer_params(int n_max) {
  DDBHParams p;
  p.sites = 2;
  p.delta = 2.0;
  p.drives = {8.0, 0.0};
  p.u = 1.0 / 8.0;
  p.j_hop = 2.0;
  p.z = 1.0;
  p.gamma = 1.0;
  p.n_max = n_max;
  return p;
}

FloquetDimerParams floquet_fig8_params(int n_total) {
  // U N / J = 1, gamma N / J = 0.2 with the factor-2 rescaling of gamma.
  FloquetDimerParams p;
  p.j_hop = 1.0;
  p.u = 1.0 / n_total;
  p.f0 = 1.0;
  p.f1 = 3.4;
  p.omega = 1.0;
  p.gamma = 2.0 * 0.2 / n_total;
  p.n_total = n_total;
  return p;
}

LindbladModel asymmetric_dimer_preset(int n_max) { return ddbh_model(asymmetric_dimer_params(n_max)); }

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"dimer-fig3", "trimer-fig5", "tc-dimer-fig6",
                                              "floquet-fig8"};
  return names;
}

Preset preset_model(const std::string& name, int size) {
  constexpr double kDefaultInterval = 0.05;  // gamma T = 1/20
  if (name == "dimer-fig3")
    return {name, ddbh_model(dimer_fig3_params(size > 0 ? size : 7)), kDefaultInterval};
  if (name == "trimer-fig5")
    return {name, ddbh_model(trimer_fig5_params(size > 0 ? size : 7)), kDefaultInterval};
  if (name == "tc-dimer-fig6")
    return {name, ddbh_model(asymmetric_dimer_params(size > 0 ? size : 27)), kDefaultInterval};
  if (name == "floquet-fig8") {
    const auto p = floquet_fig8_params(size > 0 ? size : 50);
    auto model = floquet_dimer_model(p);
    const double period = *model.period();
    return {name, std::move(model), period};
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<Eigen::Index> site_swap_permutation(const HilbertSpec& space) {
  if (space.is_sector() || space.sites != 2)
    throw std::invalid_argument("site_swap_permutation: needs a full two-site space");
  const Eigen::Index d = space.local_dim();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(d * d));
  for (Eigen::Index n1 = 0; n1 < d; ++n1)
    for (Eigen::Index n2 = 0; n2 < d; ++n2) perm[n1 * d + n2] = n2 * d + n1;
  return perm;
}

}  // namespace arnoldi_lindblad

namespace arnoldi_lindblad {

std::vector<Operator> site_number_operators(const HilbertSpec& space) {
  if (space.is_sector())
    return {sector_ladder(SectorOp::N1, *space.sector), sector_ladder(SectorOp::N2, *space.sector)};
  const Operator n = create(space.n_max) * destroy(space.n_max);
  std::vector<Operator> out;
  for (int l = 1; l <= space.sites; ++l) out.push_back(embed(n, l, space));
  return out;
}

}  // namespace arnoldi_lindblad
