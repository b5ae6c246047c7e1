#pragma once

#include <string>
#include <vector>

#include "arnoldi_lindblad/lindblad.hpp"

namespace arnoldi_lindblad {

enum class Geometry { Chain, Ring };

/// Driven-dissipative Bose-Hubbard lattice in the pump frame. Energies are
/// in units of the loss rate gamma.
struct DDBHParams {
  int sites = 2;
  double delta = 0.0;
  std::vector<double> drives;  // F_l, one per site
  double u = 0.0;
  double j_hop = 0.0;
  double z = 1.0;  // coordination number dividing the hopping
  double gamma = 1.0;
  int n_max = 1;
  Geometry geometry = Geometry::Chain;

  void validate() const;
};

/// Two-mode Bose-Hubbard dimer with modulated detuning f(t) and collective
/// dephasing, restricted to N particles. Energies in units of J.
struct FloquetDimerParams {
  double u = 0.0;
  double j_hop = 1.0;
  double f0 = 0.0;
  double f1 = 0.0;
  double omega = 1.0;
  double gamma = 0.0;
  int n_total = 1;

  void validate() const;
};

LindbladModel ddbh_model(const DDBHParams& p);
LindbladModel floquet_dimer_model(const FloquetDimerParams& p);

DDBHParams dimer_fig3_params(int n_max = 7);
DDBHParams trimer_fig5_params(int n_max = 7);
DDBHParams asymmetric_dimer_params(int n_max = 27);
FloquetDimerParams floquet_fig8_params(int n_total = 50);

LindbladModel asymmetric_dimer_preset(int n_max = 27);

/// Names accepted by `preset_model`.
const std::vector<std::string>& preset_names();

struct Preset {
  std::string name;
  LindbladModel model;
  double default_interval;  // snapshot interval T (drive period for Floquet)
};

/// `size` overrides n_max (DDBH presets) or N (floquet-fig8) when > 0.
Preset preset_model(const std::string& name, int size = 0);

/// n_1 … n_L for a full space, or N1, N2 for the two-mode sector.
std::vector<Operator> site_number_operators(const HilbertSpec& space);

/// Fock-basis permutation exchanging sites 1 and 2 of a two-site space.
std::vector<Eigen::Index> site_swap_permutation(const HilbertSpec& space);

}  // namespace arnoldi_lindblad
