#pragma once

#include "arnoldi_lindblad/models.hpp"

namespace al_test {

using namespace arnoldi_lindblad;

/// H = 0, one mode, jump a at rate gamma.
inline LindbladModel decaying_mode(int n_max, double gamma = 1.0) {
  const Operator a = destroy(n_max);
  return LindbladModel(Operator::zero(a.space()), {{a, gamma}});
}

inline Operator fock_projector(const HilbertSpec& space, Eigen::Index n) {
  Operator p = Operator::zero(space);
  p.matrix()(n, n) = 1.0;
  return p;
}

inline Operator random_operator(const HilbertSpec& space, unsigned seed) {
  std::srand(seed);
  const auto d = space.dim();
  return Operator(space, Matrix::Random(d, d));
}

inline double rel_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace al_test
