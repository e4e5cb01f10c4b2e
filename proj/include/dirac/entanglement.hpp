#pragma once

#include <algorithm>
#include <cmath>

#include "dirac/linalg.hpp"
#include "dirac/state.hpp"

// Entanglement functionals of pure two-qubit states.

namespace dirac {

// C = 2|ad - bc| for amplitudes (a, b, c, d); 0 for separable states,
// 1 for maximally entangled ones.
inline double concurrence(const SpinorState& s) {
  const Vec<4>& a = s.amp;
  const double c = 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]);
  return std::min(c, 1.0);  // shave floating dust above the exact bound
}

// Independent route: trace out the pseudospin, then use
// C = sqrt(2 (1 - Tr rho_spin^2)) for pure states.
inline double concurrence_oracle(const SpinorState& st) {
  // rho[s][s'] = sum_sublattice amp[2s + sub] * conj(amp[2s' + sub])
  cplx rho[2][2];
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t sp = 0; sp < 2; ++sp) {
      cplx acc = 0.0;
      for (std::size_t sub = 0; sub < 2; ++sub)
        acc += st.amp[2 * s + sub] * std::conj(st.amp[2 * sp + sub]);
      rho[s][sp] = acc;
    }
  double purity = 0.0;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t sp = 0; sp < 2; ++sp) purity += std::norm(rho[s][sp]);
  const double two_defect = 2.0 * (1.0 - purity);
  return std::sqrt(std::max(two_defect, 0.0));
}

// Maximal CHSH expression value over measurement settings, normalized so the
// classical bound is 1 and the Tsirelson bound is sqrt(2).
inline double chsh_beta(double concurrence_value) {
  return std::sqrt(1.0 + concurrence_value * concurrence_value);
}

}  // namespace dirac
