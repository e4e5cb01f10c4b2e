#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirac/entanglement.hpp"
#include "dirac/model.hpp"
#include "dirac/state.hpp"

// Time evolution under a fixed graphene-Rashba Hamiltonian.  The workhorse is
// the spectral propagator (exact at any t, no step chaining); a fixed-step
// Runge-Kutta integrator of the Schrodinger equation is kept alongside as an
// independent cross-check.

namespace dirac {

struct TimeGrid {
  double t_start;  // internal time, hbar/ueV
  double t_end;
  std::size_t n_samples;

  void validate() const {
    if (n_samples < 2) throw std::invalid_argument("time grid needs at least 2 samples");
    if (!(t_end > t_start)) throw std::invalid_argument("time grid needs t_end > t_start");
  }
  double spacing() const { return (t_end - t_start) / static_cast<double>(n_samples - 1); }
  double at(std::size_t i) const { return t_start + spacing() * static_cast<double>(i); }
};

// U(t) = sum_j exp(-i E_j t) P_j with P_j the spectral projectors, grouped by
// energy so the zero-energy pair at epsilon = 0 contributes one rank-2
// projector (basis-independent).
class Propagator {
 public:
  struct Group {
    double energy;  // ueV
    Mat<4> projector;
  };

  explicit Propagator(const ModelParams& params) : params_(params) {
    params.validate();
    sys_ = (params.tau == +1) ? analytic_eigensystem(params)
                              : numeric_eigensystem(build_hamiltonian(params));
    const double scale = std::max(std::abs(sys_.levels[0].energy), 1.0);
    for (const EigenLevel& lv : sys_.levels) {
      Mat<4> proj;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
          proj(i, j) = lv.state[i] * std::conj(lv.state[j]);
      if (!groups_.empty() && std::abs(lv.energy - groups_.back().energy) <= 1e-12 * scale) {
        groups_.back().projector = groups_.back().projector + proj;
      } else {
        groups_.push_back({lv.energy, proj});
      }
    }
  }

  const ModelParams& params() const { return params_; }
  const EigenSystem& eigensystem() const { return sys_; }
  const std::vector<Group>& groups() const { return groups_; }

  SpinorState evolve(const SpinorState& st, double t) const {
    Vec<4> out{};
    for (const Group& g : groups_) {
      const cplx phase = std::polar(1.0, -g.energy * t);
      const Vec<4> proj = g.projector * st.amp;
      for (std::size_t i = 0; i < 4; ++i) out[i] += phase * proj[i];
    }
    return SpinorState{out};
  }

 private:
  ModelParams params_;
  EigenSystem sys_;
  std::vector<Group> groups_;
};

struct TimeSeries {
  TimeGrid grid;
  std::map<std::string, std::vector<double>> channels;
};

inline const std::vector<std::string>& known_channels() {
  static const std::vector<std::string> names = {"C",  "beta",    "norm",    "sx",      "sy",
                                                 "sz", "sigma_x", "sigma_y", "sigma_z"};
  return names;
}

// Sample the requested observables over a uniform grid.  Every point is
// evaluated directly from the spectral form at its own t.
inline TimeSeries trajectory(const Propagator& p, const SpinorState& st, const TimeGrid& grid,
                             const std::vector<std::string>& channels) {
  grid.validate();
  TimeSeries out;
  out.grid = grid;
  for (const std::string& name : channels) {
    bool known = false;
    for (const std::string& k : known_channels()) known = known || (k == name);
    if (!known) throw std::invalid_argument("unknown trajectory channel: " + name);
    out.channels[name].resize(grid.n_samples);
  }
  for (std::size_t i = 0; i < grid.n_samples; ++i) {
    const SpinorState at_t = p.evolve(st, grid.at(i));
    double c = -1.0;
    BlochVectors bv{};
    bool have_bloch = false;
    for (auto& [name, values] : out.channels) {
      if (name == "C" || name == "beta") {
        if (c < 0.0) c = concurrence(at_t);
        values[i] = (name == "C") ? c : chsh_beta(c);
      } else if (name == "norm") {
        values[i] = norm(at_t.amp);
      } else {
        if (!have_bloch) {
          bv = bloch_vectors(at_t);
          have_bloch = true;
        }
        if (name == "sx") values[i] = bv.spin[0];
        else if (name == "sy") values[i] = bv.spin[1];
        else if (name == "sz") values[i] = bv.spin[2];
        else if (name == "sigma_x") values[i] = bv.pseudospin[0];
        else if (name == "sigma_y") values[i] = bv.pseudospin[1];
        else if (name == "sigma_z") values[i] = bv.pseudospin[2];
      }
    }
  }
  return out;
}

// Classic fixed-step 4th-order Runge-Kutta integration of
// i d|psi>/dt = H |psi>, deliberately without renormalization so that norm
// drift exposes integrator error.  Exists as an oracle for Propagator::evolve.
inline SpinorState integrate_schrodinger_oracle(const ModelParams& params, const SpinorState& st,
                                                double t, double dt_max = 0.0) {
  params.validate();
  if (dt_max == 0.0) dt_max = 1e-3 / params.eps_plus();
  if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be > 0");
  if (t == 0.0) return st;

  const double span = std::abs(t);
  const double steps_needed = std::ceil(span / dt_max);
  if (steps_needed > 1e9)
    throw std::domain_error("integrate_schrodinger_oracle: more than 1e9 steps requested; "
                            "increase dt_max or reduce t");
  const std::size_t steps = static_cast<std::size_t>(steps_needed);
  const double dt = t / static_cast<double>(steps);  // signed

  const Mat<4> h = build_hamiltonian(params);
  const auto deriv = [&](const Vec<4>& v) {
    Vec<4> hv = h * v;
    for (auto& z : hv) z *= cplx(0.0, -1.0);
    return hv;
  };

  Vec<4> y = st.amp;
  for (std::size_t s = 0; s < steps; ++s) {
    const Vec<4> k1 = deriv(y);
    Vec<4> tmp;
    for (std::size_t i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    const Vec<4> k2 = deriv(tmp);
    for (std::size_t i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    const Vec<4> k3 = deriv(tmp);
    for (std::size_t i = 0; i < 4; ++i) tmp[i] = y[i] + dt * k3[i];
    const Vec<4> k4 = deriv(tmp);
    for (std::size_t i = 0; i < 4; ++i)
      y[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return SpinorState{y};
}

struct EffectiveFields {
  std::array<double, 3> B_spin;        // ueV
  std::array<double, 3> B_pseudospin;  // ueV
};

// Instantaneous mutual-precession fields for transport along x (theta = 0):
//   B_spin       = lambda_R (-<sigma_y>, <sigma_x>, 0)
//   B_pseudospin = lambda_R (<s_y>, -<s_x>, 0) + (tau epsilon, 0, 0)
inline EffectiveFields effective_fields(const SpinorState& st, const ModelParams& params) {
  params.validate();
  if (params.theta != 0.0)
    throw std::invalid_argument("effective_fields is defined for transport along x (theta = 0)");
  const BlochVectors bv = bloch_vectors(st);
  EffectiveFields f{};
  f.B_spin = {-params.lambda_R * bv.pseudospin[1], params.lambda_R * bv.pseudospin[0], 0.0};
  f.B_pseudospin = {params.lambda_R * bv.spin[1] + params.tau * params.epsilon,
                    -params.lambda_R * bv.spin[0], 0.0};
  return f;
}

}  // namespace dirac
