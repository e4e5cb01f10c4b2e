#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dirac/averaging.hpp"
#include "dirac/dynamics.hpp"
#include "dirac/entanglement.hpp"
#include "dirac/model.hpp"
#include "dirac/state.hpp"
#include "dirac/units.hpp"
#include "dirac/version.hpp"

// Experiment commands: each produces one ResultTable (CSV or JSON on disk)
// from a validated RunConfig.  Tables carry a units header row and a
// provenance footer; identical configs give byte-identical files at any
// thread count.

namespace dirac {

// Exit-code contract: 0 success, 2 config error, 3 I/O error,
// 4 numeric-domain error.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// formatting helpers

// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hex_u64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s = "0x";
  for (int shift = 60; shift >= 0; shift -= 4) s += digits[(v >> shift) & 0xF];
  return s;
}

// ---------------------------------------------------------------------------
// result tables

using Cell = std::variant<double, std::string>;

struct ResultTable {
  struct Column {
    std::string name;
    std::string unit;  // "1" dimensionless, "-" textual
  };
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> footer;  // provenance lines, without the "# " prefix

  void add_row(std::vector<Cell> cells) {
    if (cells.size() != columns.size())
      throw std::logic_error("result row width does not match column count");
    rows.push_back(std::move(cells));
  }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].name == name) return i;
    throw config_error("result table is missing required column: " + name);
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) os << ',';
      os << columns[i].name << '[' << columns[i].unit << ']';
    }
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        if (std::holds_alternative<double>(row[i]))
          os << format_double(std::get<double>(row[i]));
        else
          os << std::get<std::string>(row[i]);
      }
      os << '\n';
    }
    for (const std::string& line : footer) os << "# " << line << '\n';
  }

  void write_json(std::ostream& os) const {
    nlohmann::json doc;
    for (const auto& c : columns) doc["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json jr = nlohmann::json::array();
      for (const auto& cell : row) {
        if (std::holds_alternative<double>(cell))
          jr.push_back(std::get<double>(cell));
        else
          jr.push_back(std::get<std::string>(cell));
      }
      doc["rows"].push_back(std::move(jr));
    }
    doc["provenance"] = footer;
    os << doc.dump(2) << '\n';
  }
};

// Minimal CSV reader for round-trip tests: returns header names (unit
// stripped), numeric-or-string cells, and footer lines.
struct ParsedCsv {
  std::vector<std::string> names;
  std::vector<std::string> units;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> footer;
};

inline ParsedCsv parse_csv(std::istream& is) {
  ParsedCsv out;
  std::string line;
  if (!std::getline(is, line)) throw io_error("empty CSV input");
  std::stringstream hs(line);
  std::string field;
  while (std::getline(hs, field, ',')) {
    const auto lb = field.find('[');
    const auto rb = field.rfind(']');
    if (lb == std::string::npos || rb == std::string::npos || rb < lb)
      throw io_error("CSV header field lacks [unit]: " + field);
    out.names.push_back(field.substr(0, lb));
    out.units.push_back(field.substr(lb + 1, rb - lb - 1));
  }
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0) {
      out.footer.push_back(line.substr(2));
      continue;
    }
    if (line.empty()) continue;
    std::vector<Cell> row;
    std::stringstream rs(line);
    while (std::getline(rs, field, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec == std::errc{} && res.ptr == field.data() + field.size())
        row.emplace_back(v);
      else
        row.emplace_back(field);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// run configuration

struct StateSpec {
  std::string label;  // named state, or "literal"
  SpinorState state;
};

struct RunConfig {
  std::string command;

  // model
  double lambda_r = 37.5;                            // ueV (dynamics/ensemble/chsh)
  std::vector<double> lambda_r_list = {37.5, 375.0, 3750.0};  // eigen/avg sweeps
  int valley = +1;

  // eigen-sweep linear grid, ueV
  double eigen_eps_min = 0.0;
  double eigen_eps_max = 300.0;
  std::size_t eigen_points = 601;

  // dynamics
  std::vector<double> epsilon_list;  // ueV; default {0, lambda_r, 10 lambda_r}
  std::vector<StateSpec> states;     // default: the four named states
  std::size_t time_points = 2001;
  double time_periods = 4.0;  // precession periods (pi hbar/lambda_R each)
  std::vector<std::string> channels = {"C", "beta"};

  // avg-sweep log-symmetric grid: sign(i+1/2) * lambda_R * 10^(-D + 2D|i|/H), H = (P-1)/2
  std::size_t grid_points = 401;
  double grid_decades = 3.0;

  // averaging
  AveragingSpec averaging{};

  // ensemble-sweep
  std::size_t n_members = 1000;
  std::vector<double> sweep_factors;  // epsilon / lambda_R; default 9 log points

  // chsh
  double chsh_epsilon = 25000.0;  // ueV

  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency

  std::string out;  // default "<command>.csv" / ".json"
  std::string format = "csv";
  std::string plot_script;  // optional gnuplot output path
  std::string chsh_csv = "chsh.csv";  // sibling file referenced by the fig2 plot script

  unsigned effective_threads() const {
    if (threads != 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
};

inline std::vector<double> default_sweep_factors() {
  std::vector<double> f(9);
  for (std::size_t i = 0; i < 9; ++i)
    f[i] = 0.05 * std::pow(40.0, static_cast<double>(i) / 8.0);
  return f;
}

namespace detail {

inline double json_number(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw config_error("config key '" + key + "' must be a number");
  return j.get<double>();
}

inline std::vector<double> json_number_array(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw config_error("config key '" + key + "' must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(json_number(v, key));
  return out;
}

inline StateSpec parse_state_spec(const nlohmann::json& j) {
  if (j.is_string()) {
    try {
      return {j.get<std::string>(), named_state(j.get<std::string>())};
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());  // bad name in a config is a config error
    }
  }
  if (j.is_array() && j.size() == 4) {
    Vec<4> amp;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& pair = j[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        throw config_error("state literal must be 4 [re, im] pairs");
      amp[i] = cplx(pair[0].get<double>(), pair[1].get<double>());
    }
    const double n = norm(amp);
    if (n == 0.0) throw config_error("state literal must be nonzero");
    if (std::abs(n - 1.0) > 1e-6)
      std::cerr << "warning: state literal norm " << format_double(n)
                << " differs from 1; renormalizing\n";
    return {"literal", SpinorState::from_amplitudes(amp)};
  }
  throw config_error("each state must be a known name or 4 [re, im] pairs");
}

inline StateSpec parse_state_text(const std::string& text) {
  if (!text.empty() && text.front() == '[') {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw config_error("state literal is not valid JSON: " + text);
    return parse_state_spec(j);
  }
  return {text, named_state(text)};
}

}  // namespace detail

// Keys accepted per command; anything else in a config file is rejected.
inline const std::map<std::string, std::vector<std::string>>& allowed_config_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"eigen-sweep",
       {"command", "lambda_r_list", "epsilon_min", "epsilon_max", "epsilon_points", "valley",
        "out", "format", "plot_script", "threads"}},
      {"dynamics",
       {"command", "lambda_r", "epsilon_list", "states", "channels", "time_points",
        "time_periods", "valley", "out", "format", "plot_script", "chsh_csv", "threads"}},
      {"avg-sweep",
       {"command", "lambda_r_list", "states", "grid_points", "grid_decades", "horizon",
        "samples", "out", "format", "plot_script", "threads"}},
      {"ensemble-sweep",
       {"command", "lambda_r", "n", "sweep_factors", "horizon", "samples", "seed", "out",
        "format", "plot_script", "threads"}},
      {"chsh",
       {"command", "lambda_r", "epsilon", "time_points", "time_periods", "seed", "out",
        "format", "plot_script", "threads"}},
  };
  return keys;
}

// Parse and validate a JSON config for `command`.  Unknown keys are an error;
// values merely overwrite the defaults already present in `cfg`.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.is_object()) throw config_error("config file must contain a JSON object");
  const auto it = allowed_config_keys().find(cfg.command);
  if (it == allowed_config_keys().end())
    throw config_error("unknown command: " + cfg.command);
  const std::vector<std::string>& allowed = it->second;

  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw config_error("unknown config key '" + key + "' for command " + cfg.command);

    if (key == "command") {
      if (!value.is_string() || value.get<std::string>() != cfg.command)
        throw config_error("config 'command' does not match the invoked command " + cfg.command);
    } else if (key == "lambda_r") {
      cfg.lambda_r = detail::json_number(value, key);
    } else if (key == "lambda_r_list") {
      cfg.lambda_r_list = detail::json_number_array(value, key);
    } else if (key == "valley") {
      if (!value.is_number_integer()) throw config_error("'valley' must be +1 or -1");
      cfg.valley = value.get<int>();
    } else if (key == "epsilon_min") {
      cfg.eigen_eps_min = detail::json_number(value, key);
    } else if (key == "epsilon_max") {
      cfg.eigen_eps_max = detail::json_number(value, key);
    } else if (key == "epsilon_points") {
      cfg.eigen_points = value.get<std::size_t>();
    } else if (key == "epsilon_list") {
      cfg.epsilon_list = detail::json_number_array(value, key);
    } else if (key == "epsilon") {
      cfg.chsh_epsilon = detail::json_number(value, key);
    } else if (key == "states") {
      if (!value.is_array() || value.empty())
        throw config_error("'states' must be a non-empty array");
      cfg.states.clear();
      for (const auto& s : value) cfg.states.push_back(detail::parse_state_spec(s));
    } else if (key == "channels") {
      if (!value.is_array() || value.empty())
        throw config_error("'channels' must be a non-empty array of channel names");
      cfg.channels.clear();
      for (const auto& c : value) {
        if (!c.is_string()) throw config_error("'channels' entries must be strings");
        cfg.channels.push_back(c.get<std::string>());
      }
    } else if (key == "time_points") {
      cfg.time_points = value.get<std::size_t>();
    } else if (key == "time_periods") {
      cfg.time_periods = detail::json_number(value, key);
    } else if (key == "grid_points") {
      cfg.grid_points = value.get<std::size_t>();
    } else if (key == "grid_decades") {
      cfg.grid_decades = detail::json_number(value, key);
    } else if (key == "horizon") {
      cfg.averaging.horizon = detail::json_number(value, key);
    } else if (key == "samples") {
      cfg.averaging.n_samples = value.get<std::size_t>();
    } else if (key == "n") {
      cfg.n_members = value.get<std::size_t>();
    } else if (key == "sweep_factors") {
      cfg.sweep_factors = detail::json_number_array(value, key);
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      cfg.threads = value.get<unsigned>();
    } else if (key == "out") {
      cfg.out = value.get<std::string>();
    } else if (key == "format") {
      cfg.format = value.get<std::string>();
    } else if (key == "plot_script") {
      cfg.plot_script = value.get<std::string>();
    } else if (key == "chsh_csv") {
      cfg.chsh_csv = value.get<std::string>();
    }
  }
}

// Fill remaining defaults and check all parameters before any computation.
inline void finalize_config(RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json")
    throw config_error("format must be 'csv' or 'json'");
  if (cfg.out.empty()) cfg.out = cfg.command + "." + cfg.format;

  if (cfg.valley != 1 && cfg.valley != -1) throw config_error("valley must be +1 or -1");

  const auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw config_error(std::string(what) + " must be > 0");
  };
  const auto check_averaging = [&cfg] {
    try {
      cfg.averaging.validate();
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());  // bad averaging window in a config
    }
  };

  if (cfg.command == "eigen-sweep") {
    if (cfg.lambda_r_list.empty()) throw config_error("lambda_r_list must be non-empty");
    for (double l : cfg.lambda_r_list) positive(l, "every lambda_r");
    if (cfg.eigen_eps_min < 0.0 || cfg.eigen_eps_max <= cfg.eigen_eps_min)
      throw config_error("eigen-sweep needs 0 <= epsilon_min < epsilon_max");
    if (cfg.eigen_points < 2) throw config_error("epsilon_points must be >= 2");
  } else if (cfg.command == "dynamics") {
    positive(cfg.lambda_r, "lambda_r");
    if (cfg.epsilon_list.empty())
      cfg.epsilon_list = {0.0, cfg.lambda_r, 10.0 * cfg.lambda_r};
    for (double e : cfg.epsilon_list)
      if (e < 0.0) throw config_error("epsilon values must be >= 0 ueV");
    if (cfg.states.empty())
      for (const char* n : {"psi_x_up", "psi_y_up", "bell_1", "bell_2"})
        cfg.states.push_back({n, named_state(n)});
    if (cfg.time_points < 2) throw config_error("time_points must be >= 2");
    positive(cfg.time_periods, "time_periods");
    for (const std::string& c : cfg.channels) {
      bool known = false;
      for (const std::string& k : known_channels()) known = known || (k == c);
      if (!known) throw config_error("unknown channel '" + c + "'");
    }
  } else if (cfg.command == "avg-sweep") {
    if (cfg.lambda_r_list.empty()) throw config_error("lambda_r_list must be non-empty");
    for (double l : cfg.lambda_r_list) positive(l, "every lambda_r");
    if (cfg.states.empty())
      for (const char* n : {"psi_x_up", "psi_y_up", "bell_1", "bell_2"})
        cfg.states.push_back({n, named_state(n)});
    if (cfg.grid_points < 3 || cfg.grid_points % 2 == 0)
      throw config_error("grid_points must be an odd count >= 3");
    positive(cfg.grid_decades, "grid_decades");
    check_averaging();
  } else if (cfg.command == "ensemble-sweep") {
    positive(cfg.lambda_r, "lambda_r");
    if (cfg.n_members < 2) throw config_error("n must be >= 2");
    if (cfg.sweep_factors.empty()) cfg.sweep_factors = default_sweep_factors();
    for (double f : cfg.sweep_factors) positive(f, "every sweep factor");
    check_averaging();
  } else if (cfg.command == "chsh") {
    positive(cfg.lambda_r, "lambda_r");
    if (cfg.chsh_epsilon < 0.0) throw config_error("epsilon must be >= 0 ueV");
    if (cfg.time_points < 2) throw config_error("time_points must be >= 2");
    positive(cfg.time_periods, "time_periods");
  } else {
    throw config_error("unknown command: " + cfg.command);
  }
}

// Canonical serialization of the effective run parameters; hashed into the
// provenance footer so a data file can be matched to its exact inputs.
inline nlohmann::json effective_config_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["command"] = cfg.command;
  j["format"] = cfg.format;
  j["out"] = cfg.out;
  j["valley"] = cfg.valley;
  if (cfg.command == "eigen-sweep") {
    j["lambda_r_list"] = cfg.lambda_r_list;
    j["epsilon_min"] = cfg.eigen_eps_min;
    j["epsilon_max"] = cfg.eigen_eps_max;
    j["epsilon_points"] = cfg.eigen_points;
  } else if (cfg.command == "dynamics") {
    j["lambda_r"] = cfg.lambda_r;
    j["epsilon_list"] = cfg.epsilon_list;
    j["channels"] = cfg.channels;
    j["time_points"] = cfg.time_points;
    j["time_periods"] = cfg.time_periods;
    for (const auto& s : cfg.states) {
      nlohmann::json js;
      if (s.label != "literal") {
        js = s.label;
      } else {
        js = nlohmann::json::array();
        for (const auto& z : s.state.amp) js.push_back({z.real(), z.imag()});
      }
      j["states"].push_back(js);
    }
  } else if (cfg.command == "avg-sweep") {
    j["lambda_r_list"] = cfg.lambda_r_list;
    j["grid_points"] = cfg.grid_points;
    j["grid_decades"] = cfg.grid_decades;
    j["horizon"] = cfg.averaging.horizon;
    j["samples"] = cfg.averaging.n_samples;
    for (const auto& s : cfg.states) j["states"].push_back(s.label);
  } else if (cfg.command == "ensemble-sweep") {
    j["lambda_r"] = cfg.lambda_r;
    j["n"] = cfg.n_members;
    j["sweep_factors"] = cfg.sweep_factors;
    j["horizon"] = cfg.averaging.horizon;
    j["samples"] = cfg.averaging.n_samples;
    j["seed"] = cfg.seed;
  } else if (cfg.command == "chsh") {
    j["lambda_r"] = cfg.lambda_r;
    j["epsilon"] = cfg.chsh_epsilon;
    j["time_points"] = cfg.time_points;
    j["time_periods"] = cfg.time_periods;
    j["seed"] = cfg.seed;
  }
  return j;
}

inline std::vector<std::string> provenance_footer(const RunConfig& cfg, bool with_seed) {
  std::vector<std::string> f;
  f.push_back(std::string("tool: ") + kToolName + " " + kToolVersion);
  f.push_back("command: " + cfg.command);
  f.push_back("config-hash: " + hex_u64(fnv1a64(effective_config_json(cfg).dump())));
  if (with_seed) f.push_back("seed: " + std::to_string(cfg.seed));
  return f;
}

// ---------------------------------------------------------------------------
// commands

inline ResultTable cmd_eigen_sweep(const RunConfig& cfg) {
  ResultTable t;
  t.columns = {{"lambda_R_ueV", "ueV"},
               {"epsilon_ueV", "ueV"},
               {"concurrence", "1"},
               {"bloch_magnitude", "1"}};
  for (double lam : cfg.lambda_r_list) {
    for (std::size_t i = 0; i < cfg.eigen_points; ++i) {
      const double eps = cfg.eigen_eps_min +
                         (cfg.eigen_eps_max - cfg.eigen_eps_min) * static_cast<double>(i) /
                             static_cast<double>(cfg.eigen_points - 1);
      const EigenSystem sys = analytic_eigensystem({eps, 0.0, lam, +1});
      const SpinorState st{sys.levels[3].state};  // conduction band; all bands agree
      t.add_row({lam, eps, concurrence(st), bloch_vectors(st).spin_norm()});
    }
  }
  t.footer = provenance_footer(cfg, false);
  return t;
}

inline ResultTable cmd_dynamics(const RunConfig& cfg) {
  ResultTable t;
  t.columns = {{"state", "-"},
               {"epsilon_ueV", "ueV"},
               {"t_over_hbar_lambdaR", "1"},
               {"t_ns", "ns"}};
  for (const std::string& c : cfg.channels) t.columns.push_back({c, "1"});

  const double t_end = cfg.time_periods * std::numbers::pi / cfg.lambda_r;
  const TimeGrid grid{0.0, t_end, cfg.time_points};
  for (const StateSpec& sp : cfg.states) {
    for (double eps : cfg.epsilon_list) {
      const Propagator prop({eps, 0.0, cfg.lambda_r, cfg.valley});
      const TimeSeries series = trajectory(prop, sp.state, grid, cfg.channels);
      for (std::size_t i = 0; i < grid.n_samples; ++i) {
        const double ti = grid.at(i);
        std::vector<Cell> row{sp.label, eps, ti * cfg.lambda_r, ti * units::time_unit_ns};
        for (const std::string& c : cfg.channels) row.emplace_back(series.channels.at(c)[i]);
        t.add_row(std::move(row));
      }
    }
  }
  t.footer = provenance_footer(cfg, false);
  return t;
}

// Signed log-symmetric grid: i in [-H, +H] with H = (P-1)/2 maps to
// sign(i + 1/2) * lambda_R * 10^(-D + 2D |i| / H).  Smallest magnitude is
// 10^-D lambda_R: the grid never touches epsilon = 0 exactly.
inline std::vector<double> log_symmetric_grid(double lambda_r, std::size_t points,
                                              double decades) {
  std::vector<double> g(points);
  const long half = static_cast<long>((points - 1) / 2);
  for (long i = -half; i <= half; ++i) {
    const double mag =
        lambda_r * std::pow(10.0, -decades + 2.0 * decades * static_cast<double>(std::labs(i)) /
                                       static_cast<double>(half));
    g[static_cast<std::size_t>(i + half)] = (i + 0.5 > 0 ? mag : -mag);
  }
  return g;
}

inline ResultTable cmd_avg_sweep(const RunConfig& cfg) {
  ResultTable t;
  t.columns = {{"state", "-"},
               {"lambda_R_ueV", "ueV"},
               {"epsilon_ueV", "ueV"},
               {"epsilon_over_lambdaR", "1"},
               {"avg_C", "1"}};

  struct Item {
    std::size_t state_idx, lam_idx, eps_idx;
    double eps_signed;
  };
  std::vector<Item> items;
  std::vector<std::vector<double>> grids;
  for (std::size_t li = 0; li < cfg.lambda_r_list.size(); ++li)
    grids.push_back(log_symmetric_grid(cfg.lambda_r_list[li], cfg.grid_points, cfg.grid_decades));
  for (std::size_t si = 0; si < cfg.states.size(); ++si)
    for (std::size_t li = 0; li < cfg.lambda_r_list.size(); ++li)
      for (std::size_t ei = 0; ei < cfg.grid_points; ++ei)
        items.push_back({si, li, ei, grids[li][ei]});

  std::vector<double> values(items.size());
  detail::parallel_for(items.size(), cfg.effective_threads(), [&](std::size_t k) {
    const Item& it = items[k];
    const Propagator prop({std::abs(it.eps_signed), 0.0, cfg.lambda_r_list[it.lam_idx], +1});
    values[k] = time_averaged_concurrence(prop, cfg.states[it.state_idx].state, cfg.averaging);
  });

  for (std::size_t k = 0; k < items.size(); ++k) {
    const Item& it = items[k];
    const double lam = cfg.lambda_r_list[it.lam_idx];
    t.add_row({cfg.states[it.state_idx].label, lam, it.eps_signed, it.eps_signed / lam,
               values[k]});
  }

  t.footer = provenance_footer(cfg, false);
  // Side channel: detected extremum locations over the positive-epsilon half.
  for (std::size_t si = 0; si < cfg.states.size(); ++si) {
    for (std::size_t li = 0; li < cfg.lambda_r_list.size(); ++li) {
      double best_max = -1.0, best_min = 2.0;
      double at_max = 0.0, at_min = 0.0;
      for (std::size_t k = 0; k < items.size(); ++k) {
        const Item& it = items[k];
        if (it.state_idx != si || it.lam_idx != li || it.eps_signed <= 0.0) continue;
        if (values[k] > best_max) { best_max = values[k]; at_max = it.eps_signed; }
        if (values[k] < best_min) { best_min = values[k]; at_min = it.eps_signed; }
      }
      const double lam = cfg.lambda_r_list[li];
      t.footer.push_back("extremum: state=" + cfg.states[si].label +
                         " lambda_R_ueV=" + format_double(lam) +
                         " argmax_epsilon_over_lambdaR=" + format_double(at_max / lam) +
                         " argmin_epsilon_over_lambdaR=" + format_double(at_min / lam));
    }
  }
  return t;
}

inline ResultTable cmd_ensemble_sweep(const RunConfig& cfg) {
  ResultTable t;
  t.columns = {{"ensemble", "-"},
               {"epsilon_ueV", "ueV"},
               {"epsilon_over_lambdaR", "1"},
               {"mean", "1"},
               {"std_error", "1"},
               {"n", "1"}};

  const unsigned threads = cfg.effective_threads();
  for (Ensemble e : {Ensemble::haar, Ensemble::separable}) {
    for (double f : cfg.sweep_factors) {
      const double eps = f * cfg.lambda_r;
      const ModelParams params{eps, 0.0, cfg.lambda_r, +1};
      const EnsembleStats s =
          ensemble_average(params, e, cfg.n_members, cfg.averaging, cfg.seed, threads);
      t.add_row({std::string(ensemble_name(e)), eps, f, s.mean, s.std_error,
                 static_cast<double>(s.n)});
    }
  }
  // Reference level: concurrence of the Haar members before any evolution,
  // repeated across the sweep so plots can draw it as a horizontal line.
  const EnsembleStats t0 = ensemble_initial_average(Ensemble::haar, cfg.n_members, cfg.seed);
  for (double f : cfg.sweep_factors)
    t.add_row({t0.label, f * cfg.lambda_r, f, t0.mean, t0.std_error,
               static_cast<double>(t0.n)});

  t.footer = provenance_footer(cfg, true);
  return t;
}

inline ResultTable cmd_chsh(const RunConfig& cfg) {
  ResultTable t;
  t.columns = {{"t_over_hbar_lambdaR", "1"},
               {"t_ns", "ns"},
               {"beta_bell_1", "1"},
               {"beta_haar", "1"},
               {"beta_separable", "1"}};

  const SpinorState bell = named_state(NamedState::bell_1);
  const SpinorState haar = ensemble_member(Ensemble::haar, cfg.seed, 0);
  const SpinorState sep = ensemble_member(Ensemble::separable, cfg.seed, 0);

  const Propagator prop({cfg.chsh_epsilon, 0.0, cfg.lambda_r, +1});
  const double t_end = cfg.time_periods * std::numbers::pi / cfg.lambda_r;
  const TimeGrid grid{0.0, t_end, cfg.time_points};
  const std::vector<std::string> chan = {"beta"};
  const TimeSeries sb = trajectory(prop, bell, grid, chan);
  const TimeSeries sh = trajectory(prop, haar, grid, chan);
  const TimeSeries ss = trajectory(prop, sep, grid, chan);

  for (std::size_t i = 0; i < grid.n_samples; ++i) {
    const double ti = grid.at(i);
    t.add_row({ti * cfg.lambda_r, ti * units::time_unit_ns, sb.channels.at("beta")[i],
               sh.channels.at("beta")[i], ss.channels.at("beta")[i]});
  }

  t.footer = provenance_footer(cfg, true);
  const auto amp_line = [](const char* label, const SpinorState& st) {
    std::string s = std::string(label) + ":";
    for (const auto& z : st.amp)
      s += " [" + format_double(z.real()) + "," + format_double(z.imag()) + "]";
    return s;
  };
  t.footer.push_back(amp_line("haar_instance", haar));
  t.footer.push_back(amp_line("separable_instance", sep));
  return t;
}

inline ResultTable run_command(const RunConfig& cfg) {
  if (cfg.command == "eigen-sweep") return cmd_eigen_sweep(cfg);
  if (cfg.command == "dynamics") return cmd_dynamics(cfg);
  if (cfg.command == "avg-sweep") return cmd_avg_sweep(cfg);
  if (cfg.command == "ensemble-sweep") return cmd_ensemble_sweep(cfg);
  if (cfg.command == "chsh") return cmd_chsh(cfg);
  throw config_error("unknown command: " + cfg.command);
}

// ---------------------------------------------------------------------------
// plot scripts (gnuplot, referencing the CSV by the path it was written to)

inline std::string plot_script_text(const RunConfig& cfg, const ResultTable& t) {
  if (cfg.format != "csv")
    throw config_error("plot scripts reference CSV output; use --format csv");
  const std::string& csv = cfg.out;
  std::ostringstream os;
  os << "# gnuplot script generated by " << kToolName << " " << kToolVersion << "\n";
  os << "set datafile separator ','\n";
  os << "set datafile commentschars '#'\n";
  os << "set key spacing 1.2\n";

  if (cfg.command == "eigen-sweep") {
    t.column_index("lambda_R_ueV");
    t.column_index("epsilon_ueV");
    t.column_index("concurrence");
    os << "set xlabel 'energy (ueV)'\n";
    os << "set ylabel 'concurrence'\n";
    os << "set yrange [0:1.05]\n";
    os << "plot";
    bool first = true;
    for (double lam : cfg.lambda_r_list) {
      os << (first ? " " : ", \\\n     ");
      os << "'" << csv << "' using (abs($1-" << format_double(lam)
         << ")<1e-9?$2:NaN):3 with lines title 'lambda_R = " << format_double(lam) << " ueV'";
      first = false;
    }
    os << "\n";
  } else if (cfg.command == "dynamics") {
    t.column_index("state");
    t.column_index("epsilon_ueV");
    t.column_index("t_over_hbar_lambdaR");
    t.column_index("C");
    os << "set multiplot layout " << cfg.epsilon_list.size() + 1 << ",1\n";
    os << "set xlabel 't lambda_R / hbar'\n";
    for (double eps : cfg.epsilon_list) {
      os << "set ylabel 'C'\n";
      os << "set title 'epsilon = " << format_double(eps) << " ueV'\n";
      os << "plot";
      bool first = true;
      for (const auto& sp : cfg.states) {
        os << (first ? " " : ", \\\n     ");
        os << "'" << csv << "' using (strcol(1) eq '" << sp.label << "' && abs($2-"
           << format_double(eps) << ")<1e-9?$3:NaN):5 with lines title '" << sp.label << "'";
        first = false;
      }
      os << "\n";
    }
    os << "set ylabel 'beta'\nset title 'CHSH at 25 meV'\n";
    os << "plot '" << cfg.chsh_csv << "' using 1:3 with lines title 'bell_1', \\\n"
       << "     '" << cfg.chsh_csv << "' using 1:4 with lines title 'haar instance', \\\n"
       << "     '" << cfg.chsh_csv << "' using 1:5 with lines title 'separable instance'\n";
    os << "unset multiplot\n";
  } else if (cfg.command == "avg-sweep") {
    t.column_index("state");
    t.column_index("epsilon_over_lambdaR");
    t.column_index("avg_C");
    os << "set xlabel 'epsilon / lambda_R'\n";
    os << "set ylabel 'time-averaged C'\n";
    os << "set logscale x\n";
    os << "set multiplot layout 2,1\n";
    const char* groups[2][2] = {{"psi_x_up", "psi_y_up"}, {"bell_1", "bell_2"}};
    for (const auto& grp : groups) {
      os << "plot";
      bool first = true;
      for (const char* state : grp) {
        for (double lam : cfg.lambda_r_list) {
          os << (first ? " " : ", \\\n     ");
          os << "'" << csv << "' using (strcol(1) eq '" << state << "' && abs($2-"
             << format_double(lam) << ")<1e-9 && $4>0?$4:NaN):5 with lines title '" << state
             << " lambda_R=" << format_double(lam) << "'";
          first = false;
        }
      }
      os << "\n";
    }
    os << "unset multiplot\n";
  } else if (cfg.command == "ensemble-sweep") {
    t.column_index("ensemble");
    t.column_index("epsilon_over_lambdaR");
    t.column_index("mean");
    os << "set xlabel 'epsilon / lambda_R'\n";
    os << "set ylabel 'ensemble-averaged C'\n";
    os << "set logscale x\n";
    os << "set yrange [0:1]\n";
    os << "plot '" << csv << "' using (strcol(1) eq 'haar'?$3:NaN):4 with linespoints "
       << "title 'haar', \\\n"
       << "     '" << csv << "' using (strcol(1) eq 'separable'?$3:NaN):4 with linespoints "
       << "title 'separable', \\\n"
       << "     '" << csv << "' using (strcol(1) eq 'haar_t0'?$3:NaN):4 with lines dashtype 2 "
       << "title 'haar at t=0'\n";
  } else if (cfg.command == "chsh") {
    t.column_index("t_over_hbar_lambdaR");
    t.column_index("beta_bell_1");
    os << "set xlabel 't lambda_R / hbar'\n";
    os << "set ylabel 'beta'\n";
    os << "set yrange [0.95:1.5]\n";
    os << "plot '" << csv << "' using 1:3 with lines title 'bell_1', \\\n"
       << "     '" << csv << "' using 1:4 with lines title 'haar instance', \\\n"
       << "     '" << csv << "' using 1:5 with lines title 'separable instance', \\\n"
       << "     sqrt(2) with lines dashtype 2 title 'Tsirelson bound'\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// top-level entry used by the CLI tool (and by tests)

inline int run_cli(const std::string& command, const std::optional<std::string>& config_path,
                   const nlohmann::json& overrides) {
  try {
    RunConfig cfg;
    cfg.command = command;
    if (config_path) {
      std::ifstream is(*config_path);
      if (!is) throw io_error("cannot read config file: " + *config_path);
      nlohmann::json doc = nlohmann::json::parse(is, nullptr, false);
      if (doc.is_discarded()) throw config_error("config file is not valid JSON: " + *config_path);
      apply_config_json(cfg, doc);
    }
    apply_config_json(cfg, overrides);
    finalize_config(cfg);

    const ResultTable t = run_command(cfg);

    std::ofstream os(cfg.out, std::ios::binary);
    if (!os) throw io_error("cannot open output file for writing: " + cfg.out);
    if (cfg.format == "csv")
      t.write_csv(os);
    else
      t.write_json(os);
    os.flush();
    if (!os) throw io_error("failed while writing: " + cfg.out);

    if (!cfg.plot_script.empty()) {
      const std::string text = plot_script_text(cfg, t);
      std::ofstream ps(cfg.plot_script, std::ios::binary);
      if (!ps) throw io_error("cannot open plot script for writing: " + cfg.plot_script);
      ps << text;
      if (!ps) throw io_error("failed while writing: " + cfg.plot_script);
    }
    return 0;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const io_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "numeric-domain error: " << e.what() << '\n';
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric-domain error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace dirac
