#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vwlab/transport.hpp"

namespace vwlab {

enum class RunMode { Memory, DirectWave, NParticle, Picard, Sweep, Kernels, VpKernel, Validate };
const char* to_string(RunMode m) noexcept;

struct SimulationConfig {
  RunMode mode = RunMode::Memory;
  int d = 1;
  int n = 3;
  std::uint64_t seed = 0;
  TransportSetup transport;
  bool grid_override = false;
  double apriori_radius = 0.0;
  std::string w1_reference = "none";  // none | initial

  PicardOptions picard;

  std::vector<double> sweep_eps;
  double sweep_T_star = 1.0;
  double sweep_window = 0.5;
  int sweep_directions = 64;

  double kernels_t_max = 200.0;
  double kernels_dt = 0.01;
  std::vector<double> kernels_T_list;

  std::vector<double> vp_eps;
  double vp_q_exp = 2.0;

  int particles = 256;

  std::vector<int> validate_criteria;

  std::map<std::string, std::string> resolved;  // every key with its effective value
  std::vector<std::string> hypotheses;          // one line per executed hypothesis check
  std::uint64_t hash = 0;

  // Sorted key = value lines of the resolved configuration.
  std::string canonical_text() const;
  std::string hash_hex() const;
};

// Parses flat "section.key = value" text; overrides are applied after the file, same syntax.
// Unknown keys and malformed values raise Config; violated assumptions raise Hypothesis.
SimulationConfig parse_config_text(std::string_view text, std::string_view overrides = {});
SimulationConfig parse_config_file(const std::string& path, std::string_view overrides = {});

// Keys understood by the parser with their default values.
const std::map<std::string, std::string>& config_defaults();

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace vwlab
