#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cfie/schemes.hpp"

namespace cfie {

enum class ExperimentKind { solve, refine, freq, resonance };

const char* to_string(ExperimentKind kind);

struct ExperimentConfig {
  std::string geometry;  // "cube" or "off"
  double side = 1.0;
  int n = 1;
  std::vector<int> levels{0};
  std::string off;
  std::vector<double> f;
  double alpha = kDefaultAlpha;
  std::vector<SchemeDescriptor> schemes{SchemeDescriptor{}};
  DPhiMode dphi = DPhiMode::jacobi;
  bool compose_dyadic = false;
  double inner_tol = 1e-12;
  double power_tol = 1e-3;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  int restart = 0;
  int max_iter = 1000;
  int branching = 4;
  ExperimentKind experiment = ExperimentKind::solve;
  int refine_peak = 0;
  bool timing = true;
  bool cond = true;
  std::string out = "results";

  bool operator==(const ExperimentConfig&) const = default;

  SchemeOptions scheme_options() const;
};

// Line-based "key = value" with '#' comments. Lists are comma separated;
// f also accepts "lo:hi:count" (linear) and "lo:hi:count:log".
// Throws ParseError naming the key and line.
ExperimentConfig parse_config(std::string_view text);
std::string serialize_config(const ExperimentConfig& config);

// Range checks shared by the parser and the CLI flag path.
void validate_config(const ExperimentConfig& config);

std::vector<double> parse_frequency_list(const std::string& text);

}  // namespace cfie
