#pragma once

// Flat key = value configuration for the interference pipeline.
//
//   kernel.family = gaussian | laplace
//   kernel.rho    = <number> | auto | auto-perfold | auto-global | cv
//   xi, beta, I, R, c, ridge (<number> | default), g_convention, seed,
//   x5_mode = mean | sum, drop_x4 = true | false, samples, kde_h (<number> | silverman),
//   t_min, t_max

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "distreg/kernel_embedding.hpp"
#include "distreg/network.hpp"

namespace distreg {

enum class RhoMode { fixed, auto_perfold, auto_global, cv };
enum class X5Mode { mean, sum };

/// Observation window T = {t_min, ..., t_max} in minutes since midnight.
struct TimeWindow {
  int t_min = 0;
  int t_max = 1439;

  bool contains(int t) const noexcept { return t >= t_min && t <= t_max; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct InterferenceConfig {
  double xi = 0.25;
  double beta = 1.0;
  std::size_t I = 5;
  std::size_t R = 5;
  double c = 1.5;
  KernelFamily kernel_family = KernelFamily::gaussian;
  RhoMode rho_mode = RhoMode::auto_perfold;
  double rho = 0.0;  // used when rho_mode == fixed
  std::optional<double> ridge;  // nullopt: 1e-8 * trace / K
  DetourConvention g_convention = DetourConvention::inverted;
  X5Mode x5_mode = X5Mode::mean;
  bool drop_x4 = false;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  std::optional<double> kde_h;  // nullopt: Silverman per coordinate
  TimeWindow window;

  /// Number of input distributions of the network path (5, or 4 without X4).
  std::size_t network_arity() const noexcept { return drop_x4 ? 4 : 5; }
  void validate() const;
};

InterferenceConfig parse_config(const std::string& text);
InterferenceConfig load_config(const std::string& path);
std::string format_config(const InterferenceConfig& cfg);

}  // namespace distreg
