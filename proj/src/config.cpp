#include "distreg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "distreg/error.hpp"

namespace distreg {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value.front() == '-') {
      throw std::invalid_argument(value);
    }
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("config: '" + key + "' expects a non-negative integer, got '" +
                          value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no") {
    return false;
  }
  throw InvalidArgument("config: '" + key + "' expects true or false, got '" + value + "'");
}

std::string rho_mode_name(RhoMode m) {
  switch (m) {
    case RhoMode::fixed:
      return "fixed";
    case RhoMode::auto_perfold:
      return "auto-perfold";
    case RhoMode::auto_global:
      return "auto-global";
    case RhoMode::cv:
      return "cv";
  }
  return "auto-perfold";
}

}  // namespace

void InterferenceConfig::validate() const {
  if (!(xi > 0.0)) {
    throw InvalidArgument("config: xi must be > 0");
  }
  if (!(beta > 0.0)) {
    throw InvalidArgument("config: beta must be > 0");
  }
  if (I < 1) {
    throw InvalidArgument("config: I must be >= 1");
  }
  if (R < 2) {
    throw InvalidArgument("config: R must be >= 2");
  }
  if (!(c > 1.0)) {
    throw InvalidArgument("config: c must be > 1");
  }
  if (rho_mode == RhoMode::fixed && !(rho > 0.0)) {
    throw InvalidArgument("config: kernel.rho must be > 0");
  }
  if (ridge && !(*ridge >= 0.0)) {
    throw InvalidArgument("config: ridge must be >= 0");
  }
  if (samples < 1) {
    throw InvalidArgument("config: samples must be >= 1");
  }
  if (kde_h && !(*kde_h > 0.0)) {
    throw InvalidArgument("config: kde_h must be > 0");
  }
  if (window.t_min > window.t_max) {
    throw InvalidArgument("config: t_min must not exceed t_max");
  }
}

InterferenceConfig parse_config(const std::string& text) {
  InterferenceConfig cfg;
  bool saw_i = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "kernel.family") {
      cfg.kernel_family = parse_kernel_family(value);
    } else if (key == "kernel.rho") {
      if (value == "auto" || value == "auto-perfold") {
        cfg.rho_mode = RhoMode::auto_perfold;
      } else if (value == "auto-global") {
        cfg.rho_mode = RhoMode::auto_global;
      } else if (value == "cv") {
        cfg.rho_mode = RhoMode::cv;
      } else {
        cfg.rho_mode = RhoMode::fixed;
        cfg.rho = parse_double(key, value);
      }
    } else if (key == "xi") {
      cfg.xi = parse_double(key, value);
    } else if (key == "beta") {
      cfg.beta = parse_double(key, value);
    } else if (key == "I") {
      cfg.I = parse_unsigned(key, value);
      saw_i = true;
    } else if (key == "R") {
      cfg.R = parse_unsigned(key, value);
    } else if (key == "c") {
      cfg.c = parse_double(key, value);
    } else if (key == "ridge") {
      cfg.ridge = value == "default" ? std::nullopt : std::optional<double>(parse_double(key, value));
    } else if (key == "g_convention") {
      cfg.g_convention = parse_detour_convention(value);
    } else if (key == "seed") {
      cfg.seed = parse_unsigned(key, value);
    } else if (key == "x5_mode") {
      if (value == "mean") {
        cfg.x5_mode = X5Mode::mean;
      } else if (value == "sum") {
        cfg.x5_mode = X5Mode::sum;
      } else {
        throw InvalidArgument("config: x5_mode must be mean or sum");
      }
    } else if (key == "drop_x4") {
      cfg.drop_x4 = parse_bool(key, value);
    } else if (key == "samples") {
      cfg.samples = parse_unsigned(key, value);
    } else if (key == "kde_h") {
      cfg.kde_h =
          value == "silverman" ? std::nullopt : std::optional<double>(parse_double(key, value));
    } else if (key == "t_min") {
      cfg.window.t_min = static_cast<int>(parse_unsigned(key, value));
    } else if (key == "t_max") {
      cfg.window.t_max = static_cast<int>(parse_unsigned(key, value));
    } else {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  if (!saw_i) {
    cfg.I = cfg.network_arity();
  }
  cfg.validate();
  return cfg;
}

InterferenceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open config file " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const InterferenceConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "kernel.family = " << to_string(cfg.kernel_family) << '\n';
  if (cfg.rho_mode == RhoMode::fixed) {
    out << "kernel.rho = " << cfg.rho << '\n';
  } else {
    out << "kernel.rho = " << rho_mode_name(cfg.rho_mode) << '\n';
  }
  out << "xi = " << cfg.xi << '\n'
      << "beta = " << cfg.beta << '\n'
      << "I = " << cfg.I << '\n'
      << "R = " << cfg.R << '\n'
      << "c = " << cfg.c << '\n';
  if (cfg.ridge) {
    out << "ridge = " << *cfg.ridge << '\n';
  } else {
    out << "ridge = default\n";
  }
  out << "g_convention = " << to_string(cfg.g_convention) << '\n'
      << "x5_mode = " << (cfg.x5_mode == X5Mode::mean ? "mean" : "sum") << '\n'
      << "drop_x4 = " << (cfg.drop_x4 ? "true" : "false") << '\n'
      << "seed = " << cfg.seed << '\n'
      << "samples = " << cfg.samples << '\n';
  if (cfg.kde_h) {
    out << "kde_h = " << *cfg.kde_h << '\n';
  } else {
    out << "kde_h = silverman\n";
  }
  out << "t_min = " << cfg.window.t_min << '\n' << "t_max = " << cfg.window.t_max << '\n';
  return out.str();
}

}  // namespace distreg
