#include "distreg/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

#include "distreg/error.hpp"
#include "distreg/random.hpp"

namespace distreg {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) {
      return out;
    }
    start = pos + 1;
  }
}

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

template <typename T>
T parse_int(const std::string& text, const std::string& field, const std::string& at) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument(at + "'" + field + "' expects an integer, got '" + text + "'");
  }
  return v;
}

double parse_real(const std::string& text, const std::string& field, const std::string& at) {
  if (text == "nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) {
      return v;
    }
  } catch (const std::exception&) {
  }
  throw InvalidArgument(at + "'" + field + "' expects a number, got '" + text + "'");
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// A parsed CSV file: column index by name plus data rows with their line numbers.
struct Table {
  std::string path;
  std::map<std::string, std::size_t> columns;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = columns.find(name);
    if (it == columns.end()) {
      throw InvalidArgument(path + ": missing column '" + name + "'");
    }
    return it->second;
  }
  bool has(const std::string& name) const { return columns.contains(name); }
};

Table read_table(const std::string& path, const std::vector<std::string>& required,
                 const std::vector<std::string>& optional = {}) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open " + path);
  }
  Table t;
  t.path = path;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    auto fields = split(line, ',');
    if (!header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& name = fields[i];
        const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                           std::find(optional.begin(), optional.end(), name) != optional.end();
        if (!known || !t.columns.emplace(name, i).second) {
          throw InvalidArgument(where(path, line_no) + "unexpected header column '" + name + "'");
        }
      }
      for (const auto& name : required) {
        t.column(name);
      }
      header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw InvalidArgument(where(path, line_no) + "expected " + std::to_string(t.columns.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    t.rows.emplace_back(line_no, std::move(fields));
  }
  if (!header) {
    throw InvalidArgument(path + ": missing header");
  }
  return t;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidArgument("cannot write " + path);
  }
  return out;
}

std::optional<int> day_from_filename(const std::string& path) {
  static const std::regex pattern(R"(_(\d+)\.csv$)");
  std::smatch m;
  const std::string name = fs::path(path).filename().string();
  if (std::regex_search(name, m, pattern)) {
    return std::stoi(m[1].str());
  }
  return std::nullopt;
}

void load_journey_file(const std::string& path, std::size_t n_nodes, const TimeWindow& window,
                       std::map<int, std::vector<JourneyRecord>>& out) {
  const Table t = read_table(path, {"origin", "destination", "t_entry", "t_exit"}, {"day"});
  const std::optional<int> file_day = day_from_filename(path);
  if (!t.has("day") && !file_day) {
    throw InvalidArgument(path + ": no day column and no _<day>.csv suffix");
  }
  if (file_day) {
    out[*file_day];
  }
  const std::size_t c_o = t.column("origin");
  const std::size_t c_d = t.column("destination");
  const std::size_t c_in = t.column("t_entry");
  const std::size_t c_out = t.column("t_exit");
  for (const auto& [line_no, f] : t.rows) {
    const std::string at = where(path, line_no);
    JourneyRecord r;
    r.origin = parse_int<NodeId>(f[c_o], "origin", at);
    r.destination = parse_int<NodeId>(f[c_d], "destination", at);
    r.t_entry = parse_int<int>(f[c_in], "t_entry", at);
    r.t_exit = parse_int<int>(f[c_out], "t_exit", at);
    if (n_nodes > 0 && (r.origin >= n_nodes || r.destination >= n_nodes)) {
      throw InvalidArgument(at + "station id out of range");
    }
    if (!window.contains(r.t_entry) || !window.contains(r.t_exit)) {
      throw InvalidArgument(at + "time outside [" + std::to_string(window.t_min) + ", " +
                            std::to_string(window.t_max) + "]");
    }
    if (r.t_exit < r.t_entry) {
      throw InvalidArgument(at + "t_exit before t_entry");
    }
    const int day = t.has("day") ? parse_int<int>(f[t.column("day")], "day", at) : *file_day;
    if (day < 0) {
      throw InvalidArgument(at + "negative day");
    }
    out[day].push_back(r);
  }
}

std::vector<std::vector<int>> all_distances(const Graph& g) {
  std::vector<std::vector<int>> d(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    d[v] = bfs_distance(g, static_cast<NodeId>(v));
  }
  return d;
}

// Standard normal from two counter draws (Box-Muller).
double normal(const CounterRng& rng, std::uint64_t counter) {
  const double u1 = rng.uniform_open0(2 * counter);
  const double u2 = rng.uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t below(std::mt19937_64& eng, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng()) * n) >> 64);
}

// Non-ROI nodes ordered by distance from d, then id.
std::vector<NodeId> fallback_stations(const Graph& g, NodeId d, const std::vector<NodeId>& roi) {
  const std::vector<int> dist = bfs_distance(g, d);
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (dist[v] != kUnreachable &&
        std::find(roi.begin(), roi.end(), static_cast<NodeId>(v)) == roi.end()) {
      out.push_back(static_cast<NodeId>(v));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](NodeId a, NodeId b) { return dist[a] < dist[b]; });
  return out;
}

}  // namespace

std::map<int, std::vector<JourneyRecord>> load_journeys(const std::string& path,
                                                        std::size_t n_nodes,
                                                        const TimeWindow& window) {
  std::map<int, std::vector<JourneyRecord>> out;
  if (fs::is_directory(path)) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.starts_with("journeys") && name.ends_with(".csv")) {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw InvalidArgument(path + ": no journeys*.csv files");
    }
    for (const auto& f : files) {
      load_journey_file(f, n_nodes, window, out);
    }
  } else {
    load_journey_file(path, n_nodes, window, out);
  }
  return out;
}

void write_journeys(const std::string& path, const std::vector<JourneyRecord>& journeys) {
  auto out = open_out(path);
  out << "origin,destination,t_entry,t_exit\n";
  for (const auto& j : journeys) {
    out << j.origin << ',' << j.destination << ',' << j.t_entry << ',' << j.t_exit << '\n';
  }
}

std::vector<Disruption> load_disruptions(const std::string& path) {
  const Table t = read_table(path, {"day", "t_start", "t_end", "roi"});
  std::vector<Disruption> out;
  for (const auto& [line_no, f] : t.rows) {
    const std::string at = where(path, line_no);
    Disruption z;
    z.day = parse_int<int>(f[t.column("day")], "day", at);
    z.t_start = parse_int<int>(f[t.column("t_start")], "t_start", at);
    z.t_end = parse_int<int>(f[t.column("t_end")], "t_end", at);
    std::set<NodeId> seen;
    for (const auto& id : split(f[t.column("roi")], ';')) {
      const NodeId v = parse_int<NodeId>(id, "roi", at);
      if (!seen.insert(v).second) {
        throw InvalidArgument(at + "duplicate roi id " + id);
      }
      z.roi.push_back(v);
    }
    if (z.day < 0 || z.t_start > z.t_end) {
      throw InvalidArgument(at + "invalid day or time range");
    }
    out.push_back(std::move(z));
  }
  return out;
}

void write_disruptions(const std::string& path, const std::vector<Disruption>& disruptions) {
  auto out = open_out(path);
  out << "day,t_start,t_end,roi\n";
  for (const auto& z : disruptions) {
    out << z.day << ',' << z.t_start << ',' << z.t_end << ',';
    for (std::size_t j = 0; j < z.roi.size(); ++j) {
      out << (j ? ";" : "") << z.roi[j];
    }
    out << '\n';
  }
}

Graph load_graph(const std::string& path, std::size_t n_nodes) {
  const Table t = read_table(path, {"u", "v"});
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::size_t needed = 0;
  for (const auto& [line_no, f] : t.rows) {
    const std::string at = where(path, line_no);
    const NodeId u = parse_int<NodeId>(f[t.column("u")], "u", at);
    const NodeId v = parse_int<NodeId>(f[t.column("v")], "v", at);
    needed = std::max<std::size_t>(needed, std::max(u, v) + std::size_t{1});
    edges.emplace_back(u, v);
  }
  if (n_nodes == 0) {
    n_nodes = needed;
  } else if (needed > n_nodes) {
    throw InvalidArgument(path + ": edge endpoint out of range");
  }
  return Graph::from_edges(n_nodes, edges);
}

void write_graph(const std::string& path, const Graph& g) {
  auto out = open_out(path);
  out << "u,v\n";
  for (const auto& [u, v] : g.edges()) {
    out << u << ',' << v << '\n';
  }
}

std::vector<GroundTruthRow> load_ground_truth(const std::string& path) {
  const Table t = read_table(path, {"disruption", "day", "station", "expected_natural",
                                    "expected_perturbed", "retained_fraction"});
  std::vector<GroundTruthRow> out;
  for (const auto& [line_no, f] : t.rows) {
    const std::string at = where(path, line_no);
    GroundTruthRow r;
    r.disruption = parse_int<std::size_t>(f[t.column("disruption")], "disruption", at);
    r.day = parse_int<int>(f[t.column("day")], "day", at);
    r.station = parse_int<NodeId>(f[t.column("station")], "station", at);
    r.expected_natural = parse_real(f[t.column("expected_natural")], "expected_natural", at);
    r.expected_perturbed =
        parse_real(f[t.column("expected_perturbed")], "expected_perturbed", at);
    r.retained_fraction = parse_real(f[t.column("retained_fraction")], "retained_fraction", at);
    out.push_back(r);
  }
  return out;
}

void write_ground_truth(const std::string& path, const std::vector<GroundTruthRow>& rows) {
  auto out = open_out(path);
  out << "disruption,day,station,expected_natural,expected_perturbed,retained_fraction\n";
  for (const auto& r : rows) {
    out << r.disruption << ',' << r.day << ',' << r.station << ',' << format_real(r.expected_natural)
        << ',' << format_real(r.expected_perturbed) << ',' << format_real(r.retained_fraction)
        << '\n';
  }
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::path:
      return "path";
    case Topology::cycle:
      return "cycle";
    case Topology::grid:
      return "grid";
    case Topology::erdos_renyi:
      return "erdos-renyi";
  }
  return "grid";
}

Topology parse_topology(const std::string& name) {
  for (Topology t : {Topology::path, Topology::cycle, Topology::grid, Topology::erdos_renyi}) {
    if (name == to_string(t)) {
      return t;
    }
  }
  throw InvalidArgument("unknown topology '" + name + "' (path, cycle, grid, erdos-renyi)");
}

void SyntheticScenario::validate() const {
  if (nodes < 2 || (topology == Topology::cycle && nodes < 3)) {
    throw InvalidArgument("scenario: too few nodes for the topology");
  }
  if (days < 2) {
    throw InvalidArgument("scenario: need at least 2 days");
  }
  if (disruptions >= days) {
    throw InvalidArgument("scenario: need fewer disruptions than days");
  }
  if (disruptions > 0 && nodes < 3) {
    throw InvalidArgument("scenario: disruptions need at least 3 nodes");
  }
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw InvalidArgument("scenario: phi must be in [0, 1]");
  }
  if (!(rate >= 0.0) || !std::isfinite(rate) || !(decay >= 0.0) || !std::isfinite(decay)) {
    throw InvalidArgument("scenario: rates must be finite and >= 0");
  }
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) {
    throw InvalidArgument("scenario: p must be in (0, 1]");
  }
  if (!(shock_sigma >= 0.0) || !(xi > 0.0)) {
    throw InvalidArgument("scenario: shock_sigma must be >= 0 and xi > 0");
  }
  if (window.t_min < 0 || window.t_min > window.t_max) {
    throw InvalidArgument("scenario: invalid time window");
  }
  if (duration < 1 || duration > window.t_max - window.t_min + 1) {
    throw InvalidArgument("scenario: duration must fit in the time window");
  }
}

SyntheticScenario parse_scenario(const std::string& text) {
  SyntheticScenario s;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    const std::string at = "scenario line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) {
      throw InvalidArgument(at + "expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "topology") {
      s.topology = parse_topology(value);
    } else if (key == "nodes") {
      s.nodes = parse_int<std::size_t>(value, key, at);
    } else if (key == "p") {
      s.edge_probability = parse_real(value, key, at);
    } else if (key == "days") {
      s.days = parse_int<std::size_t>(value, key, at);
    } else if (key == "disruptions") {
      s.disruptions = parse_int<std::size_t>(value, key, at);
    } else if (key == "phi") {
      s.phi = parse_real(value, key, at);
    } else if (key == "rate") {
      s.rate = parse_real(value, key, at);
    } else if (key == "decay") {
      s.decay = parse_real(value, key, at);
    } else if (key == "mode") {
      if (value == "recovery") {
        s.mode = PerturbationMode::recovery;
      } else if (value == "misspecified") {
        s.mode = PerturbationMode::misspecified;
      } else {
        throw InvalidArgument(at + "mode must be recovery or misspecified");
      }
    } else if (key == "shock_sigma") {
      s.shock_sigma = parse_real(value, key, at);
    } else if (key == "duration") {
      s.duration = parse_int<int>(value, key, at);
    } else if (key == "xi") {
      s.xi = parse_real(value, key, at);
    } else if (key == "t_min") {
      s.window.t_min = parse_int<int>(value, key, at);
    } else if (key == "t_max") {
      s.window.t_max = parse_int<int>(value, key, at);
    } else if (key == "seed") {
      s.seed = parse_int<std::uint64_t>(value, key, at);
    } else {
      throw InvalidArgument(at + "unknown key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

SyntheticScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open scenario " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string format_scenario(const SyntheticScenario& s) {
  std::ostringstream out;
  out << "topology = " << to_string(s.topology) << '\n'
      << "nodes = " << s.nodes << '\n'
      << "p = " << format_real(s.edge_probability) << '\n'
      << "days = " << s.days << '\n'
      << "disruptions = " << s.disruptions << '\n'
      << "phi = " << format_real(s.phi) << '\n'
      << "rate = " << format_real(s.rate) << '\n'
      << "decay = " << format_real(s.decay) << '\n'
      << "mode = " << (s.mode == PerturbationMode::recovery ? "recovery" : "misspecified") << '\n'
      << "shock_sigma = " << format_real(s.shock_sigma) << '\n'
      << "duration = " << s.duration << '\n'
      << "xi = " << format_real(s.xi) << '\n'
      << "t_min = " << s.window.t_min << '\n'
      << "t_max = " << s.window.t_max << '\n'
      << "seed = " << s.seed << '\n';
  return out.str();
}

Graph make_topology(const SyntheticScenario& s) {
  const std::size_t n = s.nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  auto add = [&](std::size_t a, std::size_t b) {
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  };
  switch (s.topology) {
    case Topology::path:
    case Topology::cycle:
      for (std::size_t v = 0; v + 1 < n; ++v) {
        add(v, v + 1);
      }
      if (s.topology == Topology::cycle) {
        add(n - 1, 0);
      }
      return Graph::from_edges(n, edges);
    case Topology::grid: {
      std::size_t rows = 1;
      for (std::size_t r = 1; r * r <= n; ++r) {
        if (n % r == 0) {
          rows = r;
        }
      }
      const std::size_t cols = n / rows;
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          if (c + 1 < cols) {
            add(r * cols + c, r * cols + c + 1);
          }
          if (r + 1 < rows) {
            add(r * cols + c, (r + 1) * cols + c);
          }
        }
      }
      return Graph::from_edges(n, edges);
    }
    case Topology::erdos_renyi: {
      std::mt19937_64 eng(mix64(s.seed ^ 0x6772617068ULL));
      for (int attempt = 0; attempt < 1000; ++attempt) {
        edges.clear();
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = a + 1; b < n; ++b) {
            if (static_cast<double>(eng() >> 11) * 0x1.0p-53 < s.edge_probability) {
              add(a, b);
            }
          }
        }
        Graph g = Graph::from_edges(n, edges);
        const auto d = bfs_distance(g, 0);
        if (std::find(d.begin(), d.end(), kUnreachable) == d.end()) {
          return g;
        }
      }
      throw InvalidArgument("erdos-renyi: no connected graph in 1000 draws; raise p");
    }
  }
  throw InvalidArgument("unknown topology");
}

std::vector<DayCounts> Dataset::day_counts(const TimeWindow& window) const {
  std::vector<DayCounts> out;
  out.reserve(journeys.size());
  for (const auto& [day, records] : journeys) {
    out.push_back(aggregate_day(day, records, graph.size(), window));
  }
  return out;
}

std::vector<PerturbedObservation> Dataset::observations(const std::vector<DayCounts>& days) const {
  std::vector<PerturbedObservation> out;
  for (const auto& z : disruptions) {
    const auto it = std::find_if(days.begin(), days.end(),
                                 [&](const DayCounts& dc) { return dc.day == z.day; });
    if (it == days.end()) {
      throw InvalidArgument("no journeys recorded for disruption day " + std::to_string(z.day));
    }
    out.push_back({z, roi_exit_vector(*it, z)});
  }
  return out;
}

Dataset generate_synthetic(const SyntheticScenario& s) {
  s.validate();
  Dataset data;
  data.graph = make_topology(s);
  const Graph& g = data.graph;
  const std::size_t n = g.size();
  const auto dist = all_distances(g);

  std::vector<double> rate(n * n, 0.0);
  for (std::size_t o = 0; o < n; ++o) {
    for (std::size_t d = 0; d < n; ++d) {
      if (o == d) {
        continue;
      }
      if (dist[o][d] == kUnreachable) {
        throw InvalidArgument("synthetic: demand pair " + std::to_string(o) + " -> " +
                              std::to_string(d) + " is disconnected");
      }
      rate[o * n + d] = s.rate * std::exp(-s.decay * static_cast<double>(dist[o][d] - 1));
    }
  }

  const int span = s.window.t_max - s.window.t_min + 1;
  for (std::size_t day = 0; day < s.days; ++day) {
    std::mt19937_64 eng(mix64(s.seed ^ mix64(day + 1)));
    std::vector<JourneyRecord> records;
    for (std::size_t o = 0; o < n; ++o) {
      for (std::size_t d = 0; d < n; ++d) {
        if (rate[o * n + d] <= 0.0) {
          continue;
        }
        std::poisson_distribution<int> count(rate[o * n + d]);
        const int k = count(eng);
        for (int m = 0; m < k; ++m) {
          JourneyRecord r;
          r.origin = static_cast<NodeId>(o);
          r.destination = static_cast<NodeId>(d);
          r.t_exit = s.window.t_min + static_cast<int>(below(eng, static_cast<std::uint64_t>(span)));
          r.t_entry = std::max(s.window.t_min, r.t_exit - 2 * dist[o][d] - 1);
          records.push_back(r);
        }
      }
    }
    std::sort(records.begin(), records.end(), [](const JourneyRecord& a, const JourneyRecord& b) {
      return std::tie(a.t_exit, a.origin, a.destination, a.t_entry) <
             std::tie(b.t_exit, b.origin, b.destination, b.t_entry);
    });
    data.journeys[static_cast<int>(day)] = std::move(records);
  }

  // Disruption days: a random permutation prefix, then day order.
  const CounterRng pick(s.seed, 1);
  std::vector<int> order(s.days);
  for (std::size_t i = 0; i < s.days; ++i) {
    order[i] = static_cast<int>(i);
  }
  std::uint64_t counter = 0;
  for (std::size_t i = s.days - 1; i > 0; --i) {
    std::swap(order[i], order[pick.below(counter++, i + 1)]);
  }
  std::vector<int> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s.disruptions));
  std::sort(chosen.begin(), chosen.end());

  const auto edges = g.edges();
  InterferenceConfig fcfg;
  fcfg.xi = s.xi;
  fcfg.window = s.window;
  const double window_share = static_cast<double>(s.duration) / static_cast<double>(span);
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    const CounterRng rng(s.seed, 100 + k);
    const auto& [a, b] = edges[rng.below(0, edges.size())];
    Disruption z;
    z.day = chosen[k];
    z.t_start = s.window.t_min +
                static_cast<int>(rng.below(1, static_cast<std::uint64_t>(span - s.duration + 1)));
    z.t_end = z.t_start + s.duration - 1;
    z.roi = {a, b};
    const auto feas = origin_feasibility(g, z, fcfg);

    std::vector<double> keep(z.roi.size(), 1.0);
    for (std::size_t j = 0; j < z.roi.size(); ++j) {
      double natural = 0.0;
      double infeasible = 0.0;
      for (std::size_t o = 0; o < n; ++o) {
        natural += rate[o * n + z.roi[j]];
        if (feas[j][o] == 0) {
          infeasible += rate[o * n + z.roi[j]];
        }
      }
      double perturbed = natural - s.phi * infeasible;
      if (s.mode == PerturbationMode::misspecified) {
        keep[j] = std::min(1.0, std::exp(s.shock_sigma * normal(rng, 10 + j) -
                                         0.5 * s.shock_sigma * s.shock_sigma));
        perturbed = natural * keep[j];
      }
      data.ground_truth.push_back({k, z.day, z.roi[j], natural * window_share,
                                   perturbed * window_share,
                                   natural > 0.0 ? perturbed / natural : 1.0});
    }

    std::vector<std::vector<NodeId>> fallback;
    for (NodeId d : z.roi) {
      fallback.push_back(fallback_stations(g, d, z.roi));
    }
    const CounterRng coin(s.seed, 1000 + k);
    auto& records = data.journeys[z.day];
    for (std::size_t m = 0; m < records.size(); ++m) {
      JourneyRecord& r = records[m];
      const auto it = std::find(z.roi.begin(), z.roi.end(), r.destination);
      if (it == z.roi.end() || r.t_exit < z.t_start || r.t_exit > z.t_end) {
        continue;
      }
      const auto j = static_cast<std::size_t>(it - z.roi.begin());
      const bool moved = s.mode == PerturbationMode::recovery
                             ? feas[j][r.origin] == 0 && coin.uniform(m) < s.phi
                             : coin.uniform(m) >= keep[j];
      if (!moved) {
        continue;
      }
      for (NodeId alt : fallback[j]) {
        if (alt != r.origin) {
          r.destination = alt;
          break;
        }
      }
    }
    data.disruptions.push_back(std::move(z));
  }
  return data;
}

void write_model(const std::string& path, const InterferenceModel& model) {
  auto out = open_out(path);
  out << "kernel.family = " << to_string(model.kernel.family()) << '\n'
      << "kernel.rho = " << format_real(model.kernel.rho()) << '\n'
      << "alpha = ";
  for (Eigen::Index i = 0; i < model.mixture.alpha.size(); ++i) {
    out << (i ? "," : "") << format_real(model.mixture.alpha[i]);
  }
  out << '\n';
}

InterferenceModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open model " + path);
  }
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(where(path, line_no) + "expected key = value");
    }
    kv[trim(std::string_view(line).substr(0, eq))] = trim(std::string_view(line).substr(eq + 1));
  }
  for (const char* key : {"kernel.family", "kernel.rho", "alpha"}) {
    if (!kv.contains(key)) {
      throw InvalidArgument(path + ": missing '" + key + "'");
    }
  }
  const auto parts = split(kv["alpha"], ',');
  Eigen::VectorXd alpha(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    alpha[static_cast<Eigen::Index>(i)] = parse_real(parts[i], "alpha", path + ": ");
  }
  if (!alpha.allFinite()) {
    throw InvalidArgument(path + ": non-finite alpha");
  }
  return {MixtureEmbeddingModel{alpha},
          KernelConfig(parse_kernel_family(kv["kernel.family"]),
                       parse_real(kv["kernel.rho"], "kernel.rho", path + ": "))};
}

void write_dataset(const std::string& dir, const Dataset& data) {
  fs::create_directories(dir);
  const fs::path root(dir);
  write_graph((root / "graph.csv").string(), data.graph);
  write_disruptions((root / "disruptions.csv").string(), data.disruptions);
  for (const auto& [day, records] : data.journeys) {
    write_journeys((root / ("journeys_" + std::to_string(day) + ".csv")).string(), records);
  }
  if (!data.ground_truth.empty()) {
    write_ground_truth((root / "ground_truth.csv").string(), data.ground_truth);
  }
}

Dataset load_dataset(const std::string& dir, const TimeWindow& window) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) {
    throw InvalidArgument("data directory " + dir + " does not exist");
  }
  Dataset data;
  data.graph = load_graph((root / "graph.csv").string());
  data.journeys = load_journeys(dir, data.graph.size(), window);
  data.disruptions = load_disruptions((root / "disruptions.csv").string());
  for (std::size_t k = 0; k < data.disruptions.size(); ++k) {
    const Disruption& z = data.disruptions[k];
    try {
      z.validate(data.graph.size(), window);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("disruption " + std::to_string(k) + ": " + e.what());
    }
    if (!data.journeys.contains(z.day)) {
      throw InvalidArgument("disruption " + std::to_string(k) + ": day " +
                            std::to_string(z.day) + " has no journey file");
    }
  }
  if (fs::exists(root / "ground_truth.csv")) {
    data.ground_truth = load_ground_truth((root / "ground_truth.csv").string());
  }
  return data;
}

}  // namespace distreg
