#include "perslay/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "perslay/metrics.hpp"
#include "perslay/rng.hpp"

namespace perslay {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& file, std::size_t line, const std::string& what) {
  throw std::runtime_error(file + ":" + std::to_string(line) + ": " + what);
}

long parse_long(std::string_view token, const std::string& file, std::size_t line) {
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
    fail(file, line, "expected an integer, got '" + std::string(token) + "'");
  return v;
}

std::ifstream open(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  return in;
}

/// One integer per non-empty line.
std::vector<long> read_column(const fs::path& path) {
  auto in = open(path);
  std::vector<long> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_long(text, path.string(), line));
  }
  return out;
}

}  // namespace

Dataset load_benchmark(const std::string& dir, const std::string& name, LoadReport* report) {
  const fs::path base(dir);
  const auto indicator = read_column(base / (name + "_graph_indicator.txt"));
  const auto raw_labels = read_column(base / (name + "_graph_labels.txt"));
  const std::string ind_file = (base / (name + "_graph_indicator.txt")).string();

  Dataset ds;
  ds.name = name;
  const std::size_t n_graphs = raw_labels.size();
  // Graph of each vertex (0-based) and its local index.
  std::vector<std::size_t> owner(indicator.size()), local(indicator.size());
  std::vector<std::size_t> counts(n_graphs, 0);
  for (std::size_t v = 0; v < indicator.size(); ++v) {
    const long g = indicator[v];
    if (g < 1 || static_cast<std::size_t>(g) > n_graphs)
      fail(ind_file, v + 1, "graph id " + std::to_string(g) + " outside 1.." + std::to_string(n_graphs));
    if (v > 0 && g < indicator[v - 1]) fail(ind_file, v + 1, "graph ids must be non-decreasing");
    owner[v] = static_cast<std::size_t>(g - 1);
    local[v] = counts[owner[v]]++;
  }
  for (std::size_t g = 0; g < n_graphs; ++g) ds.graphs.emplace_back(counts[g]);

  LoadReport rep;
  const fs::path a_path = base / (name + "_A.txt");
  auto in = open(a_path);
  std::set<std::pair<long, long>> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = text.find(',');
    if (comma == std::string::npos) fail(a_path.string(), line, "expected 'u, v'");
    const long a = parse_long(std::string_view(text).substr(0, comma), a_path.string(), line);
    const long b = parse_long(std::string_view(text).substr(comma + 1), a_path.string(), line);
    for (long v : {a, b})
      if (v < 1 || static_cast<std::size_t>(v) > indicator.size())
        fail(a_path.string(), line, "vertex " + std::to_string(v) + " has no graph indicator entry");
    if (a == b) {
      ++rep.self_loops;
      continue;
    }
    if (!seen.insert({a, b}).second) {
      ++rep.duplicates;
      continue;
    }
    if (seen.count({b, a})) {
      ++rep.mirrored;
      continue;
    }
    const std::size_t ga = owner[a - 1], gb = owner[b - 1];
    if (ga != gb) fail(a_path.string(), line, "edge joins two different graphs");
    ds.graphs[ga].add_edge(static_cast<int>(local[a - 1]), static_cast<int>(local[b - 1]));
  }

  // Labels remapped to 0..C-1 in increasing order of the original value.
  std::map<long, std::size_t> remap;
  for (long l : raw_labels) remap.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [raw, id] : remap) {
    id = next++;
    ds.label_names.push_back(std::to_string(raw));
  }
  for (long l : raw_labels) ds.labels.push_back(remap.at(l));

  const fs::path node_path = base / (name + "_node_labels.txt");
  if (fs::exists(node_path)) {
    const auto nl = read_column(node_path);
    if (nl.size() != indicator.size())
      throw std::runtime_error(node_path.string() + ": expected " + std::to_string(indicator.size()) + " lines");
    ds.node_labels.resize(n_graphs);
    for (std::size_t v = 0; v < nl.size(); ++v) ds.node_labels[owner[v]].push_back(nl[v]);
  }
  if (report) *report = rep;
  return ds;
}

std::vector<Point2> generate_orbit(double r, double x0, double y0, std::size_t n) {
  if (!(r > 0.0)) throw std::invalid_argument("generate_orbit: r must be positive");
  std::vector<Point2> out;
  out.reserve(n);
  double x = x0, y = y0;
  for (std::size_t i = 0; i < n; ++i) {
    x = std::fmod(x + r * y * (1.0 - y), 1.0);
    y = std::fmod(y + r * x * (1.0 - x), 1.0);
    out.push_back({x, y});
  }
  return out;
}

Dataset build_orbit_dataset(std::size_t per_class, std::size_t points, std::uint64_t seed) {
  if (per_class == 0 || points == 0) throw std::invalid_argument("build_orbit_dataset: counts must be positive");
  Dataset ds;
  ds.name = "ORBIT";
  Rng rng = Rng::derive(seed, 0x0b17);
  for (std::size_t c = 0; c < 5; ++c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "r=%g", kOrbitRates[c]);
    ds.label_names.push_back(buf);
    for (std::size_t i = 0; i < per_class; ++i) {
      const double x0 = rng.uniform(), y0 = rng.uniform();
      ds.clouds.push_back(generate_orbit(kOrbitRates[c], x0, y0, points));
      ds.labels.push_back(c);
    }
  }
  return ds;
}

void save_orbit_dataset(const std::string& dir, const Dataset& ds) {
  const fs::path base(dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  std::ofstream labels(base / "orbit_labels.txt"), points(base / "orbit_points.txt");
  if (!labels || !points) throw std::runtime_error(dir + ": cannot write orbit dataset");
  char buf[96];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    labels << ds.labels[i] << '\n';
    for (const auto& p : ds.clouds[i]) {
      std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", i, p.x, p.y);
      points << buf;
    }
  }
  labels.flush();
  points.flush();
  if (!labels || !points) throw std::runtime_error(dir + ": write failed");
}

Dataset load_orbit_dataset(const std::string& dir) {
  const fs::path base(dir);
  Dataset ds;
  ds.name = fs::path(dir).filename().string();
  for (long l : read_column(base / "orbit_labels.txt")) {
    if (l < 0 || l >= 5) throw std::runtime_error(dir + ": orbit label out of range");
    ds.labels.push_back(static_cast<std::size_t>(l));
  }
  for (double r : kOrbitRates) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "r=%g", r);
    ds.label_names.push_back(buf);
  }
  ds.clouds.resize(ds.labels.size());
  const fs::path p = base / "orbit_points.txt";
  auto in = open(p);
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream row(text);
    std::size_t item = 0;
    Point2 pt;
    if (!(row >> item >> pt.x >> pt.y) || item >= ds.clouds.size()) fail(p.string(), line, "expected 'item x y'");
    ds.clouds[item].push_back(pt);
  }
  return ds;
}

PersistenceDiagram prom(const PersistenceDiagram& dg, std::size_t k) {
  if (dg.size() <= k) return dg;
  auto pts = dg.points;
  std::sort(pts.begin(), pts.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
    const double da = diagonal_distance(a), db = diagonal_distance(b);
    return da != db ? da > db : point_less(a, b);
  });
  pts.resize(k);
  std::sort(pts.begin(), pts.end(), point_less);
  return PersistenceDiagram{std::move(pts), dg.provenance};
}

}  // namespace perslay
