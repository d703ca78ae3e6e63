#include "perslay/diagram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace perslay {

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::Ord0: return "Ord0";
    case PointKind::Rel1: return "Rel1";
    case PointKind::Ext0: return "Ext0";
    case PointKind::Ext1: return "Ext1";
    case PointKind::H0: return "H0";
    case PointKind::H1: return "H1";
  }
  return "?";
}

std::optional<PointKind> parse_kind(std::string_view text) {
  for (auto k : {PointKind::Ord0, PointKind::Rel1, PointKind::Ext0, PointKind::Ext1, PointKind::H0,
                 PointKind::H1})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

double DiagramPoint::persistence() const { return 0.5 * std::abs(death - birth); }

bool point_less(const DiagramPoint& a, const DiagramPoint& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.birth != b.birth) return a.birth < b.birth;
  return a.death < b.death;
}

PersistenceDiagram PersistenceDiagram::only(PointKind kind) const {
  PersistenceDiagram out;
  out.provenance = provenance;
  for (const auto& p : points)
    if (p.kind == kind) out.points.push_back(p);
  return out;
}

std::size_t PersistenceDiagram::count(PointKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [kind](const DiagramPoint& p) { return p.kind == kind; }));
}

std::vector<DiagramPoint> PersistenceDiagram::sorted_points() const {
  auto pts = points;
  std::sort(pts.begin(), pts.end(), point_less);
  return pts;
}

bool same_multiset(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  return a.sorted_points() == b.sorted_points();
}

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(std::string_view token, int line) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw std::runtime_error("diagram: line " + std::to_string(line) + ": bad number '" +
                             std::string(token) + "'");
  return value;
}

constexpr std::string_view kHeader = "# provenance: ";

}  // namespace

void write_diagram(std::ostream& out, const PersistenceDiagram& dg) {
  out << kHeader << dg.provenance << '\n';
  for (const auto& p : dg.points)
    out << to_string(p.kind) << ' ' << format_double(p.birth) << ' ' << format_double(p.death) << '\n';
}

std::string format_diagram(const PersistenceDiagram& dg) {
  std::ostringstream os;
  write_diagram(os, dg);
  return os.str();
}

PersistenceDiagram read_diagram(std::istream& in) {
  PersistenceDiagram dg;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error("diagram: empty input");
  ++line_no;
  if (line.rfind(kHeader, 0) != 0) throw std::runtime_error("diagram: line 1: missing provenance header");
  dg.provenance = line.substr(kHeader.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind, birth, death, extra;
    if (!(fields >> kind >> birth >> death) || (fields >> extra))
      throw std::runtime_error("diagram: line " + std::to_string(line_no) + ": expected 'kind birth death'");
    const auto k = parse_kind(kind);
    if (!k) throw std::runtime_error("diagram: line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
    dg.points.push_back({parse_double(birth, line_no), parse_double(death, line_no), *k});
  }
  return dg;
}

PersistenceDiagram parse_diagram(const std::string& text) {
  std::istringstream in(text);
  return read_diagram(in);
}

PersistenceDiagram load_diagram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("diagram: cannot open " + path);
  return read_diagram(in);
}

void save_diagram(const std::string& path, const PersistenceDiagram& dg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("diagram: cannot write " + path);
  write_diagram(out, dg);
  if (!out) throw std::runtime_error("diagram: write failed for " + path);
}

}  // namespace perslay
