#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace perslay {

/// Point types. Ord0/Rel1/Ext0/Ext1 come from extended persistence on graphs
/// (downward branches, upward branches, components, loops); H0/H1 from
/// ordinary persistence.
enum class PointKind { Ord0, Rel1, Ext0, Ext1, H0, H1 };

inline constexpr PointKind kExtendedKinds[] = {PointKind::Ord0, PointKind::Rel1, PointKind::Ext0,
                                               PointKind::Ext1};
inline constexpr PointKind kOrdinaryKinds[] = {PointKind::H0, PointKind::H1};

std::string_view to_string(PointKind kind);
std::optional<PointKind> parse_kind(std::string_view text);

struct DiagramPoint {
  double birth = 0.0;
  double death = 0.0;
  PointKind kind = PointKind::H0;

  /// Infinity-norm distance to the diagonal.
  double persistence() const;

  friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
};

/// Lexicographic (kind, birth, death) order.
bool point_less(const DiagramPoint& a, const DiagramPoint& b);

/// Multiset of diagram points plus a provenance descriptor.
struct PersistenceDiagram {
  std::vector<DiagramPoint> points;
  std::string provenance;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  PersistenceDiagram only(PointKind kind) const;
  std::size_t count(PointKind kind) const;
  /// Points sorted with point_less, for multiset comparison.
  std::vector<DiagramPoint> sorted_points() const;
};

bool same_multiset(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// Text format: `# provenance: <string>` header, then `kind birth death` per
/// line, coordinates with 17 significant digits.
void write_diagram(std::ostream& out, const PersistenceDiagram& dg);
std::string format_diagram(const PersistenceDiagram& dg);

/// Throws std::runtime_error with the offending line number on malformed input.
PersistenceDiagram read_diagram(std::istream& in);
PersistenceDiagram parse_diagram(const std::string& text);
PersistenceDiagram load_diagram(const std::string& path);
void save_diagram(const std::string& path, const PersistenceDiagram& dg);

}  // namespace perslay
