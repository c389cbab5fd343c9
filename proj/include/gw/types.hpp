#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gw {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Base class for all toolkit errors; concrete types below carry the
// failure category so callers and tests can catch them individually.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleCanvas : Error { using Error::Error; };
struct RejectionBudgetExceeded : Error { using Error::Error; };
struct ArityMismatch : Error { using Error::Error; };
struct OutOfCanvas : Error { using Error::Error; };
struct DecodeError : Error { using Error::Error; };
struct InapplicableTemplate : Error { using Error::Error; };
struct PoolTooSmall : Error { using Error::Error; };
struct InvalidHoldout : Error { using Error::Error; };
struct BadKernel : Error { using Error::Error; };
struct BadThresholds : Error { using Error::Error; };
struct ImageTooSmall : Error { using Error::Error; };
struct IdMismatch : Error { using Error::Error; };
struct NoScorableItems : Error { using Error::Error; };
struct EmptyManifest : Error { using Error::Error; };
struct InfeasibleConfig : Error { using Error::Error; };
struct NonFiniteGradient : Error { using Error::Error; };
struct UnknownClass : Error { using Error::Error; };

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;

  bool operator==(const Rgb&) const = default;
  Vec3 asVec() const { return Vec3(r, g, b); }
};

inline int linfDistance(const Rgb& a, const Vec3& b) {
  double d = 0;
  d = std::max(d, std::abs(double(a.r) - b.x()));
  d = std::max(d, std::abs(double(a.g) - b.y()));
  d = std::max(d, std::abs(double(a.b) - b.z()));
  return static_cast<int>(d + 0.5);
}

struct PaletteColor {
  std::string name;
  Rgb rgb;
};

using Palette = std::vector<PaletteColor>;

/// Default five-color palette used by the 3-9 world preset (black background).
Palette default_palette();

/// Looks a color up by name; throws Error if absent.
const PaletteColor& palette_lookup(const Palette& palette, const std::string& name);

enum class FigureClass { ParallelLines, RegularPolygon, IrregularPolygon };

inline const char* to_string(FigureClass c) {
  switch (c) {
    case FigureClass::ParallelLines: return "parallel_lines";
    case FigureClass::RegularPolygon: return "regular_polygon";
    case FigureClass::IrregularPolygon: return "irregular_polygon";
  }
  return "unknown";
}

/// Parses both the manifest spelling and short CLI aliases
/// ("lines", "regular", "irregular"). Throws Error on anything else.
FigureClass figure_class_from_string(const std::string& s);

// Symbolic description of one figure: what to draw, not where.
struct FigureSpec {
  FigureClass cls = FigureClass::RegularPolygon;
  int n = 3;           // line count or side count
  std::string color;   // palette name
  int canvas = 64;     // square canvas edge, pixels
};

struct Segment {
  Vec2 a, b;

  Vec2 direction() const { return (b - a).normalized(); }
  double length() const { return (b - a).norm(); }
};

// Continuous-coordinate realization of a figure. Parallel lines populate
// `segments`; polygon classes populate `ring` (closed, no repeated vertex).
struct FigureGeometry {
  FigureClass cls = FigureClass::RegularPolygon;
  std::vector<Segment> segments;
  std::vector<Vec2> ring;

  int arity() const {
    return cls == FigureClass::ParallelLines ? static_cast<int>(segments.size())
                                             : static_cast<int>(ring.size());
  }
};

/// Side lengths of a closed ring, edge k runs ring[k] -> ring[k+1 mod n].
std::vector<double> ring_side_lengths(const std::vector<Vec2>& ring);

/// Interior angle at each ring vertex, degrees.
std::vector<double> ring_interior_angles_deg(const std::vector<Vec2>& ring);

/// Coefficient of variation (stddev / mean) of a sample; 0 for empty input.
double coefficient_of_variation(const std::vector<double>& xs);

}  // namespace gw
