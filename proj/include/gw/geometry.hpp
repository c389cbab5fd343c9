#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gw/types.hpp"

namespace gw {

// Synthesis parameters. All pixel-valued defaults are stated at canvas 64
// and scale linearly with the canvas edge (scaled(v, canvas) below).
struct LineParams {
  double margin = 4.0;       // keep-out border, px at canvas 64
  double gap_min = 4.0;      // minimum perpendicular spacing, px at canvas 64
  double stroke = 1.0;       // stroke width the raster stage will use
  bool random_direction = true;  // false: horizontal lines
  double length_frac_min = 0.50; // segment length as fraction of usable extent
  double length_frac_max = 0.85;
  int max_attempts = 64;
};

struct RegularPolygonParams {
  double margin = 4.0;
  double r_min = 14.0;       // circumradius lower bound, px at canvas 64
  double center_jitter = 3.0;
};

struct IrregularPolygonParams {
  double margin = 4.0;
  double r_frac_min = 0.55;  // vertex radius as fraction of available radius
  double r_frac_max = 0.98;
  double center_jitter = 2.0;
  double cv_min = 0.1;            // side-length coefficient of variation floor
  double angle_margin_deg = 5.0;  // reject if ALL angles this close to regular
  double min_side = 9.0;          // px at canvas 64
  double min_turn_deg = 22.0;     // reject near-collinear vertices
  double min_apex = 4.0;          // least vertex distance to the neighbours'
                                  // chord, px at canvas 64; keeps every vertex
                                  // far enough off the chord to survive
                                  // curve simplification on the raster side
  int max_attempts = 1000;
};

struct GeometryParams {
  LineParams lines;
  RegularPolygonParams regular;
  IrregularPolygonParams irregular;
};

inline double scaled(double v_at_64, int canvas) { return v_at_64 * canvas / 64.0; }

/// n equal-length, pairwise-parallel, pairwise-disjoint segments sharing one
/// random direction, all inside the canvas margin. Deterministic per seed.
/// Throws InfeasibleCanvas when the spacing constraint cannot be met.
FigureGeometry synth_parallel_lines(int n, int canvas, std::uint64_t seed,
                                    const LineParams& params = {});

/// Ring of n vertices at center + r*(cos, sin)(theta0 + 2*pi*k/n).
/// Throws InfeasibleCanvas when r_min exceeds the available radius.
FigureGeometry synth_regular_polygon(int n, int canvas, std::uint64_t seed,
                                     const RegularPolygonParams& params = {});

/// Simple closed ring of n vertices with side-length CV >= cv_min, produced
/// by rejection sampling: jittered angular gaps (floored by construction)
/// about a jittered centroid with jittered radii, regenerated on
/// near-degeneracy, near-regularity or self-intersection.
/// Throws RejectionBudgetExceeded after max_attempts.
FigureGeometry synth_irregular_polygon(int n, int canvas, std::uint64_t seed,
                                       const IrregularPolygonParams& params = {});

/// Dispatches on spec.cls.
FigureGeometry synth_figure(const FigureSpec& spec, std::uint64_t seed,
                            const GeometryParams& params = {});

/// Checks every class invariant of `geom` against `spec`; returns one short
/// descriptor per failed invariant (empty means valid). Throws ArityMismatch
/// when the segment/vertex count disagrees with spec.n.
std::vector<std::string> validate_geometry(const FigureSpec& spec,
                                           const FigureGeometry& geom,
                                           const GeometryParams& params = {});

/// True when segments [a1,a2] and [b1,b2] intersect (proper or touching).
bool segments_intersect(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2);

/// Shortest distance between two segments.
double segment_distance(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2);

/// True when no pair of non-adjacent ring edges intersects.
bool ring_is_simple(const std::vector<Vec2>& ring);

}  // namespace gw
