#pragma once

#include <vector>

#include "gw/raster.hpp"

namespace gw {

template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using BytePlane = Plane<std::uint8_t>;
using FloatPlane = Plane<float>;

struct GrayImage {
  BytePlane pixels;  // (height, width)

  int width() const { return int(pixels.cols()); }
  int height() const { return int(pixels.rows()); }
};

// Binary mask with the same dimensions as its source image; 1 = edge/foreground.
struct EdgeMap {
  BytePlane mask;

  int width() const { return int(mask.cols()); }
  int height() const { return int(mask.rows()); }
  std::size_t count() const { return std::size_t((mask != 0).count()); }
};

// Ordered chain of pixel coordinates along a component border. Border
// following always closes its loops; `closed=false` marks open chains built
// elsewhere (skeleton paths). `hole=true` marks inner borders.
struct Contour {
  std::vector<Eigen::Vector2i> points;
  bool closed = true;
  bool hole = false;
};

struct ColorCluster {
  Vec3 centroid = Vec3::Zero();
  std::size_t size = 0;
};

struct KMeansResult {
  std::vector<ColorCluster> clusters;
  std::vector<double> sse_per_iter;  // within-cluster SSE after each assignment
  int iterations = 0;
  bool degenerate = false;  // fewer distinct colors than k: exact colors returned
};

enum class DetectedClass { ParallelLines, RegularPolygon, IrregularPolygon, Unknown };

inline const char* to_string(DetectedClass c) {
  switch (c) {
    case DetectedClass::ParallelLines: return "parallel_lines";
    case DetectedClass::RegularPolygon: return "regular_polygon";
    case DetectedClass::IrregularPolygon: return "irregular_polygon";
    case DetectedClass::Unknown: return "unknown";
  }
  return "unknown";
}

struct EvalReport {
  DetectedClass detected_class = DetectedClass::Unknown;
  int detected_n = 0;
  bool regular = false;
  Rgb dominant_rgb;
  Rgb second_rgb;
  int free_edge_count = 0;  // degree-1 skeleton endpoints summed over components
                            // (2 per open stroke; 0 for closed outlines)
  bool exception = false;
  std::vector<std::string> notes;
};

// Pipeline tuning knobs; defaults are calibrated for 64x64 canvases so the
// generator's own output is recovered exactly.
struct EvalParams {
  double blur_sigma = 1.0;
  int blur_ksize = 5;
  double canny_low = 50;
  double canny_high = 150;
  double dp_epsilon = 2.0;
  int kmeans_k = 3;
  double reg_side_cv = 0.08;        // max side-length CV still called regular
  double reg_angle_tol_deg = 10.0;  // max interior-angle deviation, degrees
  int color_linf_tol = 20;
  int min_component_px = 4;
  double parallel_tol_deg = 5.0;  // max pairwise direction spread for lines
  int fg_dist_tol = 40;           // min L-inf distance from background centroid
};

/// Rec. 601 luminance, rounded to bytes.
GrayImage luma(const RasterImage& img);

/// Luminance followed by separable Gaussian smoothing (edge-replicated
/// borders, kernel normalized to 1). Throws BadKernel for even or
/// nonpositive ksize, or nonpositive sigma.
GrayImage gaussian_blur(const RasterImage& img, double sigma, int ksize);

/// Classic edge chain: 3x3 Sobel, gradient-direction non-maximum
/// suppression, hysteresis linking from strong pixels. Throws BadThresholds
/// unless 0 <= low < high.
EdgeMap canny_edges(const GrayImage& gray, double low, double high);

/// One outer border per 8-connected foreground component (Moore neighbor
/// following), plus marked inner borders around enclosed holes. Outer
/// contours precede the hole contours of the same component.
std::vector<Contour> trace_contours(const BytePlane& mask);

/// Douglas-Peucker. Open chains keep both endpoints; closed rings are split
/// at two far-apart anchor vertices so corners survive regardless of where
/// the trace started. epsilon = 0 returns the input unchanged.
Contour simplify_dp(const Contour& contour, double epsilon);

/// Lloyd k-means over RGB triples with farthest-point-weighted seeding.
/// Deterministic per seed. Fewer distinct colors than k yields the exact
/// distinct colors (degenerate = true) instead of an error.
KMeansResult kmeans_rgb(const std::vector<Vec3>& pixels, int k, std::uint64_t seed);

/// Image color clusters ordered by size descending.
std::vector<ColorCluster> dominant_colors(const RasterImage& img, int k, std::uint64_t seed);

/// Zhang-Suen thinning of a binary mask down to 1-px strokes.
BytePlane skeletonize(const BytePlane& mask);

struct SkeletonInfo {
  int endpoints = 0;  // pixels with exactly one skeleton neighbor
  int branches = 0;   // pixels whose neighborhood crossing number is >= 3
  std::vector<Eigen::Vector2i> path;  // endpoint-to-endpoint walk when the
                                      // skeleton is a simple open strand
};

/// Degree census of a skeleton; fills `path` when endpoints==2, branches==0.
SkeletonInfo skeleton_census(const BytePlane& skeleton);

struct ComponentClass {
  enum Kind { OpenSegment, ClosedRing, Exception } kind = Exception;
  int n = 0;  // ring vertex count when kind == ClosedRing
};

/// Decides what a single connected component is. `simplified` is the
/// Douglas-Peucker reduction of the skeleton path (open candidates) or of
/// the outer contour (ring candidates).
ComponentClass classify_component(const Contour& outer, const Contour& simplified,
                                  const SkeletonInfo& skel);

/// Full evaluation pipeline; throws ImageTooSmall below 16x16.
EvalReport analyze_image(const RasterImage& img, const EvalParams& params = {});

}  // namespace gw
