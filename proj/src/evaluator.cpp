#include "gw/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "gw/rng.hpp"

namespace gw {

namespace {

constexpr std::uint64_t kColorSeed = 0x5EED;

// Moore neighborhood, clockwise from east (x right, y down).
const int kCx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
const int kCy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

bool inside(const BytePlane& p, int x, int y) {
  return x >= 0 && y >= 0 && x < p.cols() && y < p.rows();
}

bool fg(const BytePlane& p, int x, int y) { return inside(p, x, y) && p(y, x) != 0; }

int offset_index(const Eigen::Vector2i& c, const Eigen::Vector2i& n) {
  for (int i = 0; i < 8; ++i)
    if (c.x() + kCx[i] == n.x() && c.y() + kCy[i] == n.y()) return i;
  return -1;
}

// Moore-neighbor border following with Jacob's stopping criterion: walk ends
// when the start pixel is re-entered from the original backtrack position.
std::vector<Eigen::Vector2i> moore_trace(const BytePlane& mask, Eigen::Vector2i start,
                                         Eigen::Vector2i backtrack0) {
  std::vector<Eigen::Vector2i> chain{start};
  Eigen::Vector2i cur = start, back = backtrack0;
  const long cap = 4 * long((mask != 0).count()) + 8;
  for (long iter = 0; iter < cap; ++iter) {
    int bi = offset_index(cur, back);
    bool advanced = false;
    for (int k = 1; k <= 8; ++k) {
      int i = (bi + k) % 8;
      Eigen::Vector2i cand(cur.x() + kCx[i], cur.y() + kCy[i]);
      if (fg(mask, cand.x(), cand.y())) {
        back = Eigen::Vector2i(cur.x() + kCx[(bi + k - 1) % 8], cur.y() + kCy[(bi + k - 1) % 8]);
        cur = cand;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;  // isolated pixel
    if (cur == start && back == backtrack0) break;
    chain.push_back(cur);
  }
  return chain;
}

// 8-connected component labels, assigned in scan order starting at 1.
Plane<int> label_components(const BytePlane& mask, int& count) {
  Plane<int> labels = Plane<int>::Zero(mask.rows(), mask.cols());
  count = 0;
  for (int y = 0; y < mask.rows(); ++y)
    for (int x = 0; x < mask.cols(); ++x) {
      if (mask(y, x) == 0 || labels(y, x) != 0) continue;
      ++count;
      std::deque<Eigen::Vector2i> queue{{x, y}};
      labels(y, x) = count;
      while (!queue.empty()) {
        auto p = queue.front();
        queue.pop_front();
        for (int i = 0; i < 8; ++i) {
          int nx = p.x() + kCx[i], ny = p.y() + kCy[i];
          if (fg(mask, nx, ny) && labels(ny, nx) == 0) {
            labels(ny, nx) = count;
            queue.push_back({nx, ny});
          }
        }
      }
    }
  return labels;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

void dp_recurse(const std::vector<Eigen::Vector2i>& pts, std::size_t i, std::size_t j,
                double eps, std::vector<bool>& keep) {
  if (j <= i + 1) return;
  Vec2 a = pts[i].cast<double>(), b = pts[j].cast<double>();
  double worst = -1;
  std::size_t worst_k = i;
  for (std::size_t k = i + 1; k < j; ++k) {
    double d = point_segment_distance(pts[k].cast<double>(), a, b);
    if (d > worst) {
      worst = d;
      worst_k = k;
    }
  }
  if (worst > eps) {
    keep[worst_k] = true;
    dp_recurse(pts, i, worst_k, eps, keep);
    dp_recurse(pts, worst_k, j, eps, keep);
  }
}

std::vector<Eigen::Vector2i> dp_open(const std::vector<Eigen::Vector2i>& pts, double eps) {
  if (pts.size() <= 2) return pts;
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  dp_recurse(pts, 0, pts.size() - 1, eps, keep);
  std::vector<Eigen::Vector2i> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(pts[i]);
  return out;
}

// Neighbor values p2..p9 clockwise from north, matching the thinning
// literature's numbering (y down: north is y-1).
void neighbors9(const BytePlane& m, int x, int y, int p[8]) {
  p[0] = fg(m, x, y - 1);      // p2 N
  p[1] = fg(m, x + 1, y - 1);  // p3 NE
  p[2] = fg(m, x + 1, y);      // p4 E
  p[3] = fg(m, x + 1, y + 1);  // p5 SE
  p[4] = fg(m, x, y + 1);      // p6 S
  p[5] = fg(m, x - 1, y + 1);  // p7 SW
  p[6] = fg(m, x - 1, y);      // p8 W
  p[7] = fg(m, x - 1, y - 1);  // p9 NW
}

int transitions(const int p[8]) {
  int a = 0;
  for (int i = 0; i < 8; ++i) a += (p[i] == 0 && p[(i + 1) % 8] == 1);
  return a;
}

Rgb round_rgb(const Vec3& v) {
  auto clamp_byte = [](double x) {
    return std::uint8_t(std::clamp(std::lround(x), 0L, 255L));
  };
  return {clamp_byte(v.x()), clamp_byte(v.y()), clamp_byte(v.z())};
}

double direction_angle_deg(const Eigen::Vector2i& a, const Eigen::Vector2i& b) {
  double th = std::atan2(double(b.y() - a.y()), double(b.x() - a.x())) * 180.0 / M_PI;
  while (th < 0) th += 180.0;
  while (th >= 180.0) th -= 180.0;
  return th;
}

double angle_spread_deg(double a, double b) {
  double d = std::abs(a - b);
  return std::min(d, 180.0 - d);
}

// Two 1-px strokes meeting at an acute corner can enclose a stray background
// pixel; such pinholes turn a clean loop's skeleton into a tangle. Fill any
// enclosed background region of at most `max_px` pixels (the dual of speck
// removal). Genuine shape interiors are orders of magnitude larger.
void fill_pinholes(BytePlane& mask, int max_px) {
  const int w = int(mask.cols()), h = int(mask.rows());
  BytePlane outside = BytePlane::Zero(h, w);
  std::deque<Eigen::Vector2i> queue;
  auto seed = [&](int x, int y) {
    if (mask(y, x) == 0 && !outside(y, x)) {
      outside(y, x) = 1;
      queue.push_back({x, y});
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  const int ox[4] = {1, -1, 0, 0}, oy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    auto p = queue.front();
    queue.pop_front();
    for (int i = 0; i < 4; ++i) {
      int nx = p.x() + ox[i], ny = p.y() + oy[i];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      if (mask(ny, nx) == 0 && !outside(ny, nx)) {
        outside(ny, nx) = 1;
        queue.push_back({nx, ny});
      }
    }
  }
  BytePlane seen = BytePlane::Zero(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (mask(y, x) != 0 || outside(y, x) || seen(y, x)) continue;
      std::vector<Eigen::Vector2i> region{{x, y}};
      seen(y, x) = 1;
      for (std::size_t head = 0; head < region.size(); ++head) {
        auto p = region[head];
        for (int i = 0; i < 4; ++i) {
          int nx = p.x() + ox[i], ny = p.y() + oy[i];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (mask(ny, nx) == 0 && !outside(ny, nx) && !seen(ny, nx)) {
            seen(ny, nx) = 1;
            region.push_back({nx, ny});
          }
        }
      }
      if (int(region.size()) <= max_px)
        for (const auto& p : region) mask(p.y(), p.x()) = 1;
    }
}

// Drop ring vertices lying within epsilon of their neighbours' chord,
// least-deviating first. A hierarchical split can retain a point that deeper
// splits made redundant; corner refinement can likewise leave a former flank
// vertex sitting on what is now a straight side.
void merge_ring_vertices(std::vector<Eigen::Vector2i>& verts, double epsilon) {
  while (verts.size() > 3) {
    const std::size_t n = verts.size();
    double min_dev = std::numeric_limits<double>::max();
    std::size_t min_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = verts[(i + n - 1) % n].cast<double>();
      const Vec2 b = verts[(i + 1) % n].cast<double>();
      double d = point_segment_distance(verts[i].cast<double>(), a, b);
      if (d < min_dev) {
        min_dev = d;
        min_i = i;
      }
    }
    if (min_dev > epsilon) break;
    verts.erase(verts.begin() + long(min_i));
  }
}

// Cyclic subsequence match: index of each vertex along the contour, walking
// forward from the first vertex's first occurrence. Empty when verts is not a
// cyclic subsequence of contour.
std::vector<std::size_t> match_ring_indices(const std::vector<Eigen::Vector2i>& contour,
                                            const std::vector<Eigen::Vector2i>& verts) {
  const std::size_t n = verts.size(), m = contour.size();
  std::vector<std::size_t> idx(n);
  std::size_t j0 = 0;
  while (j0 < m && contour[j0] != verts[0]) ++j0;
  if (j0 == m) return {};
  idx[0] = j0;
  std::size_t j = j0 + 1;
  for (std::size_t i = 1; i < n; ++i) {
    while (j < j0 + m && contour[j % m] != verts[i]) ++j;
    if (j == j0 + m) return {};
    idx[i] = j % m;
    ++j;
  }
  return idx;
}

// Total-least-squares line through a point set: mean + dominant covariance
// eigenvector.
struct FitLine {
  Vec2 p, d;
};

FitLine fit_line_tls(const std::vector<Vec2>& pts) {
  Vec2 mu = Vec2::Zero();
  for (const auto& q : pts) mu += q;
  mu /= double(pts.size());
  double cxx = 0, cxy = 0, cyy = 0;
  for (const auto& q : pts) {
    Vec2 r = q - mu;
    cxx += r.x() * r.x();
    cxy += r.x() * r.y();
    cyy += r.y() * r.y();
  }
  double theta = 0.5 * std::atan2(2 * cxy, cxx - cyy);
  return {mu, Vec2(std::cos(theta), std::sin(theta))};
}

// Staircase boundaries quantize corners to whole pixels, which is too coarse
// for side-length statistics on small shapes. Recover subpixel corners by
// fitting a line to the contour run along each side (trimming the
// corner-contaminated ends) and intersecting consecutive side lines. Two
// artifact repairs run first: sides whose contour run is too short to be a
// genuine side (corner chamfers) are deleted so their neighbours intersect at
// the restored apex, and consecutive near-parallel sides (one staircase edge
// split in two) are merged and refitted. Returns empty when any guard trips;
// callers then keep the whole-pixel vertices.
std::vector<Vec2> fit_ring_subpixel(const std::vector<Eigen::Vector2i>& contour,
                                    const std::vector<Eigen::Vector2i>& verts) {
  constexpr double kParallelDeg = 10.0;   // below: same side split by a stair
  constexpr std::size_t kMinSideArc = 5;  // below: chamfer artifact, not a side
  const std::size_t n = verts.size(), m = contour.size();
  if (n < 3 || m < 12) return {};
  auto idx = match_ring_indices(contour, verts);
  if (idx.empty()) return {};

  std::vector<std::vector<Vec2>> arcs(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = idx[i], b = idx[(i + 1) % n];
    std::size_t len = (b + m - a) % m + 1;
    std::size_t trim = len >= 12 ? 3 : len >= 8 ? 2 : len >= 5 ? 1 : 0;
    for (std::size_t k = trim; k < len - trim; ++k)
      arcs[i].push_back(contour[(a + k) % m].cast<double>());
    if (arcs[i].size() < 2) return {};
  }

  std::vector<FitLine> lines;
  lines.reserve(n);
  for (const auto& a : arcs) lines.push_back(fit_line_tls(a));

  auto angle_between = [](const Vec2& u, const Vec2& v) {
    double c = std::abs(u.dot(v)) / (u.norm() * v.norm());
    return std::acos(std::clamp(c, 0.0, 1.0)) * 180.0 / M_PI;
  };
  for (std::size_t guard = 0; guard < 2 * n + 4; ++guard) {
    const std::size_t cnt = arcs.size();
    if (cnt < 3) return {};
    bool acted = false;
    for (std::size_t i = 0; i < cnt; ++i) {
      std::size_t j = (i + 1) % cnt;
      if (angle_between(lines[i].d, lines[j].d) < kParallelDeg) {
        arcs[i].insert(arcs[i].end(), arcs[j].begin(), arcs[j].end());
        lines[i] = fit_line_tls(arcs[i]);
        arcs.erase(arcs.begin() + long(j));
        lines.erase(lines.begin() + long(j));
        acted = true;
        break;
      }
    }
    if (acted) continue;
    for (std::size_t i = 0; i < cnt; ++i)
      if (arcs[i].size() < kMinSideArc) {
        arcs.erase(arcs.begin() + long(i));
        lines.erase(lines.begin() + long(i));
        acted = true;
        break;
      }
    if (acted) continue;
    // A side whose pixels all sit inside the junction zone of its neighbours
    // is a cut-off corner, not a side: deleting it lets the neighbours
    // intersect at the restored apex. Real sides extend well past any corner.
    for (std::size_t i = 0; i < cnt && cnt > 3; ++i) {
      const FitLine& l0 = lines[(i + cnt - 1) % cnt];
      const FitLine& l1 = lines[(i + 1) % cnt];
      double cross = l0.d.x() * l1.d.y() - l0.d.y() * l1.d.x();
      if (std::abs(cross) < 0.15) continue;
      Vec2 dp = l1.p - l0.p;
      double t = (dp.x() * l1.d.y() - dp.y() * l1.d.x()) / cross;
      Vec2 apex = l0.p + t * l0.d;
      double maxd = 0;
      for (const auto& q : arcs[i]) maxd = std::max(maxd, (q - apex).norm());
      if (maxd <= 4.0) {
        arcs.erase(arcs.begin() + long(i));
        lines.erase(lines.begin() + long(i));
        acted = true;
        break;
      }
    }
    if (!acted) break;
  }
  const std::size_t cnt = arcs.size();
  if (cnt < 3) return {};

  Vec2 lo = contour[0].cast<double>(), hi = lo;
  for (const auto& p : contour) {
    lo = lo.cwiseMin(p.cast<double>());
    hi = hi.cwiseMax(p.cast<double>());
  }
  auto intersect_all = [&](const std::vector<FitLine>& ls, std::vector<Vec2>& out) {
    const std::size_t k = ls.size();
    out.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const FitLine& l1 = ls[(i + k - 1) % k];
      const FitLine& l2 = ls[i];
      double cross = l1.d.x() * l2.d.y() - l1.d.y() * l2.d.x();
      if (std::abs(cross) < 0.15) return false;
      Vec2 dp = l2.p - l1.p;
      double t = (dp.x() * l2.d.y() - dp.y() * l2.d.x()) / cross;
      out[i] = l1.p + t * l1.d;
      if ((out[i].array() < lo.array() - 6).any() || (out[i].array() > hi.array() + 6).any())
        return false;
    }
    return true;
  };

  std::vector<Vec2> out;
  if (!intersect_all(lines, out)) return {};

  // The trims above discard a third of a short side. With corners now located,
  // give every contour pixel back to its nearest side and refit, so each line
  // uses the side's full run (corner-adjacent pixels settle on whichever side
  // they are actually closest to).
  for (int iter = 0; iter < 2; ++iter) {
    std::vector<std::vector<Vec2>> buckets(cnt);
    for (const auto& ip : contour) {
      Vec2 p = ip.cast<double>();
      double best = std::numeric_limits<double>::max();
      std::size_t bi = 0;
      for (std::size_t i = 0; i < cnt; ++i) {
        double d = point_segment_distance(p, out[i], out[(i + 1) % cnt]);
        if (d < best) {
          best = d;
          bi = i;
        }
      }
      buckets[bi].push_back(p);
    }
    for (std::size_t i = 0; i < cnt; ++i)
      if (buckets[i].size() >= 2) lines[i] = fit_line_tls(buckets[i]);
    if (!intersect_all(lines, out)) return {};
  }
  return out;
}

// Thinning leaves short stubs at sharp corners; they read as junctions and
// would veto an otherwise clean loop. While the skeleton holds any junction
// pixel, erode all tips (degree <= 1) simultaneously, up to `budget` rounds:
// stubs vanish tip-first and the junction relaxes to an ordinary path pixel.
// Components without junction pixels are returned untouched, so genuine open
// strands keep their endpoints and their full length.
BytePlane prune_spurs(const BytePlane& skeleton, int budget) {
  BytePlane cur = skeleton;
  const int w = int(cur.cols()), h = int(cur.rows());
  auto has_junction = [&] {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!cur(y, x)) continue;
        int p[8];
        neighbors9(cur, x, y, p);
        if (transitions(p) >= 3) return true;
      }
    return false;
  };

  for (int round = 0; round < budget; ++round) {
    if (!has_junction()) break;
    bool changed = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!cur(y, x)) continue;
        int p[8];
        neighbors9(cur, x, y, p);
        // Tips (degree <= 1) erode; so do corner fills whose whole
        // neighborhood is one contiguous arc (crossing number 1), which tip
        // erosion alone exposes but cannot remove. In-place scan order lets
        // one round consume a chain of each.
        if (std::accumulate(p, p + 8, 0) <= 1 || transitions(p) == 1) {
          cur(y, x) = 0;
          changed = true;
        }
      }
    if (!changed) break;
  }
  return cur;
}

// Douglas-Peucker places a ring vertex anywhere within epsilon of the true
// corner, and on short sides that error dominates the side-length statistics.
// Snap each vertex to the contour point between its neighbours that lies
// farthest from their chord (the corner of a convex arc), iterating so the
// chord endpoints settle too. `verts` must be a cyclic subsequence of
// `contour`; if the match fails the input is left unchanged.
void refine_ring_vertices(const std::vector<Eigen::Vector2i>& contour,
                          std::vector<Eigen::Vector2i>& verts) {
  const std::size_t n = verts.size(), m = contour.size();
  if (n < 3 || m < 4) return;
  auto idx = match_ring_indices(contour, verts);
  if (idx.empty()) return;

  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + n - 1) % n, in = (i + 1) % n;
      const Vec2 a = verts[ip].cast<double>(), b = verts[in].cast<double>();
      double best = -1;
      std::size_t bi = idx[i];
      for (std::size_t t = (idx[ip] + 1) % m; t != idx[in]; t = (t + 1) % m) {
        double d = point_segment_distance(contour[t].cast<double>(), a, b);
        if (d > best) {
          best = d;
          bi = t;
        }
      }
      if (best >= 0) {
        idx[i] = bi;
        verts[i] = contour[bi];
      }
    }
  }
}

}  // namespace

GrayImage luma(const RasterImage& img) {
  GrayImage out;
  out.pixels.resize(img.height, img.width);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      Rgb px = img.at(x, y);
      double v = 0.299 * px.r + 0.587 * px.g + 0.114 * px.b;
      out.pixels(y, x) = std::uint8_t(std::lround(v));
    }
  return out;
}

GrayImage gaussian_blur(const RasterImage& img, double sigma, int ksize) {
  if (ksize <= 0 || ksize % 2 == 0)
    throw BadKernel("kernel size must be odd and positive, got " + std::to_string(ksize));
  if (!(sigma > 0)) throw BadKernel("sigma must be positive");

  std::vector<double> kernel(std::size_t(ksize), 0.0);
  int c = ksize / 2;
  double sum = 0;
  for (int i = 0; i < ksize; ++i) {
    kernel[std::size_t(i)] = std::exp(-0.5 * (i - c) * (i - c) / (sigma * sigma));
    sum += kernel[std::size_t(i)];
  }
  for (double& w : kernel) w /= sum;

  GrayImage g = luma(img);
  const int w = g.width(), h = g.height();
  FloatPlane tmp(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = 0; i < ksize; ++i)
        acc += kernel[std::size_t(i)] * g.pixels(y, std::clamp(x + i - c, 0, w - 1));
      tmp(y, x) = float(acc);
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = 0; i < ksize; ++i)
        acc += kernel[std::size_t(i)] * tmp(std::clamp(y + i - c, 0, h - 1), x);
      out(y, x) = float(acc);
    }

  GrayImage res;
  res.pixels.resize(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      res.pixels(y, x) = std::uint8_t(std::clamp<long>(std::lround(out(y, x)), 0, 255));
  return res;
}

EdgeMap canny_edges(const GrayImage& gray, double low, double high) {
  if (!(low >= 0) || !(low < high))
    throw BadThresholds("need 0 <= low < high, got " + std::to_string(low) + ", " +
                        std::to_string(high));
  const int w = gray.width(), h = gray.height();
  FloatPlane mag = FloatPlane::Zero(h, w);
  Plane<int> dir = Plane<int>::Zero(h, w);

  auto px = [&](int x, int y) {
    return double(gray.pixels(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1)));
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double gx = -px(x - 1, y - 1) + px(x + 1, y - 1) - 2 * px(x - 1, y) + 2 * px(x + 1, y) -
                  px(x - 1, y + 1) + px(x + 1, y + 1);
      double gy = -px(x - 1, y - 1) - 2 * px(x, y - 1) - px(x + 1, y - 1) +
                  px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1);
      mag(y, x) = float(std::hypot(gx, gy));
      double theta = std::atan2(gy, gx) * 180.0 / M_PI;
      if (theta < 0) theta += 180.0;
      if (theta >= 157.5) theta -= 180.0;
      int d = theta < 22.5 ? 0 : theta < 67.5 ? 1 : theta < 112.5 ? 2 : 3;
      dir(y, x) = d;
    }

  // Gradient-aligned neighbor offsets per quantized direction.
  const int fx[4] = {1, 1, 0, -1}, fy[4] = {0, 1, 1, 1};
  auto mag_at = [&](int x, int y) {
    return (x >= 0 && y >= 0 && x < w && y < h) ? double(mag(y, x)) : 0.0;
  };

  // Keep a pixel only when it strictly beats its backward neighbor and at
  // least ties its forward neighbor, so a plateau keeps exactly one side.
  BytePlane nms = BytePlane::Zero(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (mag(y, x) <= 0) continue;
      int d = dir(y, x);
      double fwd = mag_at(x + fx[d], y + fy[d]);
      double bwd = mag_at(x - fx[d], y - fy[d]);
      if (mag(y, x) > bwd && mag(y, x) >= fwd) nms(y, x) = 1;
    }

  EdgeMap em;
  em.mask = BytePlane::Zero(h, w);
  std::deque<Eigen::Vector2i> queue;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (nms(y, x) && mag(y, x) >= high) {
        em.mask(y, x) = 1;
        queue.push_back({x, y});
      }
  while (!queue.empty()) {
    auto p = queue.front();
    queue.pop_front();
    for (int i = 0; i < 8; ++i) {
      int nx = p.x() + kCx[i], ny = p.y() + kCy[i];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      if (em.mask(ny, nx) || !nms(ny, nx) || mag(ny, nx) < low) continue;
      em.mask(ny, nx) = 1;
      queue.push_back({nx, ny});
    }
  }
  return em;
}

std::vector<Contour> trace_contours(const BytePlane& mask) {
  const int w = int(mask.cols()), h = int(mask.rows());
  int count = 0;
  Plane<int> labels = label_components(mask, count);
  if (count == 0) return {};

  // Outer border per component, keyed by label.
  std::vector<Contour> outers;
  outers.resize(std::size_t(count));
  std::vector<bool> seen(std::size_t(count), false);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int lb = labels(y, x);
      if (lb == 0 || seen[std::size_t(lb - 1)]) continue;
      seen[std::size_t(lb - 1)] = true;
      Contour c;
      c.points = moore_trace(mask, {x, y}, {x - 1, y});
      c.closed = true;
      c.hole = false;
      outers[std::size_t(lb - 1)] = std::move(c);
    }

  // Background reachable from the border; anything else is a hole.
  BytePlane outside = BytePlane::Zero(h, w);
  std::deque<Eigen::Vector2i> queue;
  for (int x = 0; x < w; ++x) {
    for (int y : {0, h - 1})
      if (mask(y, x) == 0 && !outside(y, x)) {
        outside(y, x) = 1;
        queue.push_back({x, y});
      }
  }
  for (int y = 0; y < h; ++y) {
    for (int x : {0, w - 1})
      if (mask(y, x) == 0 && !outside(y, x)) {
        outside(y, x) = 1;
        queue.push_back({x, y});
      }
  }
  const int ox[4] = {1, -1, 0, 0}, oy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    auto p = queue.front();
    queue.pop_front();
    for (int i = 0; i < 4; ++i) {
      int nx = p.x() + ox[i], ny = p.y() + oy[i];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      if (mask(ny, nx) == 0 && !outside(ny, nx)) {
        outside(ny, nx) = 1;
        queue.push_back({nx, ny});
      }
    }
  }

  std::vector<std::vector<Contour>> holes;
  holes.resize(std::size_t(count));
  BytePlane hole_seen = BytePlane::Zero(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (mask(y, x) != 0 || outside(y, x) || hole_seen(y, x)) continue;
      // Flood this hole (4-connected) so it is traced once.
      std::deque<Eigen::Vector2i> hq{{x, y}};
      hole_seen(y, x) = 1;
      while (!hq.empty()) {
        auto p = hq.front();
        hq.pop_front();
        for (int i = 0; i < 4; ++i) {
          int nx = p.x() + ox[i], ny = p.y() + oy[i];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (mask(ny, nx) == 0 && !outside(ny, nx) && !hole_seen(ny, nx)) {
            hole_seen(ny, nx) = 1;
            hq.push_back({nx, ny});
          }
        }
      }
      // The pixel above a hole's first scan-order pixel is always foreground.
      Eigen::Vector2i s(x, y - 1);
      Contour c;
      c.points = moore_trace(mask, s, {x, y});
      c.closed = true;
      c.hole = true;
      holes[std::size_t(labels(s.y(), s.x()) - 1)].push_back(std::move(c));
    }

  std::vector<Contour> all;
  for (int i = 0; i < count; ++i) {
    all.push_back(std::move(outers[std::size_t(i)]));
    for (auto& hc : holes[std::size_t(i)]) all.push_back(std::move(hc));
  }
  return all;
}

Contour simplify_dp(const Contour& contour, double epsilon) {
  if (epsilon < 0) throw Error("simplify_dp: negative epsilon");
  if (epsilon == 0 || contour.points.size() <= 2) return contour;

  Contour out;
  out.closed = contour.closed;
  out.hole = contour.hole;
  const auto& pts = contour.points;

  if (!contour.closed) {
    out.points = dp_open(pts, epsilon);
    return out;
  }

  if (pts.size() <= 3) {
    out.points = pts;
    return out;
  }

  // Rings have no natural endpoints; anchor at the vertex farthest from the
  // centroid and the vertex farthest from that one, so true corners survive
  // wherever the trace happened to start.
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : pts) centroid += p.cast<double>();
  centroid /= double(pts.size());
  std::size_t ia = 0;
  double best = -1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = (pts[i].cast<double>() - centroid).squaredNorm();
    if (d > best) {
      best = d;
      ia = i;
    }
  }
  std::size_t ib = ia;
  best = -1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = (pts[i].cast<double>() - pts[ia].cast<double>()).squaredNorm();
    if (d > best) {
      best = d;
      ib = i;
    }
  }

  auto arc = [&](std::size_t from, std::size_t to) {
    std::vector<Eigen::Vector2i> chain;
    for (std::size_t i = from; ; i = (i + 1) % pts.size()) {
      chain.push_back(pts[i]);
      if (i == to) break;
    }
    return chain;
  };
  auto s1 = dp_open(arc(ia, ib), epsilon);
  auto s2 = dp_open(arc(ib, ia), epsilon);
  out.points = std::move(s1);
  out.points.insert(out.points.end(), s2.begin() + 1, s2.end() - 1);

  merge_ring_vertices(out.points, epsilon);
  return out;
}

KMeansResult kmeans_rgb(const std::vector<Vec3>& pixels, int k, std::uint64_t seed) {
  if (k < 2) throw Error("kmeans_rgb: k must be >= 2");
  if (pixels.empty()) throw Error("kmeans_rgb: no pixels");

  // Exact-count path when the palette is already smaller than k.
  std::map<std::array<double, 3>, std::size_t> hist;
  for (const auto& p : pixels) hist[{p.x(), p.y(), p.z()}]++;
  KMeansResult res;
  if (int(hist.size()) < k) {
    for (const auto& [rgb, n] : hist)
      res.clusters.push_back({Vec3(rgb[0], rgb[1], rgb[2]), n});
    std::stable_sort(res.clusters.begin(), res.clusters.end(),
                     [](const ColorCluster& a, const ColorCluster& b) { return a.size > b.size; });
    res.degenerate = true;
    res.sse_per_iter.push_back(0);
    return res;
  }

  auto rng = make_rng(seed);
  auto unit_draw = [&] { return double(rng() >> 11) * 0x1.0p-53; };

  // Distance-squared weighted seeding.
  std::vector<Vec3> centroids;
  centroids.push_back(pixels[std::size_t(rng() % pixels.size())]);
  std::vector<double> d2(pixels.size());
  while (int(centroids.size()) < k) {
    double total = 0;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : centroids) best = std::min(best, (pixels[i] - c).squaredNorm());
      d2[i] = best;
      total += best;
    }
    if (total == 0) {
      centroids.push_back(pixels[0]);
      continue;
    }
    double target = unit_draw() * total, acc = 0;
    std::size_t pick = pixels.size() - 1;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      acc += d2[i];
      if (acc >= target) {
        pick = i;
        break;
      }
    }
    centroids.push_back(pixels[pick]);
  }

  std::vector<int> assign(pixels.size(), 0);
  auto assign_all = [&] {
    double sse = 0;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      double best = std::numeric_limits<double>::max();
      int bj = 0;
      for (int j = 0; j < k; ++j) {
        double d = (pixels[i] - centroids[std::size_t(j)]).squaredNorm();
        if (d < best) {
          best = d;
          bj = j;
        }
      }
      assign[i] = bj;
      sse += best;
    }
    return sse;
  };

  for (int iter = 0; iter < 50; ++iter) {
    res.sse_per_iter.push_back(assign_all());
    res.iterations = iter + 1;
    std::vector<Vec3> sums(std::size_t(k), Vec3::Zero());
    std::vector<std::size_t> counts(std::size_t(k), 0);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      sums[std::size_t(assign[i])] += pixels[i];
      counts[std::size_t(assign[i])]++;
    }
    double shift = 0;
    for (int j = 0; j < k; ++j) {
      if (counts[std::size_t(j)] == 0) continue;  // empty cluster keeps its centroid
      Vec3 next = sums[std::size_t(j)] / double(counts[std::size_t(j)]);
      shift = std::max(shift, (next - centroids[std::size_t(j)]).norm());
      centroids[std::size_t(j)] = next;
    }
    if (shift < 0.5) break;
  }

  assign_all();  // final sizes against final centroids
  std::vector<std::size_t> counts(std::size_t(k), 0);
  for (int a : assign) counts[std::size_t(a)]++;
  for (int j = 0; j < k; ++j)
    res.clusters.push_back({centroids[std::size_t(j)], counts[std::size_t(j)]});
  std::stable_sort(res.clusters.begin(), res.clusters.end(),
                   [](const ColorCluster& a, const ColorCluster& b) { return a.size > b.size; });
  return res;
}

std::vector<ColorCluster> dominant_colors(const RasterImage& img, int k, std::uint64_t seed) {
  std::vector<Vec3> pixels;
  pixels.reserve(std::size_t(img.width) * img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) pixels.push_back(img.at(x, y).asVec());
  return kmeans_rgb(pixels, k, seed).clusters;
}

BytePlane skeletonize(const BytePlane& mask) {
  BytePlane cur = (mask != 0).cast<std::uint8_t>();
  const int w = int(cur.cols()), h = int(cur.rows());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int phase = 0; phase < 2; ++phase) {
      std::vector<Eigen::Vector2i> kill;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          if (!cur(y, x)) continue;
          int p[8];
          neighbors9(cur, x, y, p);
          int b = std::accumulate(p, p + 8, 0);
          if (b < 2 || b > 6) continue;
          if (transitions(p) != 1) continue;
          // p indices: 0=N 2=E 4=S 6=W
          if (phase == 0) {
            if (p[0] * p[2] * p[4] != 0) continue;
            if (p[2] * p[4] * p[6] != 0) continue;
          } else {
            if (p[0] * p[2] * p[6] != 0) continue;
            if (p[0] * p[4] * p[6] != 0) continue;
          }
          kill.push_back({x, y});
        }
      for (const auto& q : kill) cur(q.y(), q.x()) = 0;
      changed = changed || !kill.empty();
    }
  }

  // Zhang-Suen can leave corner-fill pixels whose entire neighborhood is one
  // contiguous arc (diagonal staircases, clumps where strokes meet at a sharp
  // angle). They read as phantom junctions, so collapse them: deleting a
  // pixel with crossing number 1 and two or more neighbors keeps the skeleton
  // connected and cannot orphan an endpoint, because its neighbors stay
  // pairwise linked along the arc.
  changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!cur(y, x)) continue;
        int p[8];
        neighbors9(cur, x, y, p);
        if (transitions(p) == 1 && std::accumulate(p, p + 8, 0) >= 2) {
          cur(y, x) = 0;
          changed = true;
        }
      }
  }
  return cur;
}

SkeletonInfo skeleton_census(const BytePlane& skeleton) {
  SkeletonInfo info;
  const int w = int(skeleton.cols()), h = int(skeleton.rows());
  std::vector<Eigen::Vector2i> endpoints;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!skeleton(y, x)) continue;
      int p[8];
      neighbors9(skeleton, x, y, p);
      int b = std::accumulate(p, p + 8, 0);
      if (b == 1) {
        ++info.endpoints;
        endpoints.push_back({x, y});
      }
      if (transitions(p) >= 3) ++info.branches;
    }

  if (info.endpoints == 2 && info.branches == 0) {
    // Walk the strand, preferring orthogonal steps so staircase corners do
    // not get skipped.
    const int wx[8] = {0, 1, 0, -1, 1, 1, -1, -1};
    const int wy[8] = {-1, 0, 1, 0, -1, 1, 1, -1};
    BytePlane visited = BytePlane::Zero(h, w);
    Eigen::Vector2i cur = endpoints[0];
    visited(cur.y(), cur.x()) = 1;
    info.path.push_back(cur);
    while (cur != endpoints[1]) {
      bool moved = false;
      for (int i = 0; i < 8; ++i) {
        int nx = cur.x() + wx[i], ny = cur.y() + wy[i];
        if (fg(skeleton, nx, ny) && !visited(ny, nx)) {
          cur = {nx, ny};
          visited(ny, nx) = 1;
          info.path.push_back(cur);
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (info.path.empty() || info.path.back() != endpoints[1]) info.path.clear();
  }
  return info;
}

ComponentClass classify_component(const Contour& outer, const Contour& simplified,
                                  const SkeletonInfo& skel) {
  (void)outer;
  if (skel.branches > 0) return {ComponentClass::Exception, 0};
  if (skel.endpoints == 2) {
    if (!simplified.closed && simplified.points.size() == 2)
      return {ComponentClass::OpenSegment, 0};
    return {ComponentClass::Exception, 0};
  }
  if (skel.endpoints == 0 && simplified.closed && simplified.points.size() >= 3)
    return {ComponentClass::ClosedRing, int(simplified.points.size())};
  return {ComponentClass::Exception, 0};
}

EvalReport analyze_image(const RasterImage& img, const EvalParams& params) {
  if (img.width < 16 || img.height < 16)
    throw ImageTooSmall("need at least 16x16, got " + std::to_string(img.width) + "x" +
                        std::to_string(img.height));

  EvalReport rep;
  auto clusters = dominant_colors(img, params.kmeans_k, kColorSeed);
  const Vec3 background = clusters[0].centroid;
  rep.dominant_rgb = round_rgb(clusters[0].centroid);
  rep.second_rgb = clusters.size() > 1 ? round_rgb(clusters[1].centroid) : rep.dominant_rgb;

  const int w = img.width, h = img.height;
  BytePlane mask(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      mask(y, x) = linfDistance(img.at(x, y), background) > params.fg_dist_tol ? 1 : 0;
  fill_pinholes(mask, params.min_component_px);

  // Edge-detector cross-check; classification itself runs on the color mask
  // because a stroked outline produces double edges under gradient methods.
  EdgeMap edges = canny_edges(gaussian_blur(img, params.blur_sigma, params.blur_ksize),
                              params.canny_low, params.canny_high);
  rep.notes.push_back("canny_edge_px=" + std::to_string(edges.count()));

  int count = 0;
  Plane<int> labels = label_components(mask, count);
  std::vector<std::size_t> comp_px(std::size_t(count), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (labels(y, x)) comp_px[std::size_t(labels(y, x) - 1)]++;

  struct CompResult {
    ComponentClass cls;
    Contour simplified;
    SkeletonInfo skel;
    std::vector<Vec2> ring_verts;  // subpixel corners when the side fit held
  };
  std::vector<CompResult> comps;
  int specks = 0;
  for (int c = 1; c <= count; ++c) {
    if (comp_px[std::size_t(c - 1)] < std::size_t(params.min_component_px)) {
      ++specks;
      continue;
    }
    BytePlane comp = BytePlane::Zero(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (labels(y, x) == c) comp(y, x) = 1;

    auto comp_contours = trace_contours(comp);
    Contour outer = comp_contours.empty() ? Contour{} : comp_contours.front();
    // A sharp stroked corner grows a skeleton spur of roughly
    // stroke / (2 tan(angle/2)) px; the budget must exceed that. Strands and
    // rings carry no true short branches, so a generous budget is safe.
    const int spur_budget = std::max(6, std::min(w, h) / 6);
    SkeletonInfo skel = skeleton_census(prune_spurs(skeletonize(comp), spur_budget));

    Contour simplified;
    std::vector<Vec2> ring_verts;
    if (skel.endpoints == 2 && skel.branches == 0 && !skel.path.empty()) {
      Contour path;
      path.points = skel.path;
      path.closed = false;
      simplified = simplify_dp(path, params.dp_epsilon);
    } else {
      // A stroked outline has two boundaries. The outer one is chamfered at
      // corners (dilation of a corner by the stroke), so prefer the enclosed
      // boundary: eroding a convex corner keeps it sharp. Fall back to the
      // outer boundary for hole-free blobs.
      const Contour* ring_src = &outer;
      std::size_t best_hole = 0;
      for (const auto& cc : comp_contours)
        if (cc.hole && cc.points.size() >= 8 && cc.points.size() > best_hole) {
          best_hole = cc.points.size();
          ring_src = &cc;
        }
      simplified = simplify_dp(*ring_src, params.dp_epsilon);
      simplified.hole = false;
      if (simplified.closed && simplified.points.size() >= 3) {
        // A corner can come out of the split as two flank points straddling
        // the true apex. Refinement snaps one onto the apex, the merge drops
        // the now-redundant other, and a final refinement re-polishes.
        refine_ring_vertices(ring_src->points, simplified.points);
        merge_ring_vertices(simplified.points, params.dp_epsilon);
        refine_ring_vertices(ring_src->points, simplified.points);
      }
      ring_verts = fit_ring_subpixel(ring_src->points, simplified.points);
    }
    comps.push_back(
        {classify_component(outer, simplified, skel), std::move(simplified), skel,
         std::move(ring_verts)});
  }
  if (specks > 0) rep.notes.push_back("specks_removed=" + std::to_string(specks));

  if (comps.empty()) {
    rep.notes.push_back("empty");
    return rep;  // Unknown, n = 0, no exception
  }

  int opens = 0, rings = 0, faults = 0, free_edges = 0;
  std::vector<double> angles;
  const CompResult* ring = nullptr;
  for (const auto& cr : comps) {
    free_edges += cr.skel.endpoints;  // degree-1 stroke ends across the image
    switch (cr.cls.kind) {
      case ComponentClass::OpenSegment:
        ++opens;
        angles.push_back(
            direction_angle_deg(cr.simplified.points.front(), cr.simplified.points.back()));
        break;
      case ComponentClass::ClosedRing:
        ++rings;
        ring = &cr;
        break;
      case ComponentClass::Exception:
        ++faults;
        if (cr.skel.branches > 0)
          rep.notes.push_back("skeleton branch points");
        else if (cr.skel.endpoints == 2)
          rep.notes.push_back("bent open chain with " +
                              std::to_string(cr.simplified.points.size()) + " vertices");
        else
          rep.notes.push_back("unclassifiable component");
        break;
    }
  }
  rep.free_edge_count = free_edges;

  if (faults > 0) {
    rep.exception = true;
    rep.detected_class = DetectedClass::Unknown;
    rep.detected_n = 0;
    return rep;
  }

  if (rings == 0 && opens > 0) {
    for (std::size_t i = 0; i < angles.size(); ++i)
      for (std::size_t j = i + 1; j < angles.size(); ++j)
        if (angle_spread_deg(angles[i], angles[j]) > params.parallel_tol_deg) {
          rep.exception = true;
          rep.detected_class = DetectedClass::Unknown;
          rep.notes.push_back("segments not parallel");
          return rep;
        }
    rep.detected_class = DetectedClass::ParallelLines;
    rep.detected_n = opens;
    return rep;
  }

  if (rings == 1 && opens == 0) {
    std::vector<Vec2> verts = ring->ring_verts;
    if (verts.size() < 3) {
      verts.clear();
      for (const auto& p : ring->simplified.points) verts.push_back(p.cast<double>());
    }
    double cv = coefficient_of_variation(ring_side_lengths(verts));
    auto angs = ring_interior_angles_deg(verts);
    double regular_angle = (double(verts.size()) - 2) * 180.0 / double(verts.size());
    double worst = 0;
    for (double a : angs) worst = std::max(worst, std::abs(a - regular_angle));
    rep.regular = cv <= params.reg_side_cv && worst <= params.reg_angle_tol_deg;
    {
      std::ostringstream os;
      os << "ring side_cv=" << std::fixed << std::setprecision(3) << cv
         << " angle_dev=" << std::setprecision(1) << worst;
      rep.notes.push_back(os.str());
    }
    rep.detected_class =
        rep.regular ? DetectedClass::RegularPolygon : DetectedClass::IrregularPolygon;
    rep.detected_n = int(verts.size());
    return rep;
  }

  rep.exception = true;
  rep.detected_class = DetectedClass::Unknown;
  rep.notes.push_back("mixed components");
  return rep;
}

}  // namespace gw
