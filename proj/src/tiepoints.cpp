#include "mura/tiepoints.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mura/errors.hpp"

namespace mura {

namespace {

// Bresenham circle of radius 3, clockwise from 12 o'clock. The segment test
// walks this ring looking for a long contiguous run of pixels all brighter
// or all darker than the center.
constexpr int kRing[16][2] = {
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},  {3, 1},  {2, 2},  {1, 3},
    {0, 3},  {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};
constexpr int kArc = 9;  // FAST-9

/// Corner response used for non-maximum suppression and ranking: the larger
/// of the summed exceedances (|ring - center| - t) over ring pixels brighter
/// than center+t (when the bright run test passes) and over pixels darker
/// than center-t (when the dark run test passes).
struct SegmentTest {
  bool corner = false;
  float score = 0.0f;
};

SegmentTest segment_test(const float ring[16], float center, float t) {
  bool bright[16], dark[16];
  for (int i = 0; i < 16; ++i) {
    bright[i] = ring[i] > center + t;
    dark[i] = ring[i] < center - t;
  }
  auto has_run = [](const bool f[16]) {
    int run = 0, best = 0;
    for (int i = 0; i < 32; ++i) {
      if (f[i & 15]) {
        ++run;
        best = std::max(best, run);
        if (best >= kArc) return true;
      } else {
        run = 0;
      }
    }
    return false;
  };
  SegmentTest r;
  float sb = 0.0f, sd = 0.0f;
  const bool rb = has_run(bright);
  const bool rd = has_run(dark);
  if (rb)
    for (int i = 0; i < 16; ++i)
      if (bright[i]) sb += ring[i] - center - t;
  if (rd)
    for (int i = 0; i < 16; ++i)
      if (dark[i]) sd += center - ring[i] - t;
  r.corner = rb || rd;
  r.score = std::max(sb, sd);
  return r;
}

}  // namespace

std::vector<PixelPoint> detect_corners(const Band& band, int max_count, int threshold) {
  const int w = band.width(), h = band.height();
  const float t = float(threshold);
  std::vector<float> score(std::size_t(w) * h, -1.0f);  // -1 = not a corner

  for (int r = 3; r < h - 3; ++r) {
    for (int c = 3; c < w - 3; ++c) {
      const float center = band.at(c, r);
      if (band.is_nodata(center)) continue;
      // Compass pre-test: every 9-long ring run covers at least two of the
      // four axis-aligned ring pixels, so fewer than two on either side of
      // the threshold rules the candidate out cheaply.
      const float n = band.at(c, r - 3), e = band.at(c + 3, r), s = band.at(c, r + 3),
                  wv = band.at(c - 3, r);
      int nb = (n > center + t) + (e > center + t) + (s > center + t) + (wv > center + t);
      int nd = (n < center - t) + (e < center - t) + (s < center - t) + (wv < center - t);
      if (nb < 2 && nd < 2) continue;

      float ring[16];
      bool bad = false;
      for (int i = 0; i < 16; ++i) {
        ring[i] = band.at(c + kRing[i][0], r + kRing[i][1]);
        if (band.is_nodata(ring[i])) {
          bad = true;
          break;
        }
      }
      if (bad) continue;
      const SegmentTest st = segment_test(ring, center, t);
      if (st.corner) score[std::size_t(r) * w + c] = st.score;
    }
  }

  // 3x3 non-maximum suppression. Ties go to the earlier pixel in raster
  // order so the result is independent of scan strategy.
  struct Corner {
    int c, r;
    float s;
  };
  std::vector<Corner> kept;
  for (int r = 3; r < h - 3; ++r) {
    for (int c = 3; c < w - 3; ++c) {
      const float s = score[std::size_t(r) * w + c];
      if (s < 0.0f) continue;
      bool maximal = true;
      for (int dr = -1; dr <= 1 && maximal; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int nc = c + dc, nr = r + dr;
          if (nc < 0 || nc >= w || nr < 0 || nr >= h) continue;
          const float ns = score[std::size_t(nr) * w + nc];
          if (ns > s || (ns == s && (nr < r || (nr == r && nc < c)))) {
            maximal = false;
            break;
          }
        }
      }
      if (maximal) kept.push_back({c, r, s});
    }
  }

  std::stable_sort(kept.begin(), kept.end(), [](const Corner& a, const Corner& b) {
    if (a.s != b.s) return a.s > b.s;
    if (a.r != b.r) return a.r < b.r;
    return a.c < b.c;
  });
  if (max_count >= 0 && kept.size() > std::size_t(max_count)) kept.resize(std::size_t(max_count));

  std::vector<PixelPoint> out;
  out.reserve(kept.size());
  for (const Corner& k : kept) out.push_back({k.c + 0.5, k.r + 0.5});
  return out;
}

namespace {

/// Zero-mean unit-norm intensity patch around an integer pixel, or empty if
/// the window leaves the grid, touches nodata, or has no variance.
std::vector<double> patch_descriptor(const Band& band, int c, int r, int radius) {
  const int d = 2 * radius + 1;
  if (c - radius < 0 || r - radius < 0 || c + radius >= band.width() ||
      r + radius >= band.height())
    return {};
  std::vector<double> p(std::size_t(d) * d);
  double sum = 0.0;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const float v = band.at(c + dc, r + dr);
      if (band.is_nodata(v)) return {};
      p[std::size_t(dr + radius) * d + (dc + radius)] = v;
      sum += v;
    }
  }
  const double mean = sum / double(p.size());
  double norm2 = 0.0;
  for (double& v : p) {
    v -= mean;
    norm2 += v * v;
  }
  if (norm2 <= 0.0) return {};
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : p) v *= inv;
  return p;
}

double ncc(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// NCC of a fixed base descriptor against the warp patch centered at (c, r).
/// Returns -2 when no valid patch exists there.
double ncc_at(const std::vector<double>& base_desc, const Band& warp, int c, int r, int radius) {
  const std::vector<double> p = patch_descriptor(warp, c, r, radius);
  if (p.empty()) return -2.0;
  return ncc(base_desc, p);
}

/// Subpixel peak of the 3x3 correlation surface around (c, r): least-squares
/// quadratic through the nine samples, stationary point from its gradient.
/// Falls back to (0,0) when the surface is degenerate or the peak escapes
/// the stencil.
PixelPoint quadratic_peak(const double f[3][3]) {
  Eigen::MatrixXd A(9, 6);
  Eigen::VectorXd y(9);
  int i = 0;
  for (int dv = -1; dv <= 1; ++dv) {
    for (int du = -1; du <= 1; ++du, ++i) {
      A(i, 0) = 1.0;
      A(i, 1) = du;
      A(i, 2) = dv;
      A(i, 3) = du * du;
      A(i, 4) = du * dv;
      A(i, 5) = dv * dv;
      y(i) = f[dv + 1][du + 1];
    }
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  // grad = 0:  [2c3 c4; c4 2c5] [u v]^T = -[c1 c2]^T
  const double det = 4.0 * c(3) * c(5) - c(4) * c(4);
  if (std::abs(det) < 1e-12) return {0.0, 0.0};
  const double u = (-2.0 * c(5) * c(1) + c(4) * c(2)) / det;
  const double v = (c(4) * c(1) - 2.0 * c(3) * c(2)) / det;
  if (std::abs(u) > 1.0 || std::abs(v) > 1.0) return {0.0, 0.0};
  return {u, v};
}

}  // namespace

TiePointSet describe_and_match(const Band& base_band, const Band& warp_band,
                               const std::vector<PixelPoint>& base_pts,
                               const std::vector<PixelPoint>& warp_pts,
                               const MatcherConfig& cfg) {
  const int R = cfg.patch_radius;

  struct Key {
    int c, r;
    PixelPoint pt;
    std::vector<double> desc;
  };
  auto build = [R](const Band& band, const std::vector<PixelPoint>& pts) {
    std::vector<Key> out;
    out.reserve(pts.size());
    for (const PixelPoint& p : pts) {
      Key k;
      k.c = int(std::floor(p.x));
      k.r = int(std::floor(p.y));
      k.pt = p;
      k.desc = patch_descriptor(band, k.c, k.r, R);
      if (!k.desc.empty()) out.push_back(std::move(k));
    }
    return out;
  };
  const std::vector<Key> bk = build(base_band, base_pts);
  const std::vector<Key> wk = build(warp_band, warp_pts);

  TiePointSet set;
  set.base_width = base_band.width();
  set.base_height = base_band.height();
  set.warp_width = warp_band.width();
  set.warp_height = warp_band.height();
  set.working_gsd_m =
      std::hypot(base_band.transform().pixel_width, base_band.transform().col_rotation);
  set.provenance = "builtin";
  if (bk.empty() || wk.empty()) return set;

  // Dense similarity matrix; keypoint counts are capped upstream so the
  // nb x nw product stays small.
  const std::size_t nb = bk.size(), nw = wk.size();
  std::vector<double> sim(nb * nw);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nw; ++j) sim[i * nw + j] = ncc(bk[i].desc, wk[j].desc);

  auto distance = [](double s) { return std::sqrt(std::max(0.0, 2.0 - 2.0 * s)); };

  std::vector<std::size_t> best_w(nb), best_b(nw);
  std::vector<bool> pass(nb, false);
  for (std::size_t i = 0; i < nb; ++i) {
    std::size_t j1 = 0;
    double s1 = -2.0, s2 = -2.0;
    for (std::size_t j = 0; j < nw; ++j) {
      const double s = sim[i * nw + j];
      if (s > s1) {
        s2 = s1;
        s1 = s;
        j1 = j;
      } else if (s > s2) {
        s2 = s;
      }
    }
    best_w[i] = j1;
    const double d1 = distance(s1);
    pass[i] = (nw < 2) || (d1 <= cfg.ratio * distance(s2));
  }
  for (std::size_t j = 0; j < nw; ++j) {
    std::size_t i1 = 0;
    double s1 = -2.0;
    for (std::size_t i = 0; i < nb; ++i) {
      const double s = sim[i * nw + j];
      if (s > s1) {
        s1 = s;
        i1 = i;
      }
    }
    best_b[j] = i1;
  }

  for (std::size_t i = 0; i < nb; ++i) {
    const std::size_t j = best_w[i];
    if (!pass[i] || best_b[j] != i) continue;
    const double peak = sim[i * nw + j];

    int wc = wk[j].c, wr = wk[j].r;
    PixelPoint off{0.0, 0.0};
    if (peak < 1.0 - 1e-9) {
      // Walk uphill on integer offsets first so the 3x3 quadratic stencil
      // actually brackets the correlation maximum.
      double here = peak;
      for (int step = 0; step < 5; ++step) {
        int bc = wc, br = wr;
        double best = here;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const double s = ncc_at(bk[i].desc, warp_band, wc + dc, wr + dr, R);
            if (s > best) {
              best = s;
              bc = wc + dc;
              br = wr + dr;
            }
          }
        if (bc == wc && br == wr) break;
        wc = bc;
        wr = br;
        here = best;
      }
      double f[3][3];
      bool usable = true;
      for (int dr = -1; dr <= 1 && usable; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          f[dr + 1][dc + 1] = ncc_at(bk[i].desc, warp_band, wc + dc, wr + dr, R);
          if (f[dr + 1][dc + 1] < -1.5) {
            usable = false;
            break;
          }
        }
      if (usable) off = quadratic_peak(f);
    }

    TiePoint tp;
    tp.base = bk[i].pt;
    tp.warp = {wc + 0.5 + off.x, wr + 0.5 + off.y};
    tp.score = (1.0 + std::clamp(peak, -1.0, 1.0)) / 2.0;
    set.points.push_back(tp);
  }

  std::sort(set.points.begin(), set.points.end(), [](const TiePoint& a, const TiePoint& b) {
    if (a.base.x != b.base.x) return a.base.x < b.base.x;
    return a.base.y < b.base.y;
  });
  return set;
}

namespace {

std::string basename_of(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

TiePointSet import_tiepoints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tiepoint file \"" + path + "\"");

  TiePointSet set;
  set.provenance = "imported:" + basename_of(path);

  std::string line;
  long lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;

    std::istringstream row(line);
    if (!have_header) {
      std::string magic, version;
      double gsd = 0.0;
      if (!(row >> magic >> version >> set.base_width >> set.base_height >> set.warp_width >>
            set.warp_height >> gsd) ||
          magic != "murat-tiepoints" || version != "v1")
        throw ParseError("malformed tiepoint header", lineno);
      if (set.base_width <= 0 || set.base_height <= 0 || set.warp_width <= 0 ||
          set.warp_height <= 0 || !(gsd > 0.0))
        throw ParseError("tiepoint header dimensions must be positive", lineno);
      set.working_gsd_m = gsd;
      have_header = true;
      continue;
    }

    TiePoint tp;
    if (!(row >> tp.base.x >> tp.base.y >> tp.warp.x >> tp.warp.y >> tp.score))
      throw ParseError("malformed tiepoint row", lineno);
    std::string trailing;
    if (row >> trailing) throw ParseError("trailing tokens after tiepoint row", lineno);
    if (!std::isfinite(tp.base.x) || !std::isfinite(tp.base.y) || !std::isfinite(tp.warp.x) ||
        !std::isfinite(tp.warp.y) || !std::isfinite(tp.score))
      throw ParseError("non-finite tiepoint value", lineno);
    if (tp.score < 0.0 || tp.score > 1.0)
      throw ParseError("tiepoint score outside [0,1]", lineno);
    if (tp.base.x < 0.0 || tp.base.x > set.base_width || tp.base.y < 0.0 ||
        tp.base.y > set.base_height)
      throw OutOfGrid("tiepoint base coordinate outside the declared grid (line " +
                      std::to_string(lineno) + ")");
    if (tp.warp.x < 0.0 || tp.warp.x > set.warp_width || tp.warp.y < 0.0 ||
        tp.warp.y > set.warp_height)
      throw OutOfGrid("tiepoint warp coordinate outside the declared grid (line " +
                      std::to_string(lineno) + ")");
    for (const TiePoint& prev : set.points)
      if (std::abs(prev.base.x - tp.base.x) <= 1e-6 && std::abs(prev.base.y - tp.base.y) <= 1e-6)
        throw ParseError("duplicate base coordinate", lineno);
    set.points.push_back(tp);
  }
  if (!have_header) throw ParseError("missing tiepoint header", lineno);
  return set;
}

void export_tiepoints(const TiePointSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write tiepoint file \"" + path + "\"");
  char buf[160];
  std::snprintf(buf, sizeof buf, "murat-tiepoints v1 %d %d %d %d %.17g\n", set.base_width,
                set.base_height, set.warp_width, set.warp_height, set.working_gsd_m);
  out << buf;
  for (const TiePoint& tp : set.points) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g\n", tp.base.x, tp.base.y,
                  tp.warp.x, tp.warp.y, tp.score);
    out << buf;
  }
  if (!out) throw IoError("short write to tiepoint file \"" + path + "\"");
}

}  // namespace mura
