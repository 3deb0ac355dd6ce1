#include "mura/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mura/errors.hpp"

namespace mura {

const char* to_string(InterpolationMethod m) {
  switch (m) {
    case InterpolationMethod::nearest: return "nearest";
    case InterpolationMethod::bilinear: return "bilinear";
    case InterpolationMethod::area_average: return "area_average";
  }
  return "nearest";
}

InterpolationMethod interpolation_from_string(const std::string& s) {
  if (s == "nearest") return InterpolationMethod::nearest;
  if (s == "bilinear") return InterpolationMethod::bilinear;
  if (s == "area_average") return InterpolationMethod::area_average;
  throw ParseError("unknown interpolation method \"" + s + "\"");
}

namespace {

double band_gsd(const Band& b) {
  return std::hypot(b.transform().pixel_width, b.transform().col_rotation);
}

constexpr double kGsdEps = 1e-9;

std::optional<float> sample_nearest(const Band& b, PixelPoint p) {
  const int c = int(std::floor(p.x));
  const int r = int(std::floor(p.y));
  if (!b.in_grid(c, r)) return std::nullopt;
  const float v = b.at(c, r);
  if (b.is_nodata(v)) return std::nullopt;
  return v;
}

std::optional<float> sample_bilinear(const Band& b, PixelPoint p) {
  const double w = b.width(), h = b.height();
  if (p.x < 0.0 || p.x > w || p.y < 0.0 || p.y > h) return std::nullopt;
  // Inside the grid but within half a pixel of the edge: use the edge value
  // rather than extrapolating.
  const double cx = std::clamp(p.x, 0.5, w - 0.5);
  const double cy = std::clamp(p.y, 0.5, h - 0.5);
  const int x0 = std::min(int(std::floor(cx - 0.5)), b.width() - 1);
  const int y0 = std::min(int(std::floor(cy - 0.5)), b.height() - 1);
  const int x1 = std::min(x0 + 1, b.width() - 1);
  const int y1 = std::min(y0 + 1, b.height() - 1);
  const double fx = cx - 0.5 - x0;
  const double fy = cy - 0.5 - y0;
  const float v00 = b.at(x0, y0), v10 = b.at(x1, y0), v01 = b.at(x0, y1), v11 = b.at(x1, y1);
  if (b.is_nodata(v00) || b.is_nodata(v10) || b.is_nodata(v01) || b.is_nodata(v11))
    return std::nullopt;
  return float((1.0 - fx) * (1.0 - fy) * v00 + fx * (1.0 - fy) * v10 +
               (1.0 - fx) * fy * v01 + fx * fy * v11);
}

float fill_value(const Band& src) {
  if (src.nodata()) return float(*src.nodata());
  return src.sample_type() == SampleType::f32 ? std::numeric_limits<float>::quiet_NaN() : 0.0f;
}

std::optional<double> output_nodata(const Band& src) {
  if (src.nodata()) return src.nodata();
  return src.sample_type() == SampleType::f32
             ? std::optional<double>(std::numeric_limits<double>::quiet_NaN())
             : std::optional<double>(0.0);
}

/// Mean of the source samples under one output pixel. Exact per-pixel block
/// mean when the output pixel's source-space box has integral edges;
/// otherwise a 4x4 supersampled approximation.
std::optional<float> area_average_pixel(const Band& src, const AffineGeoTransform& out_gt,
                                        int oc, int orow) {
  const AffineGeoTransform& sgt = src.transform();
  const PixelPoint corners[4] = {
      backproject(sgt, project(out_gt, {double(oc), double(orow)})),
      backproject(sgt, project(out_gt, {double(oc + 1), double(orow)})),
      backproject(sgt, project(out_gt, {double(oc), double(orow + 1)})),
      backproject(sgt, project(out_gt, {double(oc + 1), double(orow + 1)}))};
  double x0 = corners[0].x, x1 = x0, y0 = corners[0].y, y1 = y0;
  for (const PixelPoint& p : corners) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }

  auto integral = [](double v) { return std::abs(v - std::round(v)) <= 1e-9; };
  if (integral(x0) && integral(x1) && integral(y0) && integral(y1)) {
    const int c0 = std::max(0, int(std::lround(x0)));
    const int c1 = std::min(src.width(), int(std::lround(x1)));
    const int r0 = std::max(0, int(std::lround(y0)));
    const int r1 = std::min(src.height(), int(std::lround(y1)));
    double acc = 0.0;
    long cnt = 0;
    for (int r = r0; r < r1; ++r)
      for (int c = c0; c < c1; ++c) {
        const float v = src.at(c, r);
        if (src.is_nodata(v)) continue;
        acc += v;
        ++cnt;
      }
    if (cnt == 0) return std::nullopt;
    return float(acc / double(cnt));
  }

  double acc = 0.0;
  long cnt = 0;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      const PixelPoint op{oc + (i + 0.5) / 4.0, orow + (j + 0.5) / 4.0};
      const std::optional<float> v = sample_nearest(src, backproject(sgt, project(out_gt, op)));
      if (!v) continue;
      acc += *v;
      ++cnt;
    }
  if (cnt == 0) return std::nullopt;
  return float(acc / double(cnt));
}

}  // namespace

WorkingResolution working_resolution_for(const Band& base, const Band& warp) {
  const double gb = band_gsd(base), gw = band_gsd(warp);
  WorkingResolution wr;
  wr.gsd_m = std::max(gb, gw);
  const double f = wr.gsd_m / gb;
  wr.grid = base.transform();
  wr.grid.pixel_width *= f;
  wr.grid.row_rotation *= f;
  wr.grid.col_rotation *= f;
  wr.grid.pixel_height *= f;
  return wr;
}

Band to_working_resolution(const Band& band, const WorkingResolution& target,
                           InterpolationMethod m) {
  const double src_gsd = band_gsd(band);
  if (src_gsd > target.gsd_m + kGsdEps)
    throw UpsampleRequested("band GSD " + std::to_string(src_gsd) +
                            " m is coarser than the working resolution " +
                            std::to_string(target.gsd_m) + " m");
  if (std::abs(src_gsd - target.gsd_m) <= kGsdEps) return band;

  // Snap the output to the target lattice: cover the band footprint with
  // whole target pixels.
  const AffineGeoTransform& tgt = target.grid;
  const PixelPoint corners[4] = {
      backproject(tgt, project(band.transform(), {0.0, 0.0})),
      backproject(tgt, project(band.transform(), {double(band.width()), 0.0})),
      backproject(tgt, project(band.transform(), {0.0, double(band.height())})),
      backproject(tgt,
                  project(band.transform(), {double(band.width()), double(band.height())}))};
  double cmin = corners[0].x, cmax = cmin, rmin = corners[0].y, rmax = rmin;
  for (const PixelPoint& p : corners) {
    cmin = std::min(cmin, p.x);
    cmax = std::max(cmax, p.x);
    rmin = std::min(rmin, p.y);
    rmax = std::max(rmax, p.y);
  }
  const long c0 = long(std::floor(cmin + 1e-9));
  const long r0 = long(std::floor(rmin + 1e-9));
  const long c1 = long(std::ceil(cmax - 1e-9));
  const long r1 = long(std::ceil(rmax - 1e-9));
  if (c1 <= c0 || r1 <= r0) throw Error("band footprint collapses at the working resolution");

  AffineGeoTransform out_gt = tgt;
  const WorldPoint no = project(tgt, {double(c0), double(r0)});
  out_gt.origin_x = no.x;
  out_gt.origin_y = no.y;
  const int ow = int(c1 - c0), oh = int(r1 - r0);

  BandMeta meta = band.meta();
  meta.gsd_m = target.gsd_m;
  Band out(ow, oh, band.sample_type(), out_gt, meta, output_nodata(band));
  const float fill = fill_value(band);

  if (m == InterpolationMethod::area_average) {
    if (!band.transform().axis_aligned() || !out_gt.axis_aligned())
      throw Error("area_average requires axis-aligned source and target grids");
    for (int r = 0; r < oh; ++r)
      for (int c = 0; c < ow; ++c) {
        const std::optional<float> v = area_average_pixel(band, out_gt, c, r);
        out.set(c, r, v ? *v : fill);
      }
    return out;
  }

  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      const PixelPoint src = backproject(band.transform(), project(out_gt, {c + 0.5, r + 0.5}));
      const std::optional<float> v = m == InterpolationMethod::nearest
                                         ? sample_nearest(band, src)
                                         : sample_bilinear(band, src);
      out.set(c, r, v ? *v : fill);
    }
  }
  return out;
}

Band resample_band_through_model(const Band& warp_in, const AffineGeoTransform& working_base_gt,
                                 const AffineGeoTransform& working_warp_gt,
                                 const CorrectionModel& model, const AffineGeoTransform& out_gt,
                                 int out_width, int out_height, InterpolationMethod m) {
  if (!working_base_gt.invertible() || !working_warp_gt.invertible() || !out_gt.invertible() ||
      !warp_in.transform().invertible())
    throw SingularTransform("alignment chain requires invertible geotransforms");
  if (out_width <= 0 || out_height <= 0) throw Error("output dimensions must be positive");

  Band out(out_width, out_height, warp_in.sample_type(), out_gt, warp_in.meta(),
           output_nodata(warp_in));
  const float fill = fill_value(warp_in);

  auto chain = [&](PixelPoint out_px) {
    const WorldPoint w1 = project(out_gt, out_px);                 // step 1
    const PixelPoint pb = backproject(working_base_gt, w1);        // step 2
    const PixelPoint pw = evaluate(model, pb);                     // step 3
    const WorldPoint w2 = project(working_warp_gt, pw);            // step 4
    return backproject(warp_in.transform(), w2);                   // step 5
  };

  for (int r = 0; r < out_height; ++r) {
    for (int c = 0; c < out_width; ++c) {
      std::optional<float> v;
      if (m == InterpolationMethod::area_average) {
        // Supersample the output pixel through the full chain; the chain is
        // not a pixel-to-pixel box map, so the block-mean shortcut of plain
        // downsampling does not apply here.
        double acc = 0.0;
        long cnt = 0;
        for (int j = 0; j < 4; ++j)
          for (int i = 0; i < 4; ++i) {
            const std::optional<float> s =
                sample_nearest(warp_in, chain({c + (i + 0.5) / 4.0, r + (j + 0.5) / 4.0}));
            if (!s) continue;
            acc += *s;
            ++cnt;
          }
        if (cnt > 0) v = float(acc / double(cnt));
      } else {
        const PixelPoint src = chain({c + 0.5, r + 0.5});
        v = m == InterpolationMethod::nearest ? sample_nearest(warp_in, src)
                                              : sample_bilinear(warp_in, src);
      }
      out.set(c, r, v ? *v : fill);
    }
  }
  return out;
}

}  // namespace mura
