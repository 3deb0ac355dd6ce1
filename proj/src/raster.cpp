#include "mura/raster.hpp"

#include <algorithm>
#include <cmath>

#include "mura/errors.hpp"

namespace mura {

const char* to_string(SampleType t) {
  switch (t) {
    case SampleType::u8: return "u8";
    case SampleType::u16: return "u16";
    case SampleType::f32: return "f32";
  }
  return "f32";
}

SampleType sample_type_from_string(const std::string& s) {
  if (s == "u8") return SampleType::u8;
  if (s == "u16") return SampleType::u16;
  if (s == "f32") return SampleType::f32;
  throw ParseError("unknown sample type \"" + s + "\"");
}

std::size_t sample_size_bytes(SampleType t) {
  switch (t) {
    case SampleType::u8: return 1;
    case SampleType::u16: return 2;
    case SampleType::f32: return 4;
  }
  return 4;
}

Band::Band(int width, int height, SampleType type, AffineGeoTransform gt, BandMeta meta,
           std::optional<double> nodata)
    : width_(width),
      height_(height),
      type_(type),
      gt_(gt),
      meta_(std::move(meta)),
      nodata_(nodata) {
  if (width <= 0 || height <= 0)
    throw Error("band dimensions must be positive");
  if (!gt_.invertible())
    throw SingularTransform("band geotransform is singular");
  samples_.assign(std::size_t(width_) * height_, 0.0f);
}

namespace {

AOI corners_bbox(const AffineGeoTransform& gt, int w, int h, const std::string& crs_id) {
  const WorldPoint c[4] = {
      project(gt, {0.0, 0.0}),
      project(gt, {double(w), 0.0}),
      project(gt, {0.0, double(h)}),
      project(gt, {double(w), double(h)}),
  };
  AOI box;
  box.crs_id = crs_id;
  box.min_x = std::min(std::min(c[0].x, c[1].x), std::min(c[2].x, c[3].x));
  box.max_x = std::max(std::max(c[0].x, c[1].x), std::max(c[2].x, c[3].x));
  box.min_y = std::min(std::min(c[0].y, c[1].y), std::min(c[2].y, c[3].y));
  box.max_y = std::max(std::max(c[0].y, c[1].y), std::max(c[2].y, c[3].y));
  return box;
}

}  // namespace

AOI Band::footprint(const std::string& crs_id) const {
  return corners_bbox(gt_, width_, height_, crs_id);
}

GeoRaster::GeoRaster(std::string crs_id, std::vector<Band> bands)
    : crs_id_(std::move(crs_id)), bands_(std::move(bands)) {}

void GeoRaster::validate() const {
  if (bands_.empty()) throw Error("raster has no bands");
  const AOI fp = mura::footprint(*this);
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    const Band& b = bands_[i];
    if (!b.transform().invertible())
      throw SingularTransform("band " + std::to_string(i) + " geotransform is singular");
    const AOI bf = b.footprint(crs_id_);
    if (!fp.intersects(bf))
      throw Error("band " + std::to_string(i) + " footprint does not overlap the raster footprint");
    const double scale = std::hypot(b.transform().pixel_width, b.transform().col_rotation);
    if (b.meta().gsd_m > 0.0 && std::abs(b.meta().gsd_m - scale) > 1e-6)
      throw Error("band " + std::to_string(i) + " declared GSD disagrees with its geotransform");
  }
}

AOI footprint(const GeoRaster& r) {
  if (r.bands().empty()) throw Error("raster has no bands");
  return r.band(0).footprint(r.crs_id());
}

GeoRaster clip(const GeoRaster& r, const AOI& aoi) {
  if (!aoi.crs_id.empty() && aoi.crs_id != r.crs_id())
    throw CrsMismatch("clip region CRS \"" + aoi.crs_id + "\" does not match raster CRS \"" +
                      r.crs_id() + "\"");
  if (!aoi.valid()) throw Error("clip region is empty or inverted");

  std::vector<Band> out;
  out.reserve(r.band_count());
  for (const Band& b : r.bands()) {
    // Back-project the four region corners; the pixel-space bounding box of
    // those, snapped outward to whole pixels and clamped to the grid, is the
    // smallest aligned rectangle containing the region.
    const AffineGeoTransform& gt = b.transform();
    const WorldPoint wc[4] = {{aoi.min_x, aoi.min_y},
                              {aoi.min_x, aoi.max_y},
                              {aoi.max_x, aoi.min_y},
                              {aoi.max_x, aoi.max_y}};
    double cmin = 1e300, cmax = -1e300, rmin = 1e300, rmax = -1e300;
    for (const WorldPoint& w : wc) {
      const PixelPoint p = backproject(gt, w);
      cmin = std::min(cmin, p.x);
      cmax = std::max(cmax, p.x);
      rmin = std::min(rmin, p.y);
      rmax = std::max(rmax, p.y);
    }
    const long c0 = std::max(0L, long(std::floor(cmin + 1e-9)));
    const long r0 = std::max(0L, long(std::floor(rmin + 1e-9)));
    const long c1 = std::min(long(b.width()), long(std::ceil(cmax - 1e-9)));
    const long r1 = std::min(long(b.height()), long(std::ceil(rmax - 1e-9)));
    if (c1 <= c0 || r1 <= r0)
      throw NoOverlap("clip region does not intersect band \"" + b.meta().name + "\"");

    AffineGeoTransform ngt = gt;
    const WorldPoint no = project(gt, {double(c0), double(r0)});
    ngt.origin_x = no.x;
    ngt.origin_y = no.y;

    Band nb(int(c1 - c0), int(r1 - r0), b.sample_type(), ngt, b.meta(), b.nodata());
    for (long row = r0; row < r1; ++row)
      for (long col = c0; col < c1; ++col)
        nb.set(int(col - c0), int(row - r0), b.at(int(col), int(row)));
    out.push_back(std::move(nb));
  }
  return GeoRaster(r.crs_id(), std::move(out));
}

}  // namespace mura
