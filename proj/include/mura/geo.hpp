#pragma once

#include <array>
#include <cmath>
#include <string>

#include "mura/errors.hpp"

namespace mura {

/// Continuous pixel coordinates. Pixel (0,0) occupies [0,1)x[0,1); its center
/// is (0.5, 0.5). Fractional values are allowed everywhere.
struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

/// World coordinates in meters, in the raster's projected CRS.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Pixel <-> world mapping. Pixel (0,0) maps to the *outer corner* of the
/// top-left pixel; pixel centers are at (col + 0.5, row + 0.5).
///
///   world_x = origin_x + col * pixel_width  + row * row_rotation
///   world_y = origin_y + col * col_rotation + row * pixel_height
///
/// The six-tuple ordering used for serialization is
/// [origin_x, pixel_width, row_rotation, origin_y, col_rotation, pixel_height],
/// matching the common georeferenced-raster convention.
struct AffineGeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_width = 1.0;    // signed meters per pixel along the column axis
  double pixel_height = -1.0;  // signed meters per pixel along the row axis
  double row_rotation = 0.0;   // shear, meters per row step along x
  double col_rotation = 0.0;   // shear, meters per column step along y

  double determinant() const {
    return pixel_width * pixel_height - row_rotation * col_rotation;
  }

  bool invertible() const {
    const double det = determinant();
    if (!std::isfinite(det)) return false;
    const double scale = (std::abs(pixel_width) + std::abs(row_rotation)) *
                         (std::abs(pixel_height) + std::abs(col_rotation));
    return std::abs(det) > scale * 1e-15 && det != 0.0;
  }

  bool axis_aligned() const { return row_rotation == 0.0 && col_rotation == 0.0; }

  std::array<double, 6> six() const {
    return {origin_x, pixel_width, row_rotation, origin_y, col_rotation, pixel_height};
  }

  static AffineGeoTransform from_six(const std::array<double, 6>& t) {
    AffineGeoTransform gt;
    gt.origin_x = t[0];
    gt.pixel_width = t[1];
    gt.row_rotation = t[2];
    gt.origin_y = t[3];
    gt.col_rotation = t[4];
    gt.pixel_height = t[5];
    return gt;
  }
};

/// Pixel -> world. Exact affine arithmetic; total on finite input.
WorldPoint project(const AffineGeoTransform& gt, PixelPoint p);

/// World -> pixel. Throws SingularTransform if the linear part is not invertible.
PixelPoint backproject(const AffineGeoTransform& gt, WorldPoint w);

/// Axis-aligned world rectangle with its CRS.
struct AOI {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
  std::string crs_id;

  bool valid() const {
    return std::isfinite(min_x) && std::isfinite(min_y) && std::isfinite(max_x) &&
           std::isfinite(max_y) && min_x < max_x && min_y < max_y;
  }

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }

  bool intersects(const AOI& o) const {
    return min_x < o.max_x && o.min_x < max_x && min_y < o.max_y && o.min_y < max_y;
  }

  /// Area of the rectangle intersection; 0 when disjoint.
  double intersection_area(const AOI& o) const {
    const double w = std::min(max_x, o.max_x) - std::max(min_x, o.min_x);
    const double h = std::min(max_y, o.max_y) - std::max(min_y, o.min_y);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
  }

  /// True when `o` lies fully inside this rectangle (closed comparison).
  bool contains(const AOI& o) const {
    return min_x <= o.min_x && min_y <= o.min_y && max_x >= o.max_x && max_y >= o.max_y;
  }
};

}  // namespace mura
