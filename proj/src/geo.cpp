#include "mura/geo.hpp"

namespace mura {

WorldPoint project(const AffineGeoTransform& gt, PixelPoint p) {
  WorldPoint w;
  w.x = gt.origin_x + p.x * gt.pixel_width + p.y * gt.row_rotation;
  w.y = gt.origin_y + p.x * gt.col_rotation + p.y * gt.pixel_height;
  return w;
}

PixelPoint backproject(const AffineGeoTransform& gt, WorldPoint w) {
  if (!gt.invertible()) {
    throw SingularTransform("geotransform linear part is singular");
  }
  const double dx = w.x - gt.origin_x;
  const double dy = w.y - gt.origin_y;
  const double det = gt.determinant();
  PixelPoint p;
  p.x = (dx * gt.pixel_height - gt.row_rotation * dy) / det;
  p.y = (gt.pixel_width * dy - gt.col_rotation * dx) / det;
  return p;
}

}  // namespace mura
