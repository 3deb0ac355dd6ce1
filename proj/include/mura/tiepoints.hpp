#pragma once

#include <string>
#include <vector>

#include "mura/geo.hpp"
#include "mura/raster.hpp"

namespace mura {

/// One matched location pair between the base and warp grids, both expressed
/// in working-resolution pixel coordinates.
struct TiePoint {
  PixelPoint base;
  PixelPoint warp;
  double score = 1.0;  // match confidence in [0,1]
};

struct TiePointSet {
  std::vector<TiePoint> points;
  std::string provenance = "builtin";  // "builtin" or "imported:<name>"
  double working_gsd_m = 0.0;
  int base_width = 0;
  int base_height = 0;
  int warp_width = 0;
  int warp_height = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct DetectorConfig {
  int max_count = 2000;
  int threshold = 20;      // FAST intensity difference
};

struct MatcherConfig {
  int patch_radius = 8;    // NCC window is (2r+1) x (2r+1)
  double ratio = 0.9;      // Lowe ratio on descriptor distance
};

/// FAST-9 segment-test corners with 3x3 non-maximum suppression, strongest
/// first, at most max_count. Returned coordinates are pixel centers.
std::vector<PixelPoint> detect_corners(const Band& band, int max_count, int threshold);

/// Matches keypoints between two bands by normalized cross-correlation over
/// intensity patches, with mutual-best and ratio filtering and subpixel
/// refinement of the warp location. Output is sorted by (base.x, base.y).
TiePointSet describe_and_match(const Band& base_band, const Band& warp_band,
                               const std::vector<PixelPoint>& base_pts,
                               const std::vector<PixelPoint>& warp_pts,
                               const MatcherConfig& cfg = {});

/// Text interchange: `murat-tiepoints v1 <base_w> <base_h> <warp_w> <warp_h>
/// <gsd_m>` header, then `x_b y_b x_w y_w score` rows; `#` starts a comment.
TiePointSet import_tiepoints(const std::string& path);
void export_tiepoints(const TiePointSet& set, const std::string& path);

}  // namespace mura
