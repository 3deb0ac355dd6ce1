#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mura/geo.hpp"

namespace mura {

enum class SampleType : uint8_t { u8, u16, f32 };

const char* to_string(SampleType t);
SampleType sample_type_from_string(const std::string& s);
std::size_t sample_size_bytes(SampleType t);

/// Per-band descriptive metadata.
struct BandMeta {
  std::string name;         // e.g. "pan", "blue", "cloud_mask"
  double gsd_m = 0.0;       // nominal ground sampling distance, meters
  std::string wavelength;   // free-form descriptor, e.g. "0.503-0.676um"
};

/// One 2D sample grid with its own geotransform. Samples are held as float
/// regardless of the declared storage type (u8/u16 values are exactly
/// representable); `sample_type` controls on-disk encoding.
class Band {
public:
  Band() = default;
  Band(int width, int height, SampleType type, AffineGeoTransform gt, BandMeta meta,
       std::optional<double> nodata = std::nullopt);

  int width() const { return width_; }
  int height() const { return height_; }
  SampleType sample_type() const { return type_; }
  const AffineGeoTransform& transform() const { return gt_; }
  const BandMeta& meta() const { return meta_; }
  std::optional<double> nodata() const { return nodata_; }

  float at(int col, int row) const { return samples_[std::size_t(row) * width_ + col]; }
  void set(int col, int row, float v) { samples_[std::size_t(row) * width_ + col] = v; }

  std::span<const float> samples() const { return samples_; }
  std::span<float> samples() { return samples_; }

  bool in_grid(int col, int row) const {
    return col >= 0 && col < width_ && row >= 0 && row < height_;
  }

  bool is_nodata(float v) const {
    if (!nodata_) return false;
    const float nd = float(*nodata_);
    if (std::isnan(nd)) return std::isnan(v);
    return v == nd;
  }

  /// World bounding box of the grid.
  AOI footprint(const std::string& crs_id) const;

private:
  int width_ = 0;
  int height_ = 0;
  SampleType type_ = SampleType::f32;
  AffineGeoTransform gt_;
  BandMeta meta_;
  std::optional<double> nodata_;
  std::vector<float> samples_;
};

/// A multi-band georeferenced raster. Bands of one scene may differ in
/// resolution, so each band carries its own geotransform; the raster's
/// declared footprint is the footprint of band 0.
class GeoRaster {
public:
  GeoRaster() = default;
  GeoRaster(std::string crs_id, std::vector<Band> bands);

  const std::string& crs_id() const { return crs_id_; }
  const std::vector<Band>& bands() const { return bands_; }
  std::vector<Band>& bands() { return bands_; }
  const Band& band(std::size_t i) const { return bands_.at(i); }
  std::size_t band_count() const { return bands_.size(); }

  /// Checks the type invariants: non-empty, invertible geotransforms, every
  /// band footprint overlapping the declared footprint, and band_meta GSD
  /// equal to |pixel_width| within 1e-6. Throws Error on violation.
  void validate() const;

private:
  std::string crs_id_;
  std::vector<Band> bands_;
};

/// World bounding box of band 0.
AOI footprint(const GeoRaster& r);

/// Clips to the smallest pixel-aligned rectangle per band containing `aoi`,
/// intersected with the grid. Geotransforms are updated so the world
/// coordinates of retained pixels are unchanged.
/// Throws NoOverlap / CrsMismatch.
GeoRaster clip(const GeoRaster& r, const AOI& aoi);

}  // namespace mura
