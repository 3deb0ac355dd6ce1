#pragma once

#include <string>

#include "mura/correction_model.hpp"
#include "mura/geo.hpp"
#include "mura/raster.hpp"

namespace mura {

enum class InterpolationMethod : uint8_t { nearest, bilinear, area_average };

const char* to_string(InterpolationMethod m);
InterpolationMethod interpolation_from_string(const std::string& s);

/// The common grid both images are brought onto before tiepoint extraction:
/// coarsest nominal GSD of the pair, lattice phase and orientation taken from
/// the base image.
struct WorkingResolution {
  double gsd_m = 0.0;
  AffineGeoTransform grid;
};

WorkingResolution working_resolution_for(const Band& base, const Band& warp);

/// Downsamples a band onto the target lattice (this module never upsamples).
/// The output grid is the smallest target-lattice rectangle covering the
/// band's footprint. A band already at the target GSD is returned unchanged.
/// Throws UpsampleRequested when the band is coarser than the target.
Band to_working_resolution(const Band& band, const WorkingResolution& target,
                           InterpolationMethod m);

/// Warp-image alignment resampling. For every output pixel center:
///   1. project through out_gt to world coordinates,
///   2. back-project into the working-resolution base grid,
///   3. apply the correction model there,
///   4. project the corrected working-warp pixel to world coordinates,
///   5. back-project into warp_in and sample.
/// Samples landing outside warp_in become nodata (no extrapolation). When
/// warp_in declares no nodata value the output declares one: NaN for float
/// bands, 0 for integer bands.
Band resample_band_through_model(const Band& warp_in, const AffineGeoTransform& working_base_gt,
                                 const AffineGeoTransform& working_warp_gt,
                                 const CorrectionModel& model, const AffineGeoTransform& out_gt,
                                 int out_width, int out_height, InterpolationMethod m);

}  // namespace mura
