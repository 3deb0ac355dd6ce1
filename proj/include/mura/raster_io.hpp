#pragma once

#include <string>

#include "mura/raster.hpp"

namespace mura {

/// Reads a raster, auto-detecting the container by extension:
///   .json        sidecar metadata document + one raw sample file per band
///   .tif/.tiff   GeoTIFF (uncompressed strips, one sub-image per band)
/// Throws IoError / ParseError.
GeoRaster read_raster(const std::string& path);

/// Writes a raster in the format implied by the extension. The sidecar
/// writer places `<stem>.band<N>.raw` files next to the JSON document.
void write_raster(const GeoRaster& r, const std::string& path);

}  // namespace mura
