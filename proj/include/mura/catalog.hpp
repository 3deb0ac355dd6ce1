#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mura/geo.hpp"
#include "mura/raster.hpp"

namespace mura {

enum class Sensor : uint8_t { landsat8, sentinel2, planet };

const char* to_string(Sensor s);
Sensor sensor_from_string(const std::string& s);

/// "YYYY-MM-DD" <-> calendar date, with validity checking.
std::chrono::year_month_day parse_date(const std::string& iso);
std::string format_date(std::chrono::year_month_day d);

struct SceneRecord {
  std::string scene_id;
  Sensor sensor = Sensor::planet;
  std::chrono::year_month_day acquisition_date{};
  double cloud_fraction = 0.0;  // over the AOI, in [0,1]
  AOI footprint;
  std::string tile_index;  // WRS2 "path_row" or MGRS tile
  std::map<std::string, std::string> asset_paths;  // band key -> file reference
};

/// One month of the Planet reference stack.
struct PlanetMonth {
  std::string scene_id;
  int year = 0;
  unsigned month = 0;
};

struct MonthSlot {
  int year = 0;
  unsigned month = 0;
  std::string reference_scene_id;  // the Planet mosaic
  std::optional<SceneRecord> landsat8;
  std::optional<SceneRecord> sentinel2;
};

struct TileIndexEntry {
  std::string tile_index;
  AOI footprint;  // polygon footprints approximated by bounding rectangles
};

/// Tiles whose footprints intersect the AOI, largest overlap first (ties by
/// tile index). Throws NoTile when nothing intersects.
std::vector<std::string> tiles_for_aoi(const AOI& aoi, const std::vector<TileIndexEntry>& index);

/// Per Planet month and per low-resolution sensor, picks the candidate from
/// the same calendar month with the least cloud cover (ties: latest
/// acquisition date, then smallest scene id). A slot stays empty when no
/// candidate's cloud fraction is at or below max_cloud. Slot order mirrors
/// the Planet stack; months need not be consecutive.
std::vector<MonthSlot> pair_months(const std::vector<PlanetMonth>& planet_stack,
                                   const std::vector<SceneRecord>& candidates, double max_cloud);

/// Manifest: JSON array of scene records with ISO-8601 dates.
/// Throws ParseError carrying the offending record index.
std::vector<SceneRecord> load_manifest(const std::string& path);
void write_manifest(const std::vector<SceneRecord>& records, const std::string& path);

/// Pairing plan: JSON object mapping "YYYY-MM" to the chosen scene ids and
/// their asset paths, in stack order.
void write_plan(const std::vector<MonthSlot>& slots, const std::string& path);

/// Fraction of cloud-mask pixels (nonzero = cloud) whose centers fall inside
/// the AOI; nodata pixels are excluded. Recomputes a record's cloud_fraction
/// from a precomputed mask raster. Throws EmptySet when the AOI covers no
/// valid mask pixel.
double cloud_fraction_over_aoi(const Band& cloud_mask, const AOI& aoi);

}  // namespace mura
