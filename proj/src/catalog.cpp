#include "mura/catalog.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "mura/errors.hpp"

namespace mura {

const char* to_string(Sensor s) {
  switch (s) {
    case Sensor::landsat8: return "landsat8";
    case Sensor::sentinel2: return "sentinel2";
    case Sensor::planet: return "planet";
  }
  return "planet";
}

Sensor sensor_from_string(const std::string& s) {
  if (s == "landsat8") return Sensor::landsat8;
  if (s == "sentinel2") return Sensor::sentinel2;
  if (s == "planet") return Sensor::planet;
  throw ParseError("unknown sensor \"" + s + "\"");
}

std::chrono::year_month_day parse_date(const std::string& iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  char sep1 = 0, sep2 = 0, tail = 0;
  if (std::sscanf(iso.c_str(), "%d%c%u%c%u%c", &y, &sep1, &m, &sep2, &d, &tail) != 5 ||
      sep1 != '-' || sep2 != '-')
    throw ParseError("date \"" + iso + "\" is not YYYY-MM-DD");
  const std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(m),
                                        std::chrono::day(d)};
  if (!ymd.ok()) throw ParseError("date \"" + iso + "\" is not a valid calendar date");
  return ymd;
}

std::string format_date(std::chrono::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(d.year()), unsigned(d.month()),
                unsigned(d.day()));
  return buf;
}

std::vector<std::string> tiles_for_aoi(const AOI& aoi,
                                       const std::vector<TileIndexEntry>& index) {
  struct Hit {
    const TileIndexEntry* tile;
    double area;
  };
  std::vector<Hit> hits;
  for (const TileIndexEntry& t : index)
    if (aoi.intersects(t.footprint)) hits.push_back({&t, aoi.intersection_area(t.footprint)});
  if (hits.empty()) throw NoTile("no tile footprint intersects the AOI");
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.area != b.area) return a.area > b.area;
    return a.tile->tile_index < b.tile->tile_index;
  });
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (const Hit& h : hits) out.push_back(h.tile->tile_index);
  return out;
}

namespace {

/// Least cloud, then latest acquisition, then smallest id: a total order, so
/// the chosen scene never depends on manifest ordering.
bool better_candidate(const SceneRecord& a, const SceneRecord& b) {
  if (a.cloud_fraction != b.cloud_fraction) return a.cloud_fraction < b.cloud_fraction;
  const std::chrono::sys_days da{a.acquisition_date}, db{b.acquisition_date};
  if (da != db) return da > db;
  return a.scene_id < b.scene_id;
}

}  // namespace

std::vector<MonthSlot> pair_months(const std::vector<PlanetMonth>& planet_stack,
                                   const std::vector<SceneRecord>& candidates,
                                   double max_cloud) {
  if (!(max_cloud >= 0.0 && max_cloud <= 1.0))
    throw Error("max_cloud must lie in [0,1]");
  std::vector<MonthSlot> slots;
  slots.reserve(planet_stack.size());
  for (const PlanetMonth& pm : planet_stack) {
    MonthSlot slot;
    slot.year = pm.year;
    slot.month = pm.month;
    slot.reference_scene_id = pm.scene_id;
    for (const SceneRecord& c : candidates) {
      if (c.sensor == Sensor::planet) continue;
      if (int(c.acquisition_date.year()) != pm.year ||
          unsigned(c.acquisition_date.month()) != pm.month)
        continue;
      if (c.cloud_fraction > max_cloud) continue;
      std::optional<SceneRecord>& chosen =
          c.sensor == Sensor::landsat8 ? slot.landsat8 : slot.sentinel2;
      if (!chosen || better_candidate(c, *chosen)) chosen = c;
    }
    slots.push_back(std::move(slot));
  }
  return slots;
}

namespace {

nlohmann::ordered_json aoi_to_json(const AOI& a) {
  nlohmann::ordered_json j;
  j["min_x"] = a.min_x;
  j["min_y"] = a.min_y;
  j["max_x"] = a.max_x;
  j["max_y"] = a.max_y;
  if (!a.crs_id.empty()) j["crs_id"] = a.crs_id;
  return j;
}

AOI aoi_from_json(const nlohmann::json& j) {
  AOI a;
  a.min_x = j.at("min_x").get<double>();
  a.min_y = j.at("min_y").get<double>();
  a.max_x = j.at("max_x").get<double>();
  a.max_y = j.at("max_y").get<double>();
  a.crs_id = j.value("crs_id", std::string());
  return a;
}

}  // namespace

std::vector<SceneRecord> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest \"" + path + "\"");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("manifest must be a JSON array of scene records");

  std::vector<SceneRecord> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      const nlohmann::json& jr = doc[i];
      SceneRecord r;
      r.scene_id = jr.at("scene_id").get<std::string>();
      r.sensor = sensor_from_string(jr.at("sensor").get<std::string>());
      r.acquisition_date = parse_date(jr.at("acquisition_date").get<std::string>());
      r.cloud_fraction = jr.at("cloud_fraction").get<double>();
      if (!(r.cloud_fraction >= 0.0 && r.cloud_fraction <= 1.0))
        throw ParseError("cloud_fraction outside [0,1]");
      r.footprint = aoi_from_json(jr.at("footprint"));
      if (!r.footprint.valid()) throw ParseError("degenerate footprint");
      r.tile_index = jr.value("tile_index", std::string());
      if (jr.contains("asset_paths"))
        r.asset_paths = jr.at("asset_paths").get<std::map<std::string, std::string>>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("manifest record: ") + e.what(), long(i));
    } catch (const ParseError& e) {
      throw ParseError(std::string("manifest record: ") + e.what(), long(i));
    }
  }
  return out;
}

void write_manifest(const std::vector<SceneRecord>& records, const std::string& path) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const SceneRecord& r : records) {
    nlohmann::ordered_json jr;
    jr["scene_id"] = r.scene_id;
    jr["sensor"] = to_string(r.sensor);
    jr["acquisition_date"] = format_date(r.acquisition_date);
    jr["cloud_fraction"] = r.cloud_fraction;
    jr["footprint"] = aoi_to_json(r.footprint);
    jr["tile_index"] = r.tile_index;
    jr["asset_paths"] = r.asset_paths;
    doc.push_back(std::move(jr));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest \"" + path + "\"");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("short write to manifest \"" + path + "\"");
}

void write_plan(const std::vector<MonthSlot>& slots, const std::string& path) {
  nlohmann::ordered_json doc;
  for (const MonthSlot& s : slots) {
    char key[16];
    std::snprintf(key, sizeof key, "%04d-%02u", s.year, s.month);
    nlohmann::ordered_json js;
    js["landsat8"] = s.landsat8 ? nlohmann::ordered_json(s.landsat8->scene_id)
                                : nlohmann::ordered_json(nullptr);
    js["sentinel2"] = s.sentinel2 ? nlohmann::ordered_json(s.sentinel2->scene_id)
                                  : nlohmann::ordered_json(nullptr);
    // std::map keeps asset keys sorted, so the flattened list is stable.
    nlohmann::ordered_json assets = nlohmann::ordered_json::array();
    for (const std::optional<SceneRecord>& chosen : {s.landsat8, s.sentinel2})
      if (chosen)
        for (const auto& [band, file] : chosen->asset_paths) assets.push_back(file);
    js["assets"] = std::move(assets);
    doc[key] = std::move(js);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plan \"" + path + "\"");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("short write to plan \"" + path + "\"");
}

double cloud_fraction_over_aoi(const Band& cloud_mask, const AOI& aoi) {
  long total = 0, cloudy = 0;
  for (int r = 0; r < cloud_mask.height(); ++r) {
    for (int c = 0; c < cloud_mask.width(); ++c) {
      const WorldPoint w = project(cloud_mask.transform(), {c + 0.5, r + 0.5});
      if (w.x < aoi.min_x || w.x > aoi.max_x || w.y < aoi.min_y || w.y > aoi.max_y) continue;
      const float v = cloud_mask.at(c, r);
      if (cloud_mask.is_nodata(v)) continue;
      ++total;
      if (v != 0.0f) ++cloudy;
    }
  }
  if (total == 0) throw EmptySet("AOI covers no valid cloud-mask pixel");
  return double(cloudy) / double(total);
}

}  // namespace mura
