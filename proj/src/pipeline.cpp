#include "mura/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mura/errors.hpp"
#include "mura/raster_io.hpp"

namespace fs = std::filesystem;

namespace mura {

namespace {

bool name_contains(const std::string& name, const char* needle) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower.find(needle) != std::string::npos;
}

/// Alignment runs PAN-to-PAN when a panchromatic band exists, else band 0.
std::size_t alignment_band_index(const GeoRaster& r) {
  for (std::size_t i = 0; i < r.band_count(); ++i)
    if (name_contains(r.band(i).meta().name, "pan")) return i;
  return 0;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

nlohmann::ordered_json grid_to_json(const Band& b) {
  nlohmann::ordered_json j;
  j["width"] = b.width();
  j["height"] = b.height();
  j["geotransform"] = b.transform().six();
  return j;
}

std::string build_model_document(const AlignmentJob& job, const AlignResult& res,
                                 const Band& wbase, const Band& wwarp) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(res.fit.model.kind);
  j["a"] = res.fit.model.a;
  j["b"] = res.fit.model.b;
  j["working_gsd_m"] = res.working_gsd_m;
  j["base_grid"] = grid_to_json(wbase);
  j["warp_grid"] = grid_to_json(wwarp);

  nlohmann::ordered_json meta;
  meta["model_policy"] = job.model_policy;
  meta["interpolation"] = to_string(job.interpolation);
  meta["tiepoints"] = res.tiepoints.provenance;
  meta["tiepoint_count"] = res.tiepoints.size();
  meta["inlier_count"] = res.fit.report.inlier_count;
  meta["iterations_used"] = res.fit.iterations_used;
  nlohmann::ordered_json rc;
  rc["inlier_threshold_px"] = job.ransac.inlier_threshold_px;
  rc["max_iterations"] = job.ransac.max_iterations;
  rc["confidence"] = job.ransac.confidence;
  rc["seed"] = job.ransac.seed;
  rc["refit_rounds"] = job.ransac.refit_rounds;
  meta["ransac"] = std::move(rc);
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

void write_fit_report(const FitReport& r, const std::string& path) {
  nlohmann::ordered_json j;
  j["rmse_before"] = r.rmse_before;
  j["rmse_after"] = r.rmse_after;
  j["inlier_count"] = r.inlier_count;
  j["total_count"] = r.total_count;
  nlohmann::ordered_json res = nlohmann::ordered_json::array();
  for (const PixelPoint& p : r.residuals) res.push_back({p.x, p.y});
  j["residuals"] = std::move(res);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write fit report \"" + path + "\"");
  out << j.dump(2) << "\n";
}

}  // namespace

AlignResult align_pair(const AlignmentJob& job) {
  GeoRaster base = read_raster(job.base_path);
  GeoRaster warp = read_raster(job.warp_path);
  base.validate();
  warp.validate();
  if (base.crs_id() != warp.crs_id())
    throw CrsMismatch("base CRS \"" + base.crs_id() + "\" differs from warp CRS \"" +
                      warp.crs_id() + "\"");
  if (job.aoi) {
    base = clip(base, *job.aoi);
    warp = clip(warp, *job.aoi);
  }
  if (!footprint(base).intersects(footprint(warp)))
    throw NoOverlap("base and warp footprints are disjoint");

  const Band& base_pan = base.band(alignment_band_index(base));
  const Band& warp_pan = warp.band(alignment_band_index(warp));

  // Downsampling for matching wants anti-aliasing, so the working view is
  // area-averaged; job.interpolation stays the policy for the output bands.
  const WorkingResolution working = working_resolution_for(base_pan, warp_pan);
  auto working_view = [&](const Band& b) {
    const bool axis_aligned = b.transform().axis_aligned() && working.grid.axis_aligned();
    return to_working_resolution(
        b, working, axis_aligned ? InterpolationMethod::area_average : job.interpolation);
  };
  const Band wbase = working_view(base_pan);
  const Band wwarp = working_view(warp_pan);

  TiePointSet tps;
  if (job.tiepoint_source == "builtin") {
    const std::vector<PixelPoint> bpts =
        detect_corners(wbase, job.detector.max_count, job.detector.threshold);
    const std::vector<PixelPoint> wpts =
        detect_corners(wwarp, job.detector.max_count, job.detector.threshold);
    tps = describe_and_match(wbase, wwarp, bpts, wpts, job.matcher);
    tps.working_gsd_m = working.gsd_m;
  } else {
    tps = import_tiepoints(job.tiepoint_source);
    if (tps.base_width != wbase.width() || tps.base_height != wbase.height() ||
        tps.warp_width != wwarp.width() || tps.warp_height != wwarp.height())
      throw Error("imported tiepoint grid " + std::to_string(tps.base_width) + "x" +
                  std::to_string(tps.base_height) + " / " + std::to_string(tps.warp_width) +
                  "x" + std::to_string(tps.warp_height) +
                  " does not match the working grids " + std::to_string(wbase.width()) + "x" +
                  std::to_string(wbase.height()) + " / " + std::to_string(wwarp.width()) + "x" +
                  std::to_string(wwarp.height()));
  }

  AlignResult res;
  res.working_gsd_m = working.gsd_m;
  res.tiepoints = tps;

  try {
    if (job.model_policy == "auto") {
      RobustFitResult affine = ransac_fit(ModelKind::affine, tps, job.ransac);
      res.fit = affine;
      res.used_kind = ModelKind::affine;
      // Enough support to pay for six parameters per axis: try the richer
      // model, keep it only if it actually reduces the inlier RMSE.
      if (affine.report.inlier_count >= 4 * params_per_axis(ModelKind::quadratic)) {
        try {
          RobustFitResult quad = ransac_fit(ModelKind::quadratic, tps, job.ransac);
          if (quad.report.rmse_after <= affine.report.rmse_after) {
            res.fit = quad;
            res.used_kind = ModelKind::quadratic;
          }
        } catch (const NoConsensus&) {
          // richer model found no support; the affine result stands
        }
      }
    } else {
      const ModelKind kind = model_kind_from_string(job.model_policy);
      res.fit = ransac_fit(kind, tps, job.ransac);
      res.used_kind = kind;
    }
  } catch (const NoConsensus& e) {
    throw FailedAlignment(std::string("no tiepoint consensus: ") + e.what());
  }

  // Every spectral band of the warp image rides the PAN-fit polynomial; only
  // the per-band affine projections differ. Output grid = the band's own
  // grid, so already-georeferenced metadata stays valid.
  std::vector<Band> aligned_bands;
  aligned_bands.reserve(warp.band_count());
  for (const Band& b : warp.bands()) {
    const InterpolationMethod m = name_contains(b.meta().name, "mask")
                                      ? InterpolationMethod::nearest
                                      : job.interpolation;
    aligned_bands.push_back(resample_band_through_model(b, wbase.transform(), wwarp.transform(),
                                                        res.fit.model, b.transform(), b.width(),
                                                        b.height(), m));
  }
  res.aligned = GeoRaster(warp.crs_id(), std::move(aligned_bands));
  res.model_document = build_model_document(job, res, wbase, wwarp);

  if (!job.output_dir.empty()) {
    fs::create_directories(job.output_dir);
    std::string ext = fs::path(job.warp_path).extension().string();
    if (ext != ".tif" && ext != ".tiff" && ext != ".json") ext = ".json";
    res.aligned_path = (fs::path(job.output_dir) / ("aligned" + ext)).string();
    res.model_path = (fs::path(job.output_dir) / "model.json").string();
    res.report_path = (fs::path(job.output_dir) / "report.json").string();
    write_raster(res.aligned, res.aligned_path);
    std::ofstream m(res.model_path);
    if (!m) throw IoError("cannot write model \"" + res.model_path + "\"");
    m << res.model_document;
    write_fit_report(res.fit.report, res.report_path);
  }
  return res;
}

StackReport align_stack(const std::vector<AlignmentJob>& jobs, int workers) {
  StackReport report;
  report.rows.resize(jobs.size());

  const int n_workers = std::max(1, std::min<int>(workers, int(jobs.size() ? jobs.size() : 1)));
  std::atomic<std::size_t> next{0};
  auto run = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      StackRow row;
      row.scene_id = jobs[i].scene_id.empty() ? stem_of(jobs[i].warp_path) : jobs[i].scene_id;
      try {
        const AlignResult r = align_pair(jobs[i]);
        row.ok = true;
        row.rmse_before = r.fit.report.rmse_before;
        row.rmse_after = r.fit.report.rmse_after;
        row.inliers = r.fit.report.inlier_count;
        row.model_kind = to_string(r.used_kind);
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      report.rows[i] = std::move(row);
    }
  };

  if (n_workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }

  std::vector<double> before, after;
  for (const StackRow& row : report.rows) {
    if (!row.ok) {
      ++report.failed;
      continue;
    }
    ++report.succeeded;
    before.push_back(row.rmse_before);
    after.push_back(row.rmse_after);
  }
  auto mean_of = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
  };
  auto std_of = [](const std::vector<double>& v, double mean) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / double(v.size()));
  };
  report.mean_before = mean_of(before);
  report.std_before = std_of(before, report.mean_before);
  report.mean_after = mean_of(after);
  report.std_after = std_of(after, report.mean_after);
  return report;
}

std::string format_stack_text(const StackReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %12s %12s %8s %-10s\n", "Scene", "RMSE Before",
                "RMSE After", "Inliers", "Model");
  out << line;
  out << std::string(74, '-') << "\n";
  for (const StackRow& r : report.rows) {
    if (r.ok) {
      std::snprintf(line, sizeof line, "%-28s %12.3f %12.3f %8d %-10s\n", r.scene_id.c_str(),
                    r.rmse_before, r.rmse_after, r.inliers, r.model_kind.c_str());
    } else {
      std::snprintf(line, sizeof line, "%-28s %34s  %s\n", r.scene_id.c_str(), "FAILED:",
                    r.error.c_str());
    }
    out << line;
  }
  out << std::string(74, '-') << "\n";
  std::snprintf(line, sizeof line, "%-28s %12.3f %12.3f\n", "Avg", report.mean_before,
                report.mean_after);
  out << line;
  std::snprintf(line, sizeof line, "%-28s %12.3f %12.3f\n", "Std Dev", report.std_before,
                report.std_after);
  out << line;
  return out.str();
}

std::string format_stack_csv(const StackReport& report) {
  std::ostringstream out;
  out << "scene_id,status,rmse_before,rmse_after,inliers,model_kind\n";
  char line[256];
  for (const StackRow& r : report.rows) {
    if (r.ok) {
      std::snprintf(line, sizeof line, "%s,ok,%.6f,%.6f,%d,%s\n", r.scene_id.c_str(),
                    r.rmse_before, r.rmse_after, r.inliers, r.model_kind.c_str());
      out << line;
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << r.scene_id << ",error,,,," << msg << "\n";
    }
  }
  std::snprintf(line, sizeof line, "Avg,,%.6f,%.6f,,\n", report.mean_before, report.mean_after);
  out << line;
  std::snprintf(line, sizeof line, "Std Dev,,%.6f,%.6f,,\n", report.std_before,
                report.std_after);
  out << line;
  return out.str();
}

void write_stack_json(const StackReport& report, const std::string& path) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const StackRow& r : report.rows) {
    nlohmann::ordered_json jr;
    jr["scene_id"] = r.scene_id;
    jr["status"] = r.ok ? "ok" : "error";
    if (r.ok) {
      jr["rmse_before"] = r.rmse_before;
      jr["rmse_after"] = r.rmse_after;
      jr["inliers"] = r.inliers;
      jr["model_kind"] = r.model_kind;
    } else {
      jr["error"] = r.error;
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  j["succeeded"] = report.succeeded;
  j["failed"] = report.failed;
  nlohmann::ordered_json agg;
  agg["mean_before"] = report.mean_before;
  agg["std_before"] = report.std_before;
  agg["mean_after"] = report.mean_after;
  agg["std_after"] = report.std_after;
  j["aggregate"] = std::move(agg);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write stack report \"" + path + "\"");
  out << j.dump(2) << "\n";
}

StackReport read_stack_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stack report \"" + path + "\"");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("stack report JSON: ") + e.what());
  }
  StackReport report;
  try {
    for (const auto& jr : j.at("rows")) {
      StackRow r;
      r.scene_id = jr.at("scene_id").get<std::string>();
      r.ok = jr.at("status").get<std::string>() == "ok";
      if (r.ok) {
        r.rmse_before = jr.at("rmse_before").get<double>();
        r.rmse_after = jr.at("rmse_after").get<double>();
        r.inliers = jr.at("inliers").get<int>();
        r.model_kind = jr.at("model_kind").get<std::string>();
      } else {
        r.error = jr.value("error", std::string());
      }
      report.rows.push_back(std::move(r));
    }
    report.succeeded = j.at("succeeded").get<int>();
    report.failed = j.at("failed").get<int>();
    const auto& agg = j.at("aggregate");
    report.mean_before = agg.at("mean_before").get<double>();
    report.std_before = agg.at("std_before").get<double>();
    report.mean_after = agg.at("mean_after").get<double>();
    report.std_after = agg.at("std_after").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("stack report JSON: ") + e.what());
  }
  return report;
}

// ---- synthetic evaluation pairs ----

namespace {

uint64_t splitmix64(uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(uint64_t& s) {
  return double(splitmix64(s) >> 11) * (1.0 / 9007199254740992.0);
}

double gaussian(uint64_t& s) {
  // Box-Muller; the (0,1] shift keeps log() away from zero.
  const double u1 = 1.0 - uniform01(s);
  const double u2 = uniform01(s);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Band-limited noise plus hard-edged blobs: enough corners for the detector
/// everywhere, plus contrast at several scales.
void paint_texture(Band& b, uint64_t seed) {
  const int w = b.width(), h = b.height();
  uint64_t s = seed ^ 0xC0FFEE0Dull;

  constexpr int kCoarse = 16;
  double lattice[kCoarse + 1][kCoarse + 1];
  for (int j = 0; j <= kCoarse; ++j)
    for (int i = 0; i <= kCoarse; ++i) lattice[j][i] = 40.0 + 150.0 * uniform01(s);

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double u = double(c) / double(w) * kCoarse;
      const double v = double(r) / double(h) * kCoarse;
      const int i = std::min(int(u), kCoarse - 1), j = std::min(int(v), kCoarse - 1);
      const double fu = u - i, fv = v - j;
      const double base = (1 - fu) * (1 - fv) * lattice[j][i] + fu * (1 - fv) * lattice[j][i + 1] +
                          (1 - fu) * fv * lattice[j + 1][i] + fu * fv * lattice[j + 1][i + 1];
      b.set(c, r, float(base));
    }
  }

  const int blobs = std::max(24, w * h / 1200);
  for (int k = 0; k < blobs; ++k) {
    const int cx = int(uniform01(s) * w);
    const int cy = int(uniform01(s) * h);
    const int size = 2 + int(uniform01(s) * 6.0);
    const double level = uniform01(s) < 0.5 ? 10.0 + 40.0 * uniform01(s)
                                            : 180.0 + 60.0 * uniform01(s);
    const bool disc = uniform01(s) < 0.5;
    for (int dy = -size; dy <= size; ++dy) {
      for (int dx = -size; dx <= size; ++dx) {
        if (disc && dx * dx + dy * dy > size * size) continue;
        const int x = cx + dx, y = cy + dy;
        if (x < 0 || x >= w || y < 0 || y >= h) continue;
        b.set(x, y, float(level));
      }
    }
  }

  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      b.set(c, r, float(std::clamp(double(b.at(c, r)) + 2.0 * gaussian(s), 0.0, 255.0)));
}

PixelPoint invert_model(const CorrectionModel& m, PixelPoint q) {
  switch (m.kind) {
    case ModelKind::shift:
      return {q.x - m.a[0], q.y - m.b[0]};
    case ModelKind::affine: {
      // Solve the 2x2 linear system q = A p + t.
      const double det = m.a[1] * m.b[2] - m.a[2] * m.b[1];
      if (std::abs(det) < 1e-14) throw SingularTransform("affine truth model is singular");
      const double dx = q.x - m.a[0], dy = q.y - m.b[0];
      return {(m.b[2] * dx - m.a[2] * dy) / det, (m.a[1] * dy - m.b[1] * dx) / det};
    }
    case ModelKind::quadratic: {
      PixelPoint p{q.x - m.a[0], q.y - m.b[0]};
      for (int it = 0; it < 8; ++it) {
        const PixelPoint f = evaluate(m, p);
        const double rx = f.x - q.x, ry = f.y - q.y;
        if (std::abs(rx) < 1e-12 && std::abs(ry) < 1e-12) break;
        const double jxx = m.a[1] + 2 * m.a[3] * p.x + m.a[4] * p.y;
        const double jxy = m.a[2] + m.a[4] * p.x + 2 * m.a[5] * p.y;
        const double jyx = m.b[1] + 2 * m.b[3] * p.x + m.b[4] * p.y;
        const double jyy = m.b[2] + m.b[4] * p.x + 2 * m.b[5] * p.y;
        const double det = jxx * jyy - jxy * jyx;
        if (std::abs(det) < 1e-14) break;
        p.x -= (jyy * rx - jxy * ry) / det;
        p.y -= (jxx * ry - jyx * rx) / det;
      }
      return p;
    }
  }
  return q;
}

float bilinear_or_edge(const Band& b, PixelPoint p) {
  const double cx = std::clamp(p.x, 0.5, double(b.width()) - 0.5);
  const double cy = std::clamp(p.y, 0.5, double(b.height()) - 0.5);
  const int x0 = std::min(int(std::floor(cx - 0.5)), b.width() - 1);
  const int y0 = std::min(int(std::floor(cy - 0.5)), b.height() - 1);
  const int x1 = std::min(x0 + 1, b.width() - 1);
  const int y1 = std::min(y0 + 1, b.height() - 1);
  const double fx = cx - 0.5 - x0, fy = cy - 0.5 - y0;
  return float((1 - fx) * (1 - fy) * b.at(x0, y0) + fx * (1 - fy) * b.at(x1, y0) +
               (1 - fx) * fy * b.at(x0, y1) + fx * fy * b.at(x1, y1));
}

}  // namespace

SyntheticPair generate_synthetic(const SyntheticSpec& spec) {
  if (spec.width < 32 || spec.height < 32)
    throw Error("synthetic grids need at least 32x32 working pixels");
  if (!(spec.resolution_ratio >= 1.0)) throw Error("resolution_ratio must be >= 1");
  if (!spec.truth.well_formed()) throw Error("synthetic truth model is malformed");

  const double g = spec.gsd_m;
  const int ww = spec.width, wh = spec.height;
  const int bw = int(std::lround(ww * spec.resolution_ratio));
  const int bh = int(std::lround(wh * spec.resolution_ratio));

  // Both images cover the same footprint, north-up, origin shared, so the
  // working grids derived from the base line up with the warp grid exactly
  // and the only misalignment is the one injected by the truth model.
  AffineGeoTransform warp_gt;
  warp_gt.origin_x = 0.0;
  warp_gt.origin_y = wh * g;
  warp_gt.pixel_width = g;
  warp_gt.pixel_height = -g;

  AffineGeoTransform base_gt = warp_gt;
  base_gt.pixel_width = double(ww) * g / double(bw);
  base_gt.pixel_height = -(double(wh) * g / double(bh));

  BandMeta base_meta{"pan", std::abs(base_gt.pixel_width), ""};
  Band base_band(bw, bh, SampleType::f32, base_gt, base_meta);
  paint_texture(base_band, spec.seed);

  // The working-resolution view of the base shares the warp grid here (same
  // origin and GSD), so warp content at working pixel q comes from base
  // content at truth^-1(q).
  // A coarse sensor integrates over its footprint, so each warp pixel
  // averages a subsample grid matched to the resolution ratio. At ratio 1
  // the single subsample sits on the pixel center and an identity truth
  // reproduces the base exactly.
  BandMeta warp_meta{"pan", g, ""};
  Band warp_band(ww, wh, SampleType::f32, warp_gt, warp_meta);
  const int ss = std::max(1, int(std::lround(spec.resolution_ratio)));
  for (int r = 0; r < wh; ++r) {
    for (int c = 0; c < ww; ++c) {
      double acc = 0.0;
      for (int sj = 0; sj < ss; ++sj) {
        for (int si = 0; si < ss; ++si) {
          const PixelPoint q{c + (si + 0.5) / ss, r + (sj + 0.5) / ss};
          const PixelPoint p = invert_model(spec.truth, q);
          const PixelPoint fine = backproject(base_gt, project(warp_gt, p));
          acc += bilinear_or_edge(base_band, fine);
        }
      }
      warp_band.set(c, r, float(acc / double(ss * ss)));
    }
  }

  SyntheticPair pair{GeoRaster(spec.crs_id, {std::move(base_band)}),
                     GeoRaster(spec.crs_id, {std::move(warp_band)}), spec.truth};
  return pair;
}

SyntheticTiePoints synthetic_tiepoints(const CorrectionModel& truth, int count, int width,
                                       int height, double sigma, double outlier_fraction,
                                       uint64_t seed, double gsd_m) {
  if (count < 0) throw Error("tiepoint count must be non-negative");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
    throw Error("outlier fraction must lie in [0,1)");
  if (sigma < 0.0) throw Error("noise sigma must be non-negative");

  constexpr double kMargin = 8.0;
  if (width <= 2 * kMargin || height <= 2 * kMargin)
    throw Error("grid too small for the tiepoint margin");

  uint64_t s = seed ^ 0x7E3A11C4D2F09B61ull;
  struct Labeled {
    TiePoint tp;
    uint8_t outlier;
  };
  std::vector<Labeled> pts;
  pts.reserve(std::size_t(count));
  while (long(pts.size()) < count) {
    TiePoint tp;
    tp.base.x = kMargin + uniform01(s) * (width - 2 * kMargin);
    tp.base.y = kMargin + uniform01(s) * (height - 2 * kMargin);
    bool dup = false;
    for (const Labeled& q : pts)
      if (std::abs(q.tp.base.x - tp.base.x) <= 1e-6 && std::abs(q.tp.base.y - tp.base.y) <= 1e-6) {
        dup = true;
        break;
      }
    if (dup) continue;

    uint8_t outlier = uniform01(s) < outlier_fraction ? 1 : 0;
    if (outlier) {
      tp.warp.x = uniform01(s) * width;
      tp.warp.y = uniform01(s) * height;
      tp.score = 0.5;
    } else {
      const PixelPoint t = evaluate(truth, tp.base);
      tp.warp.x = t.x + sigma * gaussian(s);
      tp.warp.y = t.y + sigma * gaussian(s);
      tp.score = 1.0;
    }
    tp.warp.x = std::clamp(tp.warp.x, 0.0, double(width));
    tp.warp.y = std::clamp(tp.warp.y, 0.0, double(height));
    pts.push_back({tp, outlier});
  }

  std::sort(pts.begin(), pts.end(), [](const Labeled& a, const Labeled& b) {
    if (a.tp.base.x != b.tp.base.x) return a.tp.base.x < b.tp.base.x;
    return a.tp.base.y < b.tp.base.y;
  });

  SyntheticTiePoints out;
  out.set.provenance = "builtin";
  out.set.working_gsd_m = gsd_m;
  out.set.base_width = width;
  out.set.base_height = height;
  out.set.warp_width = width;
  out.set.warp_height = height;
  for (const Labeled& l : pts) {
    out.set.points.push_back(l.tp);
    out.is_outlier.push_back(l.outlier);
  }
  return out;
}

}  // namespace mura
