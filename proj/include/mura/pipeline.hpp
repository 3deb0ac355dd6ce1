#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mura/catalog.hpp"
#include "mura/correction_model.hpp"
#include "mura/raster.hpp"
#include "mura/resample.hpp"
#include "mura/robust_fit.hpp"
#include "mura/tiepoints.hpp"

namespace mura {

/// One pairwise alignment: base (reference) raster, warp raster to correct.
struct AlignmentJob {
  std::string base_path;
  std::string warp_path;
  std::optional<AOI> aoi;                 // clip both inputs before aligning
  std::string model_policy = "auto";      // shift | affine | quadratic | auto
  InterpolationMethod interpolation = InterpolationMethod::bilinear;
  RansacConfig ransac;
  std::string tiepoint_source = "builtin";  // "builtin" or an interchange file path
  std::string output_dir;                   // empty: compute only, write nothing
  std::string scene_id;                     // report label; default = warp file stem
  DetectorConfig detector;
  MatcherConfig matcher;
};

struct AlignResult {
  GeoRaster aligned;
  RobustFitResult fit;
  ModelKind used_kind = ModelKind::affine;
  double working_gsd_m = 0.0;
  TiePointSet tiepoints;
  std::string model_document;  // JSON written alongside the aligned raster
  std::string aligned_path;    // empty when output_dir was empty
  std::string model_path;
  std::string report_path;
};

/// Full alignment pathway: load, clip, downsample to the working resolution,
/// tiepoints, robust model fit, then resample every warp band through the
/// fitted model on that band's own grid (mask-named bands with nearest).
/// Throws FailedAlignment when no tiepoint consensus exists; input problems
/// propagate as their own error types.
AlignResult align_pair(const AlignmentJob& job);

struct StackRow {
  std::string scene_id;
  bool ok = false;
  std::string error;  // set when !ok
  double rmse_before = 0.0;
  double rmse_after = 0.0;
  int inliers = 0;
  std::string model_kind;
};

struct StackReport {
  std::vector<StackRow> rows;  // input order
  int succeeded = 0;
  int failed = 0;
  // Aggregates over successful rows (population statistics); zero when none.
  double mean_before = 0.0;
  double std_before = 0.0;
  double mean_after = 0.0;
  double std_after = 0.0;
};

/// Runs the jobs (optionally on a small worker pool), isolating per-job
/// failures as error rows. Aggregates are recomputed from the rows.
StackReport align_stack(const std::vector<AlignmentJob>& jobs, int workers = 1);

std::string format_stack_text(const StackReport& report);
std::string format_stack_csv(const StackReport& report);
void write_stack_json(const StackReport& report, const std::string& path);
StackReport read_stack_json(const std::string& path);

/// Reproducible evaluation pair: a textured base scene plus a warp image
/// resampled from it through the inverse of a known correction model.
struct SyntheticSpec {
  int width = 256;   // warp grid, working resolution
  int height = 256;
  uint64_t seed = 1;
  CorrectionModel truth = CorrectionModel::identity(ModelKind::shift);
  double noise_sigma_px = 0.0;    // tiepoint coordinate noise
  double outlier_fraction = 0.0;  // fraction of tiepoints replaced by junk
  double resolution_ratio = 3.0;  // base GSD = gsd_m / ratio
  double gsd_m = 10.0;            // working (warp) resolution
  std::string crs_id = "EPSG:32633";
};

struct SyntheticPair {
  GeoRaster base;
  GeoRaster warp;
  CorrectionModel truth;
};

SyntheticPair generate_synthetic(const SyntheticSpec& spec);

struct SyntheticTiePoints {
  TiePointSet set;
  std::vector<uint8_t> is_outlier;  // parallel to set.points
};

/// Tiepoints drawn from a known model: base locations uniform over the grid
/// interior, warp = model(base) + Gaussian noise, with a fraction replaced
/// by uniformly random mismatches. Deterministic in the seed.
SyntheticTiePoints synthetic_tiepoints(const CorrectionModel& truth, int count, int width,
                                       int height, double sigma, double outlier_fraction,
                                       uint64_t seed, double gsd_m = 10.0);

}  // namespace mura
