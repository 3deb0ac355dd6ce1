// mura: co-registration of multi-resolution satellite imagery.
//
// Subcommands: align (one base/warp pair), stack (a job list), pair (monthly
// least-cloud scene pairing), synth (reproducible evaluation imagery),
// report (render a stack report as a table). Diagnostics go to stderr;
// machine-readable outputs are written to files.
//
// Exit codes: 0 success, 2 alignment found no consensus, 3 bad input.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mura/catalog.hpp"
#include "mura/errors.hpp"
#include "mura/pipeline.hpp"
#include "mura/raster_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConsensus = 2;
constexpr int kExitBadInput = 3;

mura::AOI parse_aoi_flag(const std::string& text) {
  mura::AOI aoi;
  char tail = 0;
  const int n = std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf%c", &aoi.min_x, &aoi.min_y,
                            &aoi.max_x, &aoi.max_y, &tail);
  if (n != 4) throw mura::ParseError("--aoi expects min_x,min_y,max_x,max_y");
  if (!aoi.valid()) throw mura::ParseError("--aoi rectangle is empty or inverted");
  return aoi;
}

mura::AlignmentJob job_from_json(const json& j) {
  mura::AlignmentJob job;
  job.base_path = j.at("base").get<std::string>();
  job.warp_path = j.at("warp").get<std::string>();
  job.output_dir = j.value("out", std::string());
  job.scene_id = j.value("scene_id", std::string());
  job.model_policy = j.value("model", std::string("auto"));
  job.interpolation = mura::interpolation_from_string(j.value("interp", std::string("bilinear")));
  job.tiepoint_source = j.value("tiepoints", std::string("builtin"));
  job.ransac.inlier_threshold_px = j.value("threshold", job.ransac.inlier_threshold_px);
  job.ransac.max_iterations = j.value("max_iterations", job.ransac.max_iterations);
  job.ransac.confidence = j.value("confidence", job.ransac.confidence);
  job.ransac.seed = j.value("seed", job.ransac.seed);
  job.ransac.refit_rounds = j.value("refit_rounds", job.ransac.refit_rounds);
  job.detector.threshold = j.value("detector_threshold", job.detector.threshold);
  job.detector.max_count = j.value("max_keypoints", job.detector.max_count);
  job.matcher.patch_radius = j.value("patch_radius", job.matcher.patch_radius);
  job.matcher.ratio = j.value("match_ratio", job.matcher.ratio);
  if (j.contains("aoi")) {
    const auto v = j.at("aoi").get<std::vector<double>>();
    if (v.size() != 4) throw mura::ParseError("job aoi must be [min_x,min_y,max_x,max_y]");
    mura::AOI aoi;
    aoi.min_x = v[0];
    aoi.min_y = v[1];
    aoi.max_x = v[2];
    aoi.max_y = v[3];
    if (!aoi.valid()) throw mura::ParseError("job aoi rectangle is empty or inverted");
    job.aoi = aoi;
  }
  return job;
}

int run_align(const mura::AlignmentJob& job) {
  const mura::AlignResult res = mura::align_pair(job);
  std::fprintf(stderr,
               "aligned: model=%s tiepoints=%zu inliers=%d rmse_before=%.3f rmse_after=%.3f\n",
               mura::to_string(res.used_kind), res.tiepoints.size(),
               res.fit.report.inlier_count, res.fit.report.rmse_before,
               res.fit.report.rmse_after);
  if (!res.aligned_path.empty())
    std::fprintf(stderr, "wrote %s, %s, %s\n", res.aligned_path.c_str(), res.model_path.c_str(),
                 res.report_path.c_str());
  return kExitOk;
}

mura::CorrectionModel model_from_spec_json(const json& j) {
  mura::CorrectionModel m;
  m.kind = mura::model_kind_from_string(j.at("kind").get<std::string>());
  m.a = j.at("a").get<std::vector<double>>();
  m.b = j.at("b").get<std::vector<double>>();
  if (!m.well_formed()) throw mura::ParseError("truth model coefficients do not match kind");
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-registration of multi-resolution satellite image stacks"};
  app.require_subcommand(1);

  // ---- align ----
  auto* align = app.add_subcommand("align", "Align one warp raster to a base raster");
  std::string a_base, a_warp, a_out, a_aoi, a_model = "auto", a_interp = "bilinear",
              a_tiepoints = "builtin";
  double a_threshold = 1.0, a_confidence = 0.999;
  uint64_t a_seed = 0;
  int a_max_iter = 2000, a_detector_threshold = 20, a_max_keypoints = 2000;
  align->add_option("--base", a_base, "Base (reference) raster")->required();
  align->add_option("--warp", a_warp, "Raster to align")->required();
  align->add_option("--out", a_out, "Output directory")->required();
  align->add_option("--aoi", a_aoi, "Clip region min_x,min_y,max_x,max_y");
  align->add_option("--model", a_model, "shift|affine|quadratic|auto");
  align->add_option("--interp", a_interp, "nearest|bilinear|area_average");
  align->add_option("--tiepoints", a_tiepoints, "'builtin' or an interchange file");
  align->add_option("--threshold", a_threshold, "RANSAC inlier threshold (px)");
  align->add_option("--seed", a_seed, "RANSAC sampler seed");
  align->add_option("--max-iterations", a_max_iter, "RANSAC iteration budget");
  align->add_option("--confidence", a_confidence, "RANSAC early-stop confidence");
  align->add_option("--detector-threshold", a_detector_threshold, "Corner contrast threshold");
  align->add_option("--max-keypoints", a_max_keypoints, "Keypoint cap per image");

  // ---- stack ----
  auto* stack = app.add_subcommand("stack", "Align every pair in a job list");
  std::string s_jobs, s_out = "stack_report.json";
  int s_workers = 1;
  stack->add_option("--jobs", s_jobs, "JSON array of alignment jobs")->required();
  stack->add_option("--out", s_out, "Stack report JSON path");
  stack->add_option("--workers", s_workers, "Parallel jobs")->check(CLI::PositiveNumber);

  // ---- pair ----
  auto* pair = app.add_subcommand("pair", "Pick least-cloud scenes per Planet month");
  std::string p_manifest, p_months, p_out = "plan.json";
  double p_max_cloud = -1.0;
  pair->add_option("--manifest", p_manifest, "Scene manifest JSON")->required();
  pair->add_option("--planet-months", p_months,
                   "Comma-separated YYYY-MM labels of the Planet stack")
      ->required();
  pair->add_option("--max-cloud", p_max_cloud, "Cloud-fraction ceiling [0,1]")->required();
  pair->add_option("--out", p_out, "Plan JSON path");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a reproducible evaluation pair");
  std::string y_spec, y_out;
  int y_tiepoints = 0;
  synth->add_option("--spec", y_spec, "Synthetic spec JSON")->required();
  synth->add_option("--out", y_out, "Output directory")->required();
  synth->add_option("--tiepoints", y_tiepoints,
                    "Also write N synthetic tiepoints (tiepoints.txt)");

  // ---- report ----
  auto* rep = app.add_subcommand("report", "Render a stack report as a table");
  std::string r_stack, r_format = "text";
  rep->add_option("--stack", r_stack, "Stack report JSON")->required();
  rep->add_option("--format", r_format, "text|csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (align->parsed()) {
      mura::AlignmentJob job;
      job.base_path = a_base;
      job.warp_path = a_warp;
      job.output_dir = a_out;
      job.model_policy = a_model;
      job.interpolation = mura::interpolation_from_string(a_interp);
      job.tiepoint_source = a_tiepoints;
      job.ransac.inlier_threshold_px = a_threshold;
      job.ransac.seed = a_seed;
      job.ransac.max_iterations = a_max_iter;
      job.ransac.confidence = a_confidence;
      job.detector.threshold = a_detector_threshold;
      job.detector.max_count = a_max_keypoints;
      if (!a_aoi.empty()) job.aoi = parse_aoi_flag(a_aoi);
      return run_align(job);
    }

    if (stack->parsed()) {
      std::ifstream in(s_jobs);
      if (!in) throw mura::IoError("cannot open jobs file \"" + s_jobs + "\"");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw mura::ParseError(std::string("jobs JSON: ") + e.what());
      }
      if (!doc.is_array()) throw mura::ParseError("jobs file must be a JSON array");
      std::vector<mura::AlignmentJob> jobs;
      for (std::size_t i = 0; i < doc.size(); ++i) {
        try {
          jobs.push_back(job_from_json(doc[i]));
        } catch (const json::exception& e) {
          throw mura::ParseError(std::string("job entry: ") + e.what(), long(i));
        }
      }
      const mura::StackReport report = mura::align_stack(jobs, s_workers);
      mura::write_stack_json(report, s_out);
      std::fputs(mura::format_stack_text(report).c_str(), stderr);
      std::fprintf(stderr, "wrote %s (%d ok, %d failed)\n", s_out.c_str(), report.succeeded,
                   report.failed);
      return kExitOk;
    }

    if (pair->parsed()) {
      const std::vector<mura::SceneRecord> records = mura::load_manifest(p_manifest);
      std::vector<mura::PlanetMonth> months;
      std::stringstream ss(p_months);
      std::string label;
      while (std::getline(ss, label, ',')) {
        if (label.empty()) continue;
        mura::PlanetMonth pm;
        int y = 0;
        unsigned m = 0;
        char sep = 0, tail = 0;
        if (std::sscanf(label.c_str(), "%d%c%u%c", &y, &sep, &m, &tail) != 3 || sep != '-' ||
            m < 1 || m > 12)
          throw mura::ParseError("--planet-months entry \"" + label + "\" is not YYYY-MM");
        pm.year = y;
        pm.month = m;
        pm.scene_id = label;
        // A Planet record for the month names the reference mosaic.
        for (const mura::SceneRecord& r : records)
          if (r.sensor == mura::Sensor::planet && int(r.acquisition_date.year()) == y &&
              unsigned(r.acquisition_date.month()) == m) {
            pm.scene_id = r.scene_id;
            break;
          }
        months.push_back(std::move(pm));
      }
      if (months.empty()) throw mura::ParseError("--planet-months lists no months");
      const std::vector<mura::MonthSlot> slots = mura::pair_months(months, records, p_max_cloud);
      mura::write_plan(slots, p_out);
      int filled = 0;
      for (const mura::MonthSlot& s : slots) filled += (s.landsat8 || s.sentinel2) ? 1 : 0;
      std::fprintf(stderr, "wrote %s (%zu months, %d with at least one pairing)\n", p_out.c_str(),
                   slots.size(), filled);
      return kExitOk;
    }

    if (synth->parsed()) {
      std::ifstream in(y_spec);
      if (!in) throw mura::IoError("cannot open spec file \"" + y_spec + "\"");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw mura::ParseError(std::string("spec JSON: ") + e.what());
      }
      mura::SyntheticSpec spec;
      try {
        spec.width = doc.value("width", spec.width);
        spec.height = doc.value("height", spec.height);
        spec.seed = doc.value("seed", spec.seed);
        spec.noise_sigma_px = doc.value("noise_sigma_px", spec.noise_sigma_px);
        spec.outlier_fraction = doc.value("outlier_fraction", spec.outlier_fraction);
        spec.resolution_ratio = doc.value("resolution_ratio", spec.resolution_ratio);
        spec.gsd_m = doc.value("gsd_m", spec.gsd_m);
        spec.crs_id = doc.value("crs_id", spec.crs_id);
        if (doc.contains("model")) spec.truth = model_from_spec_json(doc.at("model"));
      } catch (const json::exception& e) {
        throw mura::ParseError(std::string("spec JSON: ") + e.what());
      }
      const mura::SyntheticPair pair_out = mura::generate_synthetic(spec);
      fs::create_directories(y_out);
      const std::string base_path = (fs::path(y_out) / "base.json").string();
      const std::string warp_path = (fs::path(y_out) / "warp.json").string();
      mura::write_raster(pair_out.base, base_path);
      mura::write_raster(pair_out.warp, warp_path);
      std::ofstream truth((fs::path(y_out) / "truth.json").string());
      truth << mura::model_to_json(pair_out.truth) << "\n";
      if (y_tiepoints > 0) {
        const mura::SyntheticTiePoints tps = mura::synthetic_tiepoints(
            spec.truth, y_tiepoints, spec.width, spec.height, spec.noise_sigma_px,
            spec.outlier_fraction, spec.seed, spec.gsd_m);
        mura::export_tiepoints(tps.set, (fs::path(y_out) / "tiepoints.txt").string());
      }
      std::fprintf(stderr, "wrote %s and %s\n", base_path.c_str(), warp_path.c_str());
      return kExitOk;
    }

    if (rep->parsed()) {
      const mura::StackReport report = mura::read_stack_json(r_stack);
      if (r_format == "text")
        std::fputs(mura::format_stack_text(report).c_str(), stdout);
      else if (r_format == "csv")
        std::fputs(mura::format_stack_csv(report).c_str(), stdout);
      else
        throw mura::ParseError("--format must be text or csv");
      return kExitOk;
    }
  } catch (const mura::FailedAlignment& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNoConsensus;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  }
  return kExitOk;
}
