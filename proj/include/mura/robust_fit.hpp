#pragma once

#include <cstdint>
#include <vector>

#include "mura/correction_model.hpp"
#include "mura/tiepoints.hpp"

namespace mura {

struct RansacConfig {
  double inlier_threshold_px = 1.0;  // residual bound at working resolution
  int max_iterations = 2000;
  double confidence = 0.999;  // adaptive early-stop target
  uint64_t seed = 0;
  int refit_rounds = 3;  // nominal inlier re-estimation rounds
};

struct RobustFitResult {
  CorrectionModel model;            // least-squares fit on the final inlier set
  std::vector<uint8_t> inlier_mask;  // one flag per input tiepoint
  FitReport report;
  int iterations_used = 0;
  std::vector<double> refit_rmse;  // inlier RMSE after each refinement round
};

/// Hypothesize-and-verify search for the largest tiepoint consensus set,
/// followed by iterative refit/re-classify refinement until the inlier set
/// stops changing. Deterministic for a fixed seed: per-iteration random
/// subsets come from a counter-based stream, so results do not depend on
/// scheduling and a larger iteration budget can only grow the consensus.
/// Throws InsufficientPoints, NoConsensus.
RobustFitResult ransac_fit(ModelKind kind, const TiePointSet& tps, const RansacConfig& cfg);

}  // namespace mura
