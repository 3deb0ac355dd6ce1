#include "mura/robust_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mura/errors.hpp"

namespace mura {

namespace {

constexpr double kMinimalSampleCondLimit = 1e8;  // collinear-sample guard
constexpr uint64_t kStreamSalt = 0x9E3779B97F4A7C15ULL;

uint64_t splitmix64(uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Unbiased draw in [0, n) by rejection.
uint64_t bounded(uint64_t& state, uint64_t n) {
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % n;
  uint64_t v;
  do {
    v = splitmix64(state);
  } while (v >= limit);
  return v % n;
}

void sample_distinct(uint64_t& state, std::size_t n, std::vector<std::size_t>& out) {
  for (std::size_t filled = 0; filled < out.size();) {
    const std::size_t idx = std::size_t(bounded(state, n));
    bool seen = false;
    for (std::size_t i = 0; i < filled; ++i)
      if (out[i] == idx) {
        seen = true;
        break;
      }
    if (!seen) out[filled++] = idx;
  }
}

double residual_norm(const CorrectionModel& m, const TiePoint& t) {
  const PixelPoint e = evaluate(m, t.base);
  return std::hypot(e.x - t.warp.x, e.y - t.warp.y);
}

std::vector<uint8_t> classify(const CorrectionModel& m, const std::vector<TiePoint>& pts,
                              double threshold) {
  std::vector<uint8_t> mask(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    mask[i] = residual_norm(m, pts[i]) <= threshold ? 1 : 0;
  return mask;
}

std::vector<TiePoint> select(const std::vector<TiePoint>& pts, const std::vector<uint8_t>& mask) {
  std::vector<TiePoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (mask[i]) out.push_back(pts[i]);
  return out;
}

}  // namespace

RobustFitResult ransac_fit(ModelKind kind, const TiePointSet& tps, const RansacConfig& cfg) {
  if (!(cfg.inlier_threshold_px > 0.0)) throw Error("inlier threshold must be positive");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
    throw Error("confidence must lie strictly between 0 and 1");
  if (cfg.max_iterations < 1) throw Error("max_iterations must be at least 1");

  const std::vector<TiePoint>& pts = tps.points;
  const std::size_t n = pts.size();
  const int k = params_per_axis(kind);
  if (long(n) < k)
    throw InsufficientPoints("RANSAC needs at least " + std::to_string(k) +
                             " tiepoints, got " + std::to_string(n));
  const std::size_t consensus_floor = std::size_t(k) + 2;

  std::size_t best_count = 0;
  double best_rmse = std::numeric_limits<double>::infinity();
  std::vector<uint8_t> best_mask;
  bool have_best = false;

  const std::size_t sample_size = std::size_t(k);
  std::vector<std::size_t> sample(sample_size);
  std::vector<TiePoint> subset(sample_size);

  int iterations = 0;
  int dynamic_max = cfg.max_iterations;
  for (int iter = 0; iter < dynamic_max; ++iter) {
    ++iterations;
    // Independent per-iteration stream: iteration i draws the same subset no
    // matter how many other iterations run or in what order.
    uint64_t state = cfg.seed ^ (kStreamSalt * uint64_t(iter + 1));
    sample_distinct(state, n, sample);
    for (int j = 0; j < k; ++j) subset[std::size_t(j)] = pts[sample[std::size_t(j)]];

    CorrectionModel hyp;
    try {
      hyp = fit(kind, std::span<const TiePoint>(subset), kMinimalSampleCondLimit);
    } catch (const RankDeficient&) {
      continue;  // degenerate sample (e.g. collinear corners); draw again
    }

    const std::vector<uint8_t> mask = classify(hyp, pts, cfg.inlier_threshold_px);
    const std::size_t count = std::size_t(std::count(mask.begin(), mask.end(), uint8_t(1)));
    if (count == 0) continue;

    const std::vector<TiePoint> in = select(pts, mask);
    const double rmse = reprojection_rmse(hyp, std::span<const TiePoint>(in));
    if (count > best_count || (count == best_count && rmse < best_rmse)) {
      best_count = count;
      best_rmse = rmse;
      best_mask = mask;
      have_best = true;

      // Adaptive stop: enough iterations that a clean minimal sample was
      // drawn with the target confidence, given the inlier ratio seen so far.
      const double w = double(best_count) / double(n);
      const double p_good = std::pow(w, double(k));
      if (p_good >= 1.0 - 1e-12) {
        dynamic_max = std::min(dynamic_max, iter + 1);
      } else if (p_good > 0.0) {
        const double needed = std::log(1.0 - cfg.confidence) / std::log(1.0 - p_good);
        if (needed < double(cfg.max_iterations))
          dynamic_max = std::min(dynamic_max, std::max(iter + 1, int(std::ceil(needed))));
      }
    }
  }

  if (!have_best || best_count < consensus_floor)
    throw NoConsensus("largest consensus set has " + std::to_string(best_count) +
                      " tiepoints, below the floor of " + std::to_string(consensus_floor));

  // Refit/re-classify until the inlier set is a fixed point of the pair.
  // refit_rounds names the nominal budget; a slightly larger cap lets slow
  // cases settle. A round is committed only while the re-classified inlier
  // RMSE keeps falling; rejecting a worse round keeps the previous model,
  // whose classification is exactly the mask it was about to refit, so the
  // reported mask always matches the reported model.
  RobustFitResult res;
  res.iterations_used = iterations;
  std::vector<uint8_t> mask = best_mask;
  CorrectionModel model;
  double accepted_rmse = std::numeric_limits<double>::infinity();
  const int cap = std::max(cfg.refit_rounds, 16);
  bool fitted = false;
  for (int round = 0; round < cap; ++round) {
    std::vector<TiePoint> in = select(pts, mask);
    if (long(in.size()) < k) break;
    CorrectionModel cand;
    try {
      cand = fit(kind, std::span<const TiePoint>(in));
    } catch (const RankDeficient&) {
      if (!fitted)
        throw NoConsensus("consensus-set geometry is degenerate for the model");
      break;
    }
    const std::vector<uint8_t> next = classify(cand, pts, cfg.inlier_threshold_px);
    const std::vector<TiePoint> now = select(pts, next);
    const double cand_rmse =
        now.empty() ? 0.0 : reprojection_rmse(cand, std::span<const TiePoint>(now));
    if (fitted && cand_rmse > accepted_rmse + 1e-12) break;
    model = cand;
    accepted_rmse = cand_rmse;
    fitted = true;
    res.refit_rmse.push_back(cand_rmse);
    if (next == mask) break;
    mask = next;
  }
  if (!fitted) throw NoConsensus("consensus set could not be refit");

  res.model = model;
  res.inlier_mask = classify(model, pts, cfg.inlier_threshold_px);

  const std::vector<TiePoint> final_in = select(pts, res.inlier_mask);
  if (final_in.size() < consensus_floor)
    throw NoConsensus("final inlier set has " + std::to_string(final_in.size()) +
                      " tiepoints, below the floor of " + std::to_string(consensus_floor));

  res.report.total_count = int(n);
  res.report.inlier_count = int(final_in.size());
  res.report.rmse_after = reprojection_rmse(model, std::span<const TiePoint>(final_in));
  res.report.rmse_before = reprojection_rmse(CorrectionModel::identity(ModelKind::shift),
                                             std::span<const TiePoint>(final_in));
  res.report.residuals.reserve(n);
  for (const TiePoint& t : pts) {
    const PixelPoint e = evaluate(model, t.base);
    res.report.residuals.push_back({e.x - t.warp.x, e.y - t.warp.y});
  }
  return res;
}

}  // namespace mura
