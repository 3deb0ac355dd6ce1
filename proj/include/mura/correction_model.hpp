#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mura/geo.hpp"
#include "mura/tiepoints.hpp"

namespace mura {

enum class ModelKind : uint8_t { shift, affine, quadratic };

int params_per_axis(ModelKind k);
const char* to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

/// Polynomial mapping from base working-resolution pixels to the matching
/// warp working-resolution pixels. `a` holds the x-equation coefficients,
/// `b` the y-equation, in fixed monomial order
/// [1, x, y, x^2, x*y, y^2] truncated to the kind's length:
///   shift      x_w = a1 + x_b
///   affine     x_w = a1 + a2*x_b + a3*y_b
///   quadratic  x_w = a1 + a2*x_b + a3*y_b + a4*x_b^2 + a5*x_b*y_b + a6*y_b^2
struct CorrectionModel {
  ModelKind kind = ModelKind::shift;
  std::vector<double> a;
  std::vector<double> b;

  static CorrectionModel identity(ModelKind k = ModelKind::shift);
  bool well_formed() const;
};

/// Basis monomials of the kind, evaluated at p, in serialization order.
/// Note the shift basis is just [1]: the model adds the raw coordinate back
/// during evaluation, so its single coefficient is a pure offset.
std::vector<double> design_row(ModelKind kind, PixelPoint p);

PixelPoint evaluate(const CorrectionModel& model, PixelPoint p);

struct FitReport {
  double rmse_before = 0.0;  // identity model on the evaluated set
  double rmse_after = 0.0;   // fitted model on inliers
  int inlier_count = 0;
  int total_count = 0;
  std::vector<PixelPoint> residuals;  // (dx, dy) = evaluate(base) - warp, per tiepoint
};

/// Least-squares coefficient estimate. x and y are solved as independent
/// linear systems sharing one design matrix; the quadratic basis is fit on
/// coordinates rescaled to [-1,1] and re-expanded so the ill-conditioning of
/// raw x^2 columns never reaches the solver. cond_limit bounds the accepted
/// R-diagonal ratio of the factorization.
/// Throws InsufficientPoints, RankDeficient.
CorrectionModel fit(ModelKind kind, const TiePointSet& tps, double cond_limit = 1e12);
CorrectionModel fit(ModelKind kind, std::span<const TiePoint> tps, double cond_limit = 1e12);

/// sqrt(mean |evaluate(base_k) - warp_k|^2). Throws EmptySet.
double reprojection_rmse(const CorrectionModel& model, std::span<const TiePoint> tps);
double reprojection_rmse(const CorrectionModel& model, const TiePointSet& tps);

/// Serialized form used inside model JSON documents: {"kind","a","b"}.
std::string model_to_json(const CorrectionModel& m);
CorrectionModel model_from_json(const std::string& text);

}  // namespace mura
