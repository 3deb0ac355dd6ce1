#include "mura/correction_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mura/errors.hpp"

namespace mura {

int params_per_axis(ModelKind k) {
  switch (k) {
    case ModelKind::shift: return 1;
    case ModelKind::affine: return 3;
    case ModelKind::quadratic: return 6;
  }
  return 1;
}

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::shift: return "shift";
    case ModelKind::affine: return "affine";
    case ModelKind::quadratic: return "quadratic";
  }
  return "shift";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "shift") return ModelKind::shift;
  if (s == "affine") return ModelKind::affine;
  if (s == "quadratic") return ModelKind::quadratic;
  throw ParseError("unknown model kind \"" + s + "\"");
}

CorrectionModel CorrectionModel::identity(ModelKind k) {
  CorrectionModel m;
  m.kind = k;
  m.a.assign(std::size_t(params_per_axis(k)), 0.0);
  m.b = m.a;
  switch (k) {
    case ModelKind::shift:
      break;  // zero offsets
    case ModelKind::affine:
    case ModelKind::quadratic:
      m.a[1] = 1.0;  // x term
      m.b[2] = 1.0;  // y term
      break;
  }
  return m;
}

bool CorrectionModel::well_formed() const {
  const std::size_t k = std::size_t(params_per_axis(kind));
  if (a.size() != k || b.size() != k) return false;
  for (double v : a)
    if (!std::isfinite(v)) return false;
  for (double v : b)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> design_row(ModelKind kind, PixelPoint p) {
  switch (kind) {
    case ModelKind::shift: return {1.0};
    case ModelKind::affine: return {1.0, p.x, p.y};
    case ModelKind::quadratic: return {1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y};
  }
  return {1.0};
}

PixelPoint evaluate(const CorrectionModel& model, PixelPoint p) {
  switch (model.kind) {
    case ModelKind::shift:
      return {p.x + model.a[0], p.y + model.b[0]};
    case ModelKind::affine:
      return {model.a[0] + model.a[1] * p.x + model.a[2] * p.y,
              model.b[0] + model.b[1] * p.x + model.b[2] * p.y};
    case ModelKind::quadratic: {
      const double xx = p.x * p.x, xy = p.x * p.y, yy = p.y * p.y;
      return {model.a[0] + model.a[1] * p.x + model.a[2] * p.y + model.a[3] * xx +
                  model.a[4] * xy + model.a[5] * yy,
              model.b[0] + model.b[1] * p.x + model.b[2] * p.y + model.b[3] * xx +
                  model.b[4] * xy + model.b[5] * yy};
    }
  }
  return p;
}

namespace {

struct AxisScale {
  // u = alpha * x + beta maps the observed coordinate range onto [-1, 1].
  double alpha = 1.0;
  double beta = 0.0;
};

AxisScale scale_for(double lo, double hi) {
  AxisScale s;
  const double half = (hi - lo) / 2.0;
  const double mid = (hi + lo) / 2.0;
  if (half > 1e-12) {
    s.alpha = 1.0 / half;
    s.beta = -mid / half;
  } else {
    s.alpha = 1.0;
    s.beta = -mid;  // degenerate spread; the rank check rejects it downstream
  }
  return s;
}

/// Rewrites quadratic coefficients found in (u, v) = (ax*x+bx, ay*y+by) space
/// back to raw (x, y) coordinates by expanding the substituted polynomial.
std::vector<double> unscale_quadratic(const std::vector<double>& t, AxisScale sx, AxisScale sy) {
  const double A = sx.alpha, B = sx.beta, G = sy.alpha, D = sy.beta;
  std::vector<double> c(6, 0.0);
  c[0] = t[0] + t[1] * B + t[2] * D + t[3] * B * B + t[4] * B * D + t[5] * D * D;
  c[1] = t[1] * A + 2.0 * t[3] * A * B + t[4] * A * D;
  c[2] = t[2] * G + t[4] * B * G + 2.0 * t[5] * G * D;
  c[3] = t[3] * A * A;
  c[4] = t[4] * A * G;
  c[5] = t[5] * G * G;
  return c;
}

}  // namespace

CorrectionModel fit(ModelKind kind, std::span<const TiePoint> tps, double cond_limit) {
  const int k = params_per_axis(kind);
  const long n = long(tps.size());
  if (n < k)
    throw InsufficientPoints("need at least " + std::to_string(k) + " tiepoints for a " +
                             std::string(to_string(kind)) + " model, got " + std::to_string(n));

  AxisScale sx, sy;
  if (kind == ModelKind::quadratic) {
    double xlo = tps[0].base.x, xhi = xlo, ylo = tps[0].base.y, yhi = ylo;
    for (const TiePoint& t : tps) {
      xlo = std::min(xlo, t.base.x);
      xhi = std::max(xhi, t.base.x);
      ylo = std::min(ylo, t.base.y);
      yhi = std::max(yhi, t.base.y);
    }
    sx = scale_for(xlo, xhi);
    sy = scale_for(ylo, yhi);
  }

  Eigen::MatrixXd A(n, k);
  Eigen::VectorXd rx(n), ry(n);
  for (long i = 0; i < n; ++i) {
    const TiePoint& t = tps[i];
    PixelPoint p = t.base;
    if (kind == ModelKind::quadratic)
      p = {sx.alpha * p.x + sx.beta, sy.alpha * p.y + sy.beta};
    const std::vector<double> row = design_row(kind, p);
    for (int j = 0; j < k; ++j) A(i, j) = row[std::size_t(j)];
    if (kind == ModelKind::shift) {
      // The shift basis regresses offsets, not absolute positions.
      rx(i) = t.warp.x - t.base.x;
      ry(i) = t.warp.y - t.base.y;
    } else {
      rx(i) = t.warp.x;
      ry(i) = t.warp.y;
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::VectorXd diag =
      qr.matrixQR().topLeftCorner(k, k).diagonal().cwiseAbs();
  const double dmax = diag.maxCoeff();
  const double dmin = diag.minCoeff();
  if (!(dmin > 0.0) || dmax / dmin > cond_limit)
    throw RankDeficient("tiepoint geometry is degenerate for a " +
                        std::string(to_string(kind)) + " model (condition estimate " +
                        (dmin > 0.0 ? std::to_string(dmax / dmin) : std::string("inf")) + ")");

  const Eigen::VectorXd ca = qr.solve(rx);
  const Eigen::VectorXd cb = qr.solve(ry);

  CorrectionModel m;
  m.kind = kind;
  m.a.assign(ca.data(), ca.data() + k);
  m.b.assign(cb.data(), cb.data() + k);
  if (kind == ModelKind::quadratic) {
    m.a = unscale_quadratic(m.a, sx, sy);
    m.b = unscale_quadratic(m.b, sx, sy);
  }
  if (!m.well_formed())
    throw RankDeficient("least-squares solution is not finite");
  return m;
}

CorrectionModel fit(ModelKind kind, const TiePointSet& tps, double cond_limit) {
  return fit(kind, std::span<const TiePoint>(tps.points), cond_limit);
}

double reprojection_rmse(const CorrectionModel& model, std::span<const TiePoint> tps) {
  if (tps.empty()) throw EmptySet("reprojection RMSE over zero tiepoints");
  double acc = 0.0;
  for (const TiePoint& t : tps) {
    const PixelPoint e = evaluate(model, t.base);
    const double dx = e.x - t.warp.x;
    const double dy = e.y - t.warp.y;
    acc += dx * dx + dy * dy;
  }
  return std::sqrt(acc / double(tps.size()));
}

double reprojection_rmse(const CorrectionModel& model, const TiePointSet& tps) {
  return reprojection_rmse(model, std::span<const TiePoint>(tps.points));
}

std::string model_to_json(const CorrectionModel& m) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(m.kind);
  j["a"] = m.a;
  j["b"] = m.b;
  return j.dump();
}

CorrectionModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  CorrectionModel m;
  try {
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.a = j.at("a").get<std::vector<double>>();
    m.b = j.at("b").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  if (!m.well_formed())
    throw ParseError("model JSON: coefficient counts do not match kind \"" +
                     std::string(to_string(m.kind)) + "\"");
  return m;
}

}  // namespace mura
