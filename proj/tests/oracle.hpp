#pragma once

// Test-side reference implementations, written independently of the library
// internals so both routes to the same quantity can disagree. Keep this file
// free of Eigen and of library headers other than the public API types.

#include <cstdint>
#include <utility>
#include <vector>

#include "mura/correction_model.hpp"
#include "mura/geo.hpp"
#include "mura/raster.hpp"

namespace oracle {

/// Deterministic RNG for fixtures (distinct from anything the library uses
/// to draw samples; same algorithm family is fine, streams never mix).
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next();
  double uniform();                      // [0,1)
  double uniform(double lo, double hi);  // [lo,hi)
  double gauss();                        // standard normal
};

/// Dense least squares min ||A x - y|| via plain Householder QR, no
/// pivoting, no scaling. rows = list of design rows.
std::vector<double> lsq_householder(const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& y);

/// Straightforward polynomial evaluation of a correction model using pow(),
/// as a cross-check on the library's evaluate().
mura::PixelPoint evaluate_poly(const mura::CorrectionModel& m, mura::PixelPoint p);

/// Brute-force FAST-9 segment test over the whole band: corner flags and
/// response scores computed by checking all 16 arc start positions, plus the
/// documented 3x3 tie-broken non-maximum suppression. Returns corner pixel
/// coordinates (col, row) in raster order.
std::vector<std::pair<int, int>> naive_fast(const mura::Band& band, int threshold);

/// Per-pixel five-step alignment chain with nearest sampling, written as its
/// own loop over the public geo primitives.
mura::Band naive_chain_nearest(const mura::Band& src, const mura::AffineGeoTransform& wb_gt,
                               const mura::AffineGeoTransform& ww_gt,
                               const mura::CorrectionModel& model,
                               const mura::AffineGeoTransform& out_gt, int ow, int oh);

double mean(const std::vector<double>& v);
double stddev_population(const std::vector<double>& v);

}  // namespace oracle
