#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "mura/errors.hpp"
#include "mura/tiepoints.hpp"
#include "oracle.hpp"

using namespace mura;
namespace fs = std::filesystem;

namespace {

AffineGeoTransform north_up(double ox, double oy, double gsd) {
  AffineGeoTransform gt;
  gt.origin_x = ox;
  gt.origin_y = oy;
  gt.pixel_width = gsd;
  gt.pixel_height = -gsd;
  return gt;
}

Band flat_band(int w, int h, float value) {
  Band b(w, h, SampleType::f32, north_up(0.0, h * 10.0, 10.0), {"pan", 10.0, ""});
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) b.set(c, r, value);
  return b;
}

Band textured_band(int w, int h, uint64_t seed) {
  Band b = flat_band(w, h, 0.0f);
  oracle::Rng rng(seed);
  // Smooth-ish blotches plus a few hard squares give FAST something to find.
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) b.set(c, r, float(120.0 + 30.0 * rng.gauss()));
  for (int k = 0; k < 18; ++k) {
    const int cx = 6 + int(rng.uniform(0, w - 12));
    const int cy = 6 + int(rng.uniform(0, h - 12));
    const int s = 2 + int(rng.uniform(0, 4));
    const float v = rng.uniform() < 0.5 ? 20.0f : 235.0f;
    for (int r = std::max(0, cy - s); r < std::min(h, cy + s); ++r)
      for (int c = std::max(0, cx - s); c < std::min(w, cx + s); ++c) b.set(c, r, v);
  }
  return b;
}

fs::path temp_file(const char* name) {
  fs::path dir = fs::temp_directory_path() / "mura_tiepoints";
  fs::create_directories(dir);
  return dir / name;
}

TiePointSet sample_set(int n, uint64_t seed) {
  TiePointSet s;
  s.base_width = 500;
  s.base_height = 400;
  s.warp_width = 480;
  s.warp_height = 420;
  s.working_gsd_m = 15.0;
  oracle::Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    TiePoint t;
    t.base = {rng.uniform(0.0, 500.0), rng.uniform(0.0, 400.0)};
    t.warp = {rng.uniform(0.0, 480.0), rng.uniform(0.0, 420.0)};
    t.score = rng.uniform();
    s.points.push_back(t);
  }
  std::sort(s.points.begin(), s.points.end(), [](const TiePoint& a, const TiePoint& b) {
    return a.base.x != b.base.x ? a.base.x < b.base.x : a.base.y < b.base.y;
  });
  return s;
}

}  // namespace

TEST_SUITE("tiepoints") {
  TEST_CASE("a constant image has no corners") {
    const Band b = flat_band(64, 64, 128.0f);
    CHECK(detect_corners(b, 2000, 20).empty());
  }

  TEST_CASE("an isolated bright dot is found at its pixel center") {
    Band b = flat_band(32, 32, 50.0f);
    b.set(10, 7, 250.0f);
    const auto pts = detect_corners(b, 2000, 20);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].x == 10.5);
    CHECK(pts[0].y == 7.5);
  }

  TEST_CASE("detector agrees with the brute-force segment test") {
    for (uint64_t seed : {101u, 202u, 303u}) {
      const Band b = textured_band(96, 80, seed);
      const auto got = detect_corners(b, 100000, 20);
      const auto want = oracle::naive_fast(b, 20);
      std::set<std::pair<int, int>> got_set;
      for (const PixelPoint& p : got)
        got_set.insert({int(std::floor(p.x)), int(std::floor(p.y))});
      std::set<std::pair<int, int>> want_set(want.begin(), want.end());
      CHECK(got_set == want_set);
    }
  }

  TEST_CASE("matching a band against itself gives zero displacement") {
    const Band b = textured_band(96, 96, 1234);
    const auto pts = detect_corners(b, 500, 20);
    REQUIRE(pts.size() >= 10);
    const TiePointSet m = describe_and_match(b, b, pts, pts);
    REQUIRE(m.size() >= 10);
    for (const TiePoint& t : m.points) {
      CHECK(t.warp.x == t.base.x);
      CHECK(t.warp.y == t.base.y);
      CHECK(t.score == doctest::Approx(1.0));
    }
  }

  TEST_CASE("an integer translation is recovered exactly") {
    const int dx = 5, dy = 3;
    const Band base = textured_band(120, 100, 555);
    Band warp = flat_band(120, 100, 0.0f);
    // warp(c,r) = base(c+dx, r+dy): content slides left/up, so a base corner
    // at x appears in the warp image at x - dx.
    for (int r = 0; r < 100; ++r)
      for (int c = 0; c < 120; ++c) {
        const int sc = std::min(119, c + dx);
        const int sr = std::min(99, r + dy);
        warp.set(c, r, base.at(sc, sr));
      }
    const auto bp = detect_corners(base, 500, 20);
    const auto wp = detect_corners(warp, 500, 20);
    const TiePointSet m = describe_and_match(base, warp, bp, wp);
    REQUIRE(m.size() >= 8);
    int exact = 0;
    for (const TiePoint& t : m.points) {
      if (t.base.x - t.warp.x == double(dx) && t.base.y - t.warp.y == double(dy)) ++exact;
    }
    // Correlation is perfect at the true offset, so the subpixel stage stays
    // out of the way and nearly every pair lands on the integer answer.
    CHECK(exact >= int(m.size()) - 2);
  }

  TEST_CASE("uncorrelated images produce almost no matches") {
    const Band a = textured_band(96, 96, 10);
    const Band b = textured_band(96, 96, 20);
    const auto pa = detect_corners(a, 500, 20);
    const auto pb = detect_corners(b, 500, 20);
    REQUIRE(pa.size() >= 20);
    const TiePointSet m = describe_and_match(a, b, pa, pb);
    CHECK(double(m.size()) < 0.05 * double(pa.size()) + 3.0);
  }

  TEST_CASE("detection and matching are deterministic") {
    const Band base = textured_band(96, 96, 808);
    const Band warp = textured_band(96, 96, 808);
    const auto p1 = detect_corners(base, 500, 20);
    const auto p2 = detect_corners(base, 500, 20);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
      CHECK(p1[i].x == p2[i].x);
      CHECK(p1[i].y == p2[i].y);
    }
    const TiePointSet m1 = describe_and_match(base, warp, p1, p1);
    const TiePointSet m2 = describe_and_match(base, warp, p2, p2);
    REQUIRE(m1.size() == m2.size());
    for (std::size_t i = 0; i < m1.size(); ++i) {
      CHECK(m1.points[i].base.x == m2.points[i].base.x);
      CHECK(m1.points[i].warp.x == m2.points[i].warp.x);
      CHECK(m1.points[i].score == m2.points[i].score);
    }
  }

  TEST_CASE("interchange round trip preserves full precision") {
    const TiePointSet s = sample_set(100, 31337);
    const fs::path p = temp_file("roundtrip.txt");
    export_tiepoints(s, p.string());
    const TiePointSet back = import_tiepoints(p.string());
    CHECK(back.provenance == "imported:roundtrip.txt");
    CHECK(back.base_width == s.base_width);
    CHECK(back.base_height == s.base_height);
    CHECK(back.warp_width == s.warp_width);
    CHECK(back.warp_height == s.warp_height);
    CHECK(back.working_gsd_m == s.working_gsd_m);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(back.points[i].base.x == s.points[i].base.x);
      CHECK(back.points[i].base.y == s.points[i].base.y);
      CHECK(back.points[i].warp.x == s.points[i].warp.x);
      CHECK(back.points[i].warp.y == s.points[i].warp.y);
      CHECK(back.points[i].score == s.points[i].score);
    }
  }

  TEST_CASE("an empty set still writes a parsable header") {
    TiePointSet s;
    s.base_width = 10;
    s.base_height = 20;
    s.warp_width = 30;
    s.warp_height = 40;
    s.working_gsd_m = 15.0;
    const fs::path p = temp_file("empty.txt");
    export_tiepoints(s, p.string());
    const TiePointSet back = import_tiepoints(p.string());
    CHECK(back.empty());
    CHECK(back.base_width == 10);
    CHECK(back.warp_height == 40);
  }

  TEST_CASE("coordinates outside the stated grids are rejected") {
    const fs::path p = temp_file("oob.txt");
    std::ofstream(p) << "murat-tiepoints v1 100 100 100 100 10\n"
                     << "-1.0 5.0 5.0 5.0 0.9\n";
    CHECK_THROWS_AS(import_tiepoints(p.string()), OutOfGrid);
    std::ofstream(p) << "murat-tiepoints v1 100 100 100 100 10\n"
                     << "5.0 5.0 100.5 5.0 0.9\n";
    CHECK_THROWS_AS(import_tiepoints(p.string()), OutOfGrid);
  }

  TEST_CASE("malformed rows report their line number") {
    const fs::path p = temp_file("badrow.txt");
    std::ofstream(p) << "murat-tiepoints v1 100 100 100 100 10\n"
                     << "1.0 2.0 3.0 4.0 0.5\n"
                     << "5.0 six 7.0 8.0 0.5\n";
    try {
      import_tiepoints(p.string());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.where() == 3);
    }
  }

  TEST_CASE("scores outside [0,1] are rejected") {
    const fs::path p = temp_file("badscore.txt");
    std::ofstream(p) << "murat-tiepoints v1 100 100 100 100 10\n"
                     << "1.0 2.0 3.0 4.0 1.5\n";
    CHECK_THROWS_AS(import_tiepoints(p.string()), ParseError);
  }

  TEST_CASE("duplicate base locations are rejected") {
    const fs::path p = temp_file("dup.txt");
    std::ofstream(p) << "murat-tiepoints v1 100 100 100 100 10\n"
                     << "1.0 2.0 3.0 4.0 0.5\n"
                     << "1.0 2.0 9.0 9.0 0.5\n";
    CHECK_THROWS_AS(import_tiepoints(p.string()), ParseError);
  }

  TEST_CASE("a file without the header line is rejected") {
    const fs::path p = temp_file("nohdr.txt");
    std::ofstream(p) << "1.0 2.0 3.0 4.0 0.5\n";
    CHECK_THROWS_AS(import_tiepoints(p.string()), ParseError);
    const fs::path q = temp_file("badver.txt");
    std::ofstream(q) << "murat-tiepoints v2 100 100 100 100 10\n";
    CHECK_THROWS_AS(import_tiepoints(q.string()), ParseError);
  }

  TEST_CASE("comments and blank lines are ignored") {
    const fs::path p = temp_file("comments.txt");
    std::ofstream(p) << "# produced by hand\n"
                     << "murat-tiepoints v1 100 100 100 100 10\n"
                     << "\n"
                     << "# a pair\n"
                     << "1.5 2.5 3.5 4.5 0.25\n";
    const TiePointSet s = import_tiepoints(p.string());
    REQUIRE(s.size() == 1);
    CHECK(s.points[0].warp.y == 4.5);
    CHECK(s.points[0].score == 0.25);
  }

  TEST_CASE("export preserves row order") {
    TiePointSet s = sample_set(20, 9);
    std::reverse(s.points.begin(), s.points.end());
    const fs::path p = temp_file("order.txt");
    export_tiepoints(s, p.string());
    const TiePointSet back = import_tiepoints(p.string());
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(back.points[i].base.x == s.points[i].base.x);
      CHECK(back.points[i].base.y == s.points[i].base.y);
    }
  }
}
