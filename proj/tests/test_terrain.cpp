#include <doctest.h>

#include <sstream>

#include "agplan/kernels.hpp"
#include "agplan/terrain.hpp"

using namespace agplan;

namespace {

TerrainGrid dem(const std::string& text) {
  std::istringstream in(text);
  return load_dem(in);
}

const char* kSmall =
    "ncols 3\nnrows 2\nxllcorner 100\nyllcorner 200\ncellsize 12\nNODATA_value -9999\n"
    "1 2 3\n4 -9999 6\n";

}  // namespace

TEST_CASE("ascii grid header and values load exactly") {
  const TerrainGrid g = dem(kSmall);
  CHECK(g.ncols() == 3);
  CHECK(g.nrows() == 2);
  CHECK(g.cell_size() == 12.0);
  CHECK(g.nodata_value() == -9999.0);
  CHECK(g.elevation_at({2, 0}) == 3.0);
  CHECK(g.elevation_at({0, 1}) == 4.0);
  CHECK(g.is_nodata({1, 1}));
  CHECK_THROWS_AS(g.elevation_at({1, 1}), NodataError);
  CHECK_THROWS_AS(g.elevation_at({3, 0}), BoundsError);
}

TEST_CASE("ascii grid errors name the problem") {
  CHECK_THROWS_WITH_AS(dem("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\n1 2\n3 4\n"),
                       doctest::Contains("cellsize"), DemParseError);
  CHECK_THROWS_WITH_AS(dem("ncols 2\nnrows x\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n"),
                       doctest::Contains("nrows"), DemParseError);
  CHECK_THROWS_AS(dem("ncols 2\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n"),
                  DemDimensionError);
  CHECK_THROWS_AS(dem("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n3 4\n"),
                  DemDimensionError);
  CHECK_THROWS_WITH_AS(dem("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 abc\n"),
                       doctest::Contains("row 1"), DemParseError);
}

TEST_CASE("write then load keeps every elevation bit for bit") {
  SynthSpec s;
  s.kind = SynthKind::random_smooth;
  s.ncols = 17;
  s.nrows = 9;
  s.amplitude = 123.456;
  s.base = -7.1;
  s.seed = 99;
  const TerrainGrid a = synthesize_terrain(s);
  const TerrainGrid b = dem(write_dem_string(a));
  REQUIRE(a.cell_count() == b.cell_count());
  for (std::size_t i = 0; i < a.cell_count(); ++i) CHECK(a.elevations()[i] == b.elevations()[i]);
  CHECK(b.origin_x() == a.origin_x());

  const TerrainGrid c = dem(kSmall);
  const TerrainGrid d = dem(write_dem_string(c));
  CHECK(d.is_nodata({1, 1}));
  CHECK(d.elevation_at({2, 1}) == 6.0);
}

TEST_CASE("gradient of a ramp") {
  SynthSpec s;
  s.kind = SynthKind::ramp;
  s.ncols = 11;
  s.nrows = 5;
  s.cell_size = 10.0;
  s.amplitude = 20.0;  // 2 m per cell over 10 m = 0.2
  const TerrainGrid g = synthesize_terrain(s);
  for (GridIndex c : {GridIndex{0, 0}, GridIndex{5, 2}, GridIndex{10, 4}}) {
    const TerrainGradient gr = g.gradient_at(c);
    CHECK(gr.gx == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(gr.gy == doctest::Approx(0.0));
    CHECK(gr.gz * gr.gz == doctest::Approx(gr.gx * gr.gx + gr.gy * gr.gy));
  }
}

TEST_CASE("flat terrain has zero gradient everywhere") {
  SynthSpec s;
  s.base = 42.0;
  const TerrainGrid g = synthesize_terrain(s);
  const GradientField f = gradient_field(g);
  for (const TerrainGradient& gr : f.values) CHECK(gr.gz == 0.0);
}

TEST_CASE("ridge profile: flank rises at the configured slope to a flat crest") {
  SynthSpec s;
  s.kind = SynthKind::ridge;
  s.ncols = 48;
  s.nrows = 16;
  s.amplitude = 50.0;
  s.center_col = 24;
  const TerrainGrid g = synthesize_terrain(s);
  CHECK(g.elevation_at({13, 8}) == 0.0);
  for (int c = 14; c <= 23; ++c) {
    CHECK(g.elevation_at({c, 8}) == doctest::Approx(3.6 * (c - 13)));
  }
  CHECK(g.elevation_at({24, 8}) == 50.0);
  CHECK(g.elevation_at({25, 8}) == 50.0);
  CHECK(g.elevation_at({26, 8}) == 0.0);
  CHECK(g.elevation_at({24, 0}) == g.elevation_at({24, 15}));
}

TEST_CASE("ring is symmetric about its centre") {
  SynthSpec s;
  s.kind = SynthKind::ring;
  s.ncols = 41;
  s.nrows = 41;
  s.amplitude = 50.0;
  s.center_col = 20;
  s.center_row = 20;
  const TerrainGrid g = synthesize_terrain(s);
  CHECK(g.elevation_at({20, 20}) == 0.0);
  CHECK(g.max_elevation() == 50.0);
  for (int k = 0; k < 20; ++k) {
    CHECK(g.elevation_at({20 + k, 20}) == g.elevation_at({20 - k, 20}));
    CHECK(g.elevation_at({20, 20 + k}) == g.elevation_at({20 + k, 20}));
  }
}

TEST_CASE("synthesis is deterministic per seed") {
  SynthSpec s;
  s.kind = SynthKind::random_smooth;
  s.amplitude = 30.0;
  s.seed = 5;
  const TerrainGrid a = synthesize_terrain(s);
  const TerrainGrid b = synthesize_terrain(s);
  s.seed = 6;
  const TerrainGrid c = synthesize_terrain(s);
  CHECK(std::equal(a.elevations().begin(), a.elevations().end(), b.elevations().begin()));
  CHECK_FALSE(std::equal(a.elevations().begin(), a.elevations().end(), c.elevations().begin()));
  CHECK(a.min_elevation() == doctest::Approx(0.0));
  CHECK(a.max_elevation() == doctest::Approx(30.0));
}

TEST_CASE("grid invariants are enforced") {
  CHECK_THROWS_AS(TerrainGrid(1, 5, 1.0, std::vector<double>(5, 0.0)), DemDimensionError);
  CHECK_THROWS_AS(TerrainGrid(2, 2, 0.0, std::vector<double>(4, 0.0)), TerrainError);
  CHECK_THROWS_AS(TerrainGrid(2, 2, 1.0, std::vector<double>(3, 0.0)), DemDimensionError);
  CHECK_THROWS_AS(parse_synth_kind("volcano"), ContractError);
  CHECK(parse_synth_kind("random-smooth") == SynthKind::random_smooth);
}

TEST_CASE("world and local coordinates round trip; nearest cell clamps") {
  const TerrainGrid g = dem(kSmall);
  CHECK(g.local_x(g.world_x(17.5)) == doctest::Approx(17.5));
  CHECK(g.local_y(g.world_y(3.25)) == doctest::Approx(3.25));
  CHECK(g.nearest_cell(-50.0, 5.0) == GridIndex{0, 0});
  CHECK(g.nearest_cell(13.0, 100.0) == GridIndex{1, 1});
}
