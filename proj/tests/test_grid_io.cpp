#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "rset/error.hpp"
#include "rset/grid.hpp"
#include "rset/io.hpp"
#include "rset/meanset.hpp"
#include "rset/rng.hpp"

using namespace rset;

namespace {

std::string temp_dir(const char* tag) {
  std::filesystem::path p =
      std::filesystem::temp_directory_path() / (std::string("rset-test-") + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("grid validation and indexing") {
  GridDomain d{-1.0, 2.0, 0.5, 4, 3};
  d.validate();
  CHECK(d.cell_count() == 12);
  CHECK(d.index(0, 0) == 0);
  CHECK(d.index(3, 0) == 3);
  CHECK(d.index(0, 1) == 4);
  CHECK(d.index(3, 2) == 11);

  Point p = coord_of(d, 2, 1);
  CHECK(p.x == 0.0);
  CHECK(p.y == 2.5);

  GridDomain bad = d;
  bad.h = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = d;
  bad.nx = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = d;
  bad.x0 = std::nan("");
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("mask fill, counting and complement") {
  GridDomain d{0.0, 0.0, 1.0, 5, 4};
  BinaryMask m(d);
  CHECK_FALSE(m.any());
  CHECK(m.count_true() == 0);
  m.set(1, 2, true);
  m.set(4, 3, true);
  CHECK(m.count_true() == 2);
  CHECK(m.any());
  CHECK_FALSE(m.all());

  BinaryMask c = complement(m);
  CHECK(c.count_true() == d.cell_count() - 2);
  CHECK_FALSE(c.at(1, 2));
  CHECK(c.at(0, 0));
  CHECK(complement(c) == m);

  BinaryMask full(d, true);
  CHECK(full.all());
  CHECK_FALSE(complement(full).any());
}

TEST_CASE("scalar field storage and finiteness check") {
  GridDomain d{0.0, 0.0, 0.5, 3, 3};
  ScalarField f(d, 1.5);
  CHECK(f.at(2, 2) == 1.5);
  f.set(1, 1, -2.0);
  CHECK(f[d.index(1, 1)] == -2.0);
  f.validate_finite();
  f.set(0, 2, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(f.validate_finite(), Error);
}

TEST_CASE("domain mismatch is reported") {
  GridDomain a{0.0, 0.0, 1.0, 4, 4};
  GridDomain b{0.0, 0.0, 0.5, 4, 4};
  CHECK_THROWS_WITH_AS(require_same_domain(a, b, "test"),
                       doctest::Contains("test"), Error);
}

TEST_CASE("mask PGM round trip") {
  std::string dir = temp_dir("pgm");
  GridDomain d{-1.0, -1.0, 0.25, 9, 7};
  Rng rng(31, 0);
  BinaryMask m(d);
  for (std::size_t k = 0; k < d.cell_count(); ++k)
    m.set_index(k, rng.uniform01() < 0.4);

  std::string path = dir + "/mask.pgm";
  write_mask_pgm(m, path);
  CHECK(read_pgm_dims(path) == std::pair<int, int>(9, 7));
  CHECK(read_mask_pgm(path, d) == m);

  GridDomain wrong = d;
  wrong.nx = 8;
  CHECK_THROWS_AS(read_mask_pgm(path, wrong), Error);
  CHECK_THROWS_AS(read_mask_pgm(dir + "/missing.pgm", d), Error);

  std::ofstream bad(dir + "/bad.pgm", std::ios::binary);
  bad << "P2\n2 2\n255\n0 0 0 0\n";
  bad.close();
  CHECK_THROWS_AS(read_pgm_dims(dir + "/bad.pgm"), Error);
}

TEST_CASE("field CSV round trip is exact") {
  std::string dir = temp_dir("csv");
  GridDomain d{0.125, -2.75, 0.0625, 6, 5};
  Rng rng(77, 0);
  ScalarField f(d);
  for (std::size_t k = 0; k < d.cell_count(); ++k)
    f[k] = rng.uniform(-3.0, 3.0);
  f[3] = 1.0 / 3.0;
  f[4] = -0.1;

  std::string path = dir + "/field.csv";
  write_field_csv(f, path);
  ScalarField g = read_field_csv(path);
  CHECK(g.domain().same_as(d));
  CHECK(g.values() == f.values());

  std::ofstream bad(dir + "/bad.csv");
  bad << "# 2 2 0 0 not-a-number\n0,0\n0,0\n";
  bad.close();
  CHECK_THROWS_AS(read_field_csv(dir + "/bad.csv"), Error);
  CHECK_THROWS_AS(read_field_csv(dir + "/missing.csv"), Error);
}

TEST_CASE("stack round trip preserves order and values") {
  std::string dir = temp_dir("stack");
  GridDomain d{0.0, 0.0, 0.5, 4, 4};
  SampleStack stack;
  Rng rng(13, 0);
  for (int s = 0; s < 3; ++s) {
    ScalarField f(d);
    for (std::size_t k = 0; k < d.cell_count(); ++k)
      f[k] = rng.uniform(-1.0, 1.0);
    stack.fields.push_back(f);
  }
  write_stack(stack, dir + "/stack");
  SampleStack back = read_stack(dir + "/stack");
  REQUIRE(back.size() == 3);
  for (int s = 0; s < 3; ++s)
    CHECK(back.fields[s].values() == stack.fields[s].values());
  CHECK_THROWS_AS(read_stack(dir + "/nowhere"), Error);
}
