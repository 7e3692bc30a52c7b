#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "vwlab/error.hpp"
#include "vwlab/io.hpp"

using namespace vwlab;
namespace fs = std::filesystem;

TEST_CASE("phase-state snapshot round trip") {
  const Grid1D x{-1.0, 2.0, 5}, v{-3.0, 3.0, 7};
  PhaseSpaceState f(x, v);
  for (std::size_t i = 0; i < f.f.size(); ++i) f.f[i] = std::sin(1.0 + i) / 3.0;
  f.t = 0.125;
  const fs::path p = fs::temp_directory_path() / "vwlab_test_state.bin";
  write_snapshot(p.string(), to_snapshot(f, 0xabcdef0123456789ull, 1, 3));
  CHECK(fs::file_size(p) == 6 + 2 + 8 + 4 * 4 + 5 * 8 + 5 * 7 * 8);
  const Snapshot s = read_snapshot(p.string());
  CHECK(s.kind == SnapshotKind::PhaseState);
  CHECK(s.hash == 0xabcdef0123456789ull);
  CHECK(s.n == 3);
  const PhaseSpaceState g = to_state(s);
  CHECK(g.x == x);
  CHECK(g.v == v);
  CHECK(g.t == 0.125);
  CHECK(g.f == f.f);
  {
    std::ifstream in(p, std::ios::binary);
    char magic[6];
    in.read(magic, 6);
    CHECK(std::string(magic, 6) == "VWLAB1");
  }
  fs::remove(p);
}

TEST_CASE("potential snapshot stores value and gradient") {
  PotentialField phi = PotentialField::zeros(Grid1D{0.0, 1.0, 4}, SourceTag::Memory);
  phi.values = {1, 2, 3, 4};
  phi.gradient = {-1, -2, -3, -4};
  const Snapshot s = to_snapshot(phi, 0.5, 7, 1, 3);
  CHECK(s.kind == SnapshotKind::Potential);
  CHECK(s.v.n == 2);
  CHECK(s.data == std::vector<double>{1, -1, 2, -2, 3, -3, 4, -4});
  CHECK_THROWS_AS(to_state(s), Error);
}

TEST_CASE("corrupt snapshot is rejected") {
  const fs::path p = fs::temp_directory_path() / "vwlab_test_bad.bin";
  {
    std::ofstream out(p, std::ios::binary);
    out << "NOTVW1 and some bytes";
  }
  CHECK_THROWS_AS(read_snapshot(p.string()), Error);
  CHECK_THROWS_AS(read_snapshot((p.string() + ".missing")), Error);
  fs::remove(p);
}

TEST_CASE("CSV header, quoting and number formatting") {
  const fs::path p = fs::temp_directory_path() / "vwlab_test.csv";
  {
    CsvWriter w(p.string(), "00ff", {"a", "b", "c"});
    w << 0.1 << std::string("x,y") << std::numeric_limits<double>::quiet_NaN();
    w.end_row();
    w << 1.0;
    CHECK_THROWS_AS(w.end_row(), Error);
  }
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().rfind("# config_hash=00ff\na,b,c\n0.10000000000000001,\"x,y\",nan\n", 0) == 0);
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  fs::remove(p);
}
