#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vwlab/config.hpp"
#include "vwlab/error.hpp"
#include "vwlab/runner.hpp"

using namespace vwlab;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("configuration was accepted");
  return ErrorKind::Io;
}

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vwlab_test_" + name);
  fs::remove_all(p);
  return p;
}

// Small, fast transport configuration on a +-4 box.
const char* kTiny =
    "grid.x_min = -4\ngrid.x_max = 4\ngrid.v_min = -4\ngrid.v_max = 4\n"
    "grid.nx = 48\ngrid.nv = 48\ngrid.override = true\n"
    "transport.T = 0.1\ntransport.dt = 0.02\n";

}  // namespace

TEST_CASE("an empty file resolves every default") {
  const SimulationConfig c = parse_config_text("");
  CHECK(c.mode == RunMode::Memory);
  CHECK(c.transport.dt == 0.02);
  CHECK(c.resolved.size() == config_defaults().size());
  CHECK(c.hypotheses.size() >= 3);
  // Auto-sized box covers the a-priori radius.
  CHECK(c.transport.x.hi >= c.apriori_radius);
  CHECK(c.transport.v.lo <= -c.apriori_radius);
}

TEST_CASE("unknown keys are listed") {
  const std::string msg = message_of("transport.dtt = 0.1\nfoo.bar = 1\n");
  CHECK(msg.find("transport.dtt") != std::string::npos);
  CHECK(msg.find("foo.bar") != std::string::npos);
  CHECK(kind_of("foo.bar = 1") == ErrorKind::Config);
}

TEST_CASE("malformed values") {
  CHECK(kind_of("transport.dt = fast") == ErrorKind::Config);
  CHECK(kind_of("transport.dt = -1") == ErrorKind::Config);
  CHECK(kind_of("run.mode = quantum") == ErrorKind::Config);
  CHECK(kind_of("sigma1 = bump 0.5 -1") == ErrorKind::Hypothesis);
  CHECK(kind_of("dims.d = 2") == ErrorKind::UnsupportedDimension);
  CHECK(kind_of("no equals sign") == ErrorKind::Config);
}

TEST_CASE("sweep rejects a negative external potential citing H7") {
  const std::string text = "run.mode = sweep\nexternal.V = harmonic -2\n";
  CHECK(kind_of(text) == ErrorKind::Hypothesis);
  const std::string msg = message_of(text);
  CHECK(msg.find("(H7)") != std::string::npos);
  CHECK(msg.find("non negative") != std::string::npos);
  // Memory mode accepts the same potential (H2 holds with C = 1).
  CHECK_NOTHROW(parse_config_text("external.V = harmonic -2\ngrid.override = true\n"));
}

TEST_CASE("box smaller than the a-priori radius needs the override") {
  const std::string box = "grid.x_min = -4\ngrid.x_max = 4\ngrid.v_min = -4\ngrid.v_max = 4\n";
  const std::string msg = message_of(box);
  CHECK(msg.find("a-priori radius R = ") != std::string::npos);
  const double R = parse_config_text("").apriori_radius;
  std::ostringstream r;
  r.precision(17);
  r << R;
  CHECK(msg.find(r.str()) != std::string::npos);
  CHECK_NOTHROW(parse_config_text(box + "grid.override = true\n"));
}

TEST_CASE("hash follows the resolved values") {
  const auto a = parse_config_text("transport.dt = 0.02");
  const auto b = parse_config_text("# comment\n  transport.dt=0.02  \n");
  const auto c = parse_config_text("transport.dt = 0.01");
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
  CHECK(a.hash_hex().size() == 16);
  const auto o = parse_config_text("transport.dt = 0.02", "transport.dt = 0.01");
  CHECK(o.hash == c.hash);
}

TEST_CASE("kernels mode writes the table and summary") {
  const fs::path dir = scratch("kernels");
  const auto cfg = parse_config_text("run.mode = kernels\nkernels.t_max = 20\nkernels.T_list = 5 10 50\n");
  REQUIRE(run_config(cfg, dir.string()) == ExitOk);
  const std::string sum = slurp(dir / "summary.txt");
  CHECK(sum.find("kappa = 0.1286") != std::string::npos);
  CHECK(sum.find("K = ") != std::string::npos);
  CHECK(sum.find("partial_integral[10]") != std::string::npos);
  CHECK(sum.find("partial_integral[50]") == std::string::npos);  // past t_max
  const std::string csv = slurp(dir / "kernel.csv");
  CHECK(csv.rfind("# config_hash=" + cfg.hash_hex(), 0) == 0);
  CHECK(csv.find("t,q,cumulative") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("memory run: snapshot count and byte-identical outputs") {
  const auto cfg = parse_config_text(std::string(kTiny) + "run.snapshot_stride = 2\ndiagnostics.w1_reference = initial\n");
  const fs::path a = scratch("mem_a"), b = scratch("mem_b");
  REQUIRE(run_config(cfg, a.string()) == ExitOk);
  REQUIRE(run_config(cfg, b.string()) == ExitOk);
  int states = 0;
  for (const auto& e : fs::directory_iterator(a / "snapshots"))
    states += e.path().filename().string().rfind("state_", 0) == 0 ? 1 : 0;
  CHECK(states == 5 / 2 + 1);  // floor(T / (stride dt)) + 1
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "timing.txt") continue;
    const fs::path other = b / fs::relative(e.path(), a);
    CHECK_MESSAGE(slurp(e.path()) == slurp(other), e.path().string());
    const std::string head = slurp(e.path()).substr(0, 64);
    if (e.path().extension() != ".bin") CHECK(head.find(cfg.hash_hex()) != std::string::npos);
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("solver abort is recorded with exit code 4") {
  // A mass budget below the interpolation error forces the abort.
  const auto cfg = parse_config_text(std::string(kTiny) + "transport.mass_abort = 1e-300\n");
  const fs::path dir = scratch("abort");
  CHECK(run_config(cfg, dir.string()) == ExitSolver);
  const std::string f = slurp(dir / "failure.txt");
  CHECK(f.find("status = 4") != std::string::npos);
  CHECK(f.find("kind = solver-abort") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("exit codes by error kind") {
  CHECK(exit_code_for(ErrorKind::Config) == 2);
  CHECK(exit_code_for(ErrorKind::Hypothesis) == 3);
  CHECK(exit_code_for(ErrorKind::SolverAbort) == 4);
  CHECK(exit_code_for(ErrorKind::OutOfDomain) == 4);
}
