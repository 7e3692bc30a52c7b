#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "vwlab.h"

TEST_CASE("configuration handles") {
  vwlab_config* cfg = nullptr;
  REQUIRE(vwlab_config_from_text("run.mode = kernels\n", "kernels.t_max = 10", &cfg) == VWLAB_OK);
  CHECK(std::string(vwlab_config_mode(cfg)) == "kernels");
  char hash[17];
  CHECK(vwlab_config_hash(cfg, hash) == VWLAB_OK);
  CHECK(std::string(hash).size() == 16);
  size_t needed = 0;
  CHECK(vwlab_config_text(cfg, nullptr, 0, &needed) == VWLAB_OK);
  std::vector<char> buf(needed);
  CHECK(vwlab_config_text(cfg, buf.data(), buf.size(), nullptr) == VWLAB_OK);
  CHECK(std::string(buf.data()).find("kernels.t_max = 10\n") != std::string::npos);
  vwlab_config_free(cfg);
}

TEST_CASE("configuration errors carry status and message") {
  vwlab_config* cfg = reinterpret_cast<vwlab_config*>(1);
  CHECK(vwlab_config_from_text("nonsense.key = 1", nullptr, &cfg) == VWLAB_E_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(vwlab_last_error()).find("nonsense.key") != std::string::npos);
  CHECK(vwlab_config_from_text("run.mode = sweep\nexternal.V = harmonic -1", nullptr, &cfg) == VWLAB_E_HYPOTHESIS);
  CHECK(vwlab_config_from_file("/nonexistent/vwlab.cfg", nullptr, &cfg) == VWLAB_E_CONFIG);
  CHECK(vwlab_config_from_text("", nullptr, nullptr) == VWLAB_E_NULL);
  CHECK(vwlab_config_hash(nullptr, nullptr) == VWLAB_E_NULL);
}

TEST_CASE("run through the C API") {
  vwlab_config* cfg = nullptr;
  REQUIRE(vwlab_config_from_text("run.mode = kernels\nkernels.t_max = 10\nkernels.T_list = 5", nullptr, &cfg) == VWLAB_OK);
  const auto dir = std::filesystem::temp_directory_path() / "vwlab_test_capi";
  std::filesystem::remove_all(dir);
  CHECK(vwlab_run(cfg, dir.string().c_str()) == 0);
  CHECK(std::filesystem::exists(dir / "kernel.csv"));
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  std::filesystem::remove_all(dir);
  vwlab_config_free(cfg);
  CHECK(vwlab_run(nullptr, "x") == VWLAB_E_NULL);
}

TEST_CASE("kernel handle") {
  vwlab_kernel* k = nullptr;
  REQUIRE(vwlab_kernel_create(3, 1.0, 1.0, &k) == VWLAB_OK);
  double kap = 0.0, q = 0.0, p = 0.0, K = 0.0;
  CHECK(vwlab_kernel_kappa(k, &kap) == VWLAB_OK);
  CHECK(kap == doctest::Approx(0.1286017803762574).epsilon(1e-10));
  CHECK(vwlab_kernel_q(k, 1.0, &q) == VWLAB_OK);
  CHECK(vwlab_kernel_p(k, 0.5, 2.0, &p) == VWLAB_OK);
  CHECK(p == doctest::Approx(q / 2.0).epsilon(1e-14));
  CHECK(vwlab_kernel_tail_constant(k, &K) == VWLAB_OK);
  CHECK(K > 0.0);
  CHECK(vwlab_kernel_q(k, -1.0, &q) != VWLAB_OK);
  vwlab_kernel_free(k);

  REQUIRE(vwlab_kernel_create(2, 1.0, 1.0, &k) == VWLAB_OK);
  CHECK(vwlab_kernel_kappa(k, &kap) == VWLAB_E_HYPOTHESIS);
  vwlab_kernel_free(k);
  CHECK(vwlab_kernel_create(3, -1.0, 1.0, &k) == VWLAB_E_CONFIG);
}

TEST_CASE("W1 and version") {
  const double x[] = {-1.0, 0.2, 0.5, 2.0}, wx[] = {0.1, 0.4, 0.3, 0.2};
  const double y[] = {-0.5, 0.0, 1.5}, wy[] = {0.5, 0.25, 0.25};
  double w = 0.0;
  CHECK(vwlab_wasserstein1(x, wx, 4, y, wy, 3, &w) == VWLAB_OK);
  CHECK(w == doctest::Approx(0.605).epsilon(1e-12));
  CHECK(std::string(vwlab_version()).size() > 0);
  int passed = 0;
  char detail[256];
  CHECK(vwlab_run_criterion(11, &passed, nullptr, detail, sizeof detail) == VWLAB_OK);
  CHECK(passed == 1);
  CHECK(vwlab_run_criterion(99, &passed, nullptr, nullptr, 0) == VWLAB_E_CONFIG);
}

TEST_CASE("shipped presets parse") {
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(VWLAB_CONFIG_DIR)) {
    if (e.path().extension() != ".cfg") continue;
    vwlab_config* cfg = nullptr;
    CHECK_MESSAGE(vwlab_config_from_file(e.path().string().c_str(), nullptr, &cfg) == VWLAB_OK, e.path().string());
    vwlab_config_free(cfg);
    ++files;
  }
  CHECK(files > 0);
}
