#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"

#include "chemolab/chemolab.h"

using doctest::Approx;

TEST_CASE("model handles evaluate curves") {
  chemolab_model* m = nullptr;
  REQUIRE(chemolab_model_volume_filling(1.0, 1.0, &m) == CHEMOLAB_OK);
  double x = 0.0;
  CHECK(chemolab_model_eval(m, CHEMOLAB_CURVE_PHI, 1.0, &x) == CHEMOLAB_OK);
  CHECK(x == Approx(0.75));
  CHECK(chemolab_model_eval(m, CHEMOLAB_CURVE_XI, 1.0, &x) == CHEMOLAB_OK);
  CHECK(x == Approx(std::log(2.0)));
  CHECK(chemolab_model_eval(m, CHEMOLAB_CURVE_XI_INVERSE, std::log(6.0), &x) == CHEMOLAB_OK);
  CHECK(x == Approx(2.0));
  CHECK(chemolab_model_eval(m, CHEMOLAB_CURVE_PHI, 1.0, nullptr) == CHEMOLAB_INVALID_ARGUMENT);
  CHECK(std::strlen(chemolab_last_error()) > 0);
  chemolab_model_free(m);
  chemolab_model_free(nullptr);
}

TEST_CASE("classification through the C interface") {
  char* json = nullptr;
  REQUIRE(chemolab_classify_power(0.0, 1.0, 3, &json) == CHEMOLAB_OK);
  CHECK(std::string(json).find("FiniteTimeBlowup") != std::string::npos);
  chemolab_string_free(json);
  CHECK(chemolab_classify_power(0.0, 1.0, 1, &json) == CHEMOLAB_CONFIG_ERROR);
  REQUIRE(chemolab_classify_volume_filling(1.0, 2, -1.0, &json) == CHEMOLAB_OK);
  CHECK(std::string(json).find("mass_threshold_radial") != std::string::npos);
  chemolab_string_free(json);
}

TEST_CASE("configuration errors map to status codes") {
  chemolab_config* c = nullptr;
  CHECK(chemolab_config_load("/nonexistent/x.cfg", &c) == CHEMOLAB_CONFIG_ERROR);
  CHECK(c == nullptr);
  CHECK(chemolab_config_parse("[grid]\nM = x\n", &c) == CHEMOLAB_CONFIG_ERROR);
  CHECK(chemolab_config_parse(nullptr, &c) == CHEMOLAB_INVALID_ARGUMENT);
  REQUIRE(chemolab_config_parse("[experiment]\ntype = struwe_sweep\n[sweep]\ngammas = 1\nm_over = 2\nk_values = 16, 32\n", &c) == CHEMOLAB_OK);
  char* s = nullptr;
  REQUIRE(chemolab_config_experiment(c, &s) == CHEMOLAB_OK);
  CHECK(std::string(s) == "struwe_sweep");
  chemolab_string_free(s);
  REQUIRE(chemolab_config_hash(c, &s) == CHEMOLAB_OK);
  CHECK(std::strlen(s) == 16);
  chemolab_string_free(s);

  const auto dir = std::filesystem::temp_directory_path() / "chemolab_capi_run";
  chemolab_report* r = nullptr;
  REQUIRE(chemolab_experiment_run(c, dir.string().c_str(), &r) == CHEMOLAB_OK);
  REQUIRE(chemolab_report_text(r, &s) == CHEMOLAB_OK);
  CHECK(std::string(s).find("fitted_slope") != std::string::npos);
  chemolab_string_free(s);
  chemolab_report_free(r);
  REQUIRE(chemolab_report_load((dir / "report.json").string().c_str(), &r) == CHEMOLAB_OK);
  chemolab_report_free(r);
  chemolab_config_free(c);
  std::filesystem::remove_all(dir);
}

TEST_CASE("struwe and stationary entry points") {
  const int ks[] = {16, 32, 64, 128};
  chemolab_struwe_summary sum{};
  char* csv = nullptr;
  REQUIRE(chemolab_struwe_sweep(1.0, 32.0 * M_PI, 1.0, ks, 4, 64, &sum, &csv) == CHEMOLAB_OK);
  CHECK(sum.predicted_slope == Approx(-16.0 * M_PI));
  CHECK(std::string(csv).rfind("k,", 0) == 0);
  chemolab_string_free(csv);
  CHECK(chemolab_struwe_sweep(1.0, 1.0, 1.0, ks, 1, 64, &sum, nullptr) != CHEMOLAB_OK);

  chemolab_model* m = nullptr;
  REQUIRE(chemolab_model_volume_filling(1.0, 1.0, &m) == CHEMOLAB_OK);
  chemolab_stationary_summary st{};
  REQUIRE(chemolab_stationary_solve(m, 1.0, 1, M_PI, 64, 0.0, &st, nullptr, nullptr) == CHEMOLAB_OK);
  CHECK(st.v0 == Approx(1.0).epsilon(1e-7));
  CHECK(st.constant == 1);
  chemolab_model_free(m);
}

TEST_CASE("status names are stable") {
  CHECK(std::string(chemolab_status_name(CHEMOLAB_OK)) == "ok");
  CHECK(std::string(chemolab_status_name(CHEMOLAB_INCONCLUSIVE)) == "inconclusive");
  CHECK(std::strlen(chemolab_version()) > 0);
}
