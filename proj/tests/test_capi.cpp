#include <cmath>
#include <string>

#include "doctest.h"
#include "lrare.h"

TEST_CASE("config lifecycle and echo") {
  lrare_config* c = nullptr;
  REQUIRE(lrare_config_create(&c) == LRARE_OK);
  CHECK(lrare_config_parse(c, "mode = plain\nN = 300\nh = 1e-2\n", "inline") == LRARE_OK);
  CHECK(lrare_config_set(c, "seed", "12") == LRARE_OK);
  lrare_report* r = nullptr;
  REQUIRE(lrare_config_echo(c, &r) == LRARE_OK);
  const std::string echo = lrare_report_text(r);
  CHECK(echo.find("seed=12\n") != std::string::npos);
  CHECK(echo.find("N=300\n") != std::string::npos);
  CHECK(lrare_report_size(r) == echo.size());
  lrare_report_destroy(r);
  CHECK(lrare_config_key_count() > 20);
  CHECK(std::string(lrare_config_key(0)) == "mode");
  CHECK(lrare_config_key(1000) == nullptr);
  lrare_config_destroy(c);
}

TEST_CASE("errors map to status codes") {
  lrare_config* c = nullptr;
  REQUIRE(lrare_config_create(&c) == LRARE_OK);
  CHECK(lrare_config_set(c, "colour", "red") == LRARE_CONFIG_ERROR);
  CHECK(std::string(lrare_last_error()).find("unknown key 'colour'") != std::string::npos);
  CHECK(lrare_config_parse(c, "N = 10\nbogus = 1\n", "f.cfg") == LRARE_CONFIG_ERROR);
  CHECK(std::string(lrare_last_error()).find("f.cfg:2") != std::string::npos);
  // A failed parse leaves the config untouched.
  lrare_report* r = nullptr;
  REQUIRE(lrare_config_echo(c, &r) == LRARE_OK);
  CHECK(std::string(lrare_report_text(r)).find("N=100000\n") != std::string::npos);
  lrare_report_destroy(r);
  CHECK(lrare_config_load_file(c, "/nonexistent/x.cfg") == LRARE_CONFIG_ERROR);
  CHECK(lrare_config_set(nullptr, "N", "1") == LRARE_INVALID_ARGUMENT);
  CHECK(lrare_run(c, 1, nullptr) == LRARE_INVALID_ARGUMENT);

  CHECK(lrare_config_parse(c, "potential = quadratic k=1e6\nx0 = 0.5\nN = 4\n"
                              "region = interval:-10,10\n", nullptr) == LRARE_OK);
  CHECK(lrare_run(c, 1, &r) == LRARE_RUNTIME_ERROR);
  CHECK(std::string(lrare_last_error()).find("non-finite") != std::string::npos);
  lrare_config_destroy(c);
}

TEST_CASE("run and validate through the C API") {
  lrare_config* c = nullptr;
  REQUIRE(lrare_config_create(&c) == LRARE_OK);
  REQUIRE(lrare_config_parse(c, "mode = plain\nN = 1000\nh = 1e-2\n"
                                "potential = zero\nregion = interval:-1,1\n",
                             nullptr) == LRARE_OK);
  lrare_report *a = nullptr, *b = nullptr;
  REQUIRE(lrare_run(c, 1, &a) == LRARE_OK);
  REQUIRE(lrare_run(c, 2, &b) == LRARE_OK);
  CHECK(std::string(lrare_report_text(a)) == lrare_report_text(b));
  lrare_report_destroy(a);
  lrare_report_destroy(b);
  REQUIRE(lrare_config_set(c, "potential", "cosine_well") == LRARE_OK);
  REQUIRE(lrare_config_set(c, "region", "interval:-pi,pi") == LRARE_OK);
  REQUIRE(lrare_validate(c, &a) == LRARE_OK);
  CHECK(std::string(lrare_report_text(a)).rfind("check,status,value,detail\n", 0) == 0);
  lrare_report_destroy(a);
  lrare_config_destroy(c);
}

TEST_CASE("potentials and module entry points") {
  lrare_potential *V = nullptr, *B = nullptr;
  REQUIRE(lrare_potential_create("cosine_well", 1, &V) == LRARE_OK);
  REQUIRE(lrare_potential_transform(V, "interval:-pi,pi", LRARE_INVERT, &B) == LRARE_OK);
  CHECK(lrare_potential_dimension(V) == 1);
  const double x = 0.0;
  double v = 0, g = 1, lap = 0, gen = 0;
  CHECK(lrare_potential_value(B, &x, &v) == LRARE_OK);
  CHECK(v == doctest::Approx(2.0));
  CHECK(lrare_potential_gradient(V, &x, &g) == LRARE_OK);
  CHECK(g == 0.0);
  CHECK(lrare_potential_laplacian(V, &x, &lap) == LRARE_OK);
  CHECK(lap == doctest::Approx(1.0));
  CHECK(lrare_generator_self(V, 1.0, &x, &gen) == LRARE_OK);
  CHECK(gen == doctest::Approx(1.0));

  lrare_potential* bad = nullptr;
  CHECK(lrare_potential_create("morse", 1, &bad) == LRARE_CONFIG_ERROR);
  CHECK(lrare_potential_transform(V, "interval:-1,1", LRARE_FLATTEN, &bad) ==
        LRARE_RUNTIME_ERROR);

  lrare_potential* Z = nullptr;
  REQUIRE(lrare_potential_create("zero", 1, &Z) == LRARE_OK);
  double p = 0.0;
  CHECK(lrare_fp_escape(Z, 1.0, 0.0, -1.0, 1.0, 1.0, 0.0, 0.0, &p) == LRARE_OK);
  CHECK(p == doctest::Approx(0.31731).epsilon(3e-3));

  lrare_density_result d{};
  const double y = 0.0;
  CHECK(lrare_density_estimate(Z, 1.0, &x, &y, 1.0, &d) == LRARE_OK);
  CHECK(d.approx == doctest::Approx(0.3989422804014327));
  CHECK(d.lower <= d.approx);
  CHECK(d.approx <= d.upper);

  double action = 0;
  int converged = 0;
  CHECK(lrare_action_minimize(Z, &x, "interval:-pi,pi", 1.0, 100, 1, &action,
                              &converged) == LRARE_OK);
  CHECK(action == doctest::Approx(M_PI * M_PI / 2).epsilon(1e-3));
  CHECK(converged == 1);

  lrare_summary plain{}, is{};
  CHECK(lrare_run_plain(V, 1.0, &x, "interval:-1.5,1.5", 1.0, 1e-2, 2000, 3, 1,
                        &plain) == LRARE_OK);
  CHECK(lrare_run_importance(V, V, 1.0, &x, "interval:-1.5,1.5", 1.0, 1e-2, 1e-2,
                             2000, 3, 2, &is) == LRARE_OK);
  CHECK(plain.n == 2000);
  CHECK(plain.mean == is.mean);
  CHECK(plain.hits == is.hits);
  CHECK(lrare_run_importance(V, B, 1.0, &x, "interval:-pi,pi", 1.0, 1e-2, 1.5e-2,
                             10, 3, 1, &is) == LRARE_CONFIG_ERROR);

  lrare_potential_destroy(Z);
  lrare_potential_destroy(B);
  lrare_potential_destroy(V);
}
