#include "lrare.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "lrare/density.hpp"
#include "lrare/error.hpp"
#include "lrare/estimators.hpp"
#include "lrare/experiment.hpp"
#include "lrare/fp_oracle.hpp"
#include "lrare/rate_action.hpp"

struct lrare_config {
  lrare::ExperimentConfig value;
};

struct lrare_report {
  std::string text;
};

struct lrare_potential {
  lrare::PotentialPtr value;
};

namespace {

thread_local std::string g_last_error;

lrare_status fail(lrare_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

// Maps exceptions onto status codes.
template <class F>
lrare_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return LRARE_OK;
  } catch (const lrare::ConfigError& e) {
    return fail(LRARE_CONFIG_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LRARE_RUNTIME_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(LRARE_RUNTIME_ERROR, e.what());
  } catch (...) {
    return fail(LRARE_RUNTIME_ERROR, "unknown error");
  }
}

#define LRARE_REQUIRE(cond)                                           \
  do {                                                                \
    if (!(cond))                                                      \
      return fail(LRARE_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

lrare_status make_report(std::string text, lrare_report** out) {
  *out = new lrare_report{std::move(text)};
  return LRARE_OK;
}

std::span<const double> point(const lrare_potential* p, const double* x) {
  return {x, p->value->dimension()};
}

void fill_summary(const lrare::EstimatorSummary& s, lrare_summary* out) {
  out->n = s.n();
  out->hits = s.hits();
  out->mean = s.mean();
  out->variance = s.variance();
  out->std_error = s.std_error();
  out->lambda = s.lambda().value_or(std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

extern "C" {

const char* lrare_version(void) { return "0.1.0"; }

const char* lrare_last_error(void) { return g_last_error.c_str(); }

lrare_status lrare_config_create(lrare_config** out) {
  LRARE_REQUIRE(out != nullptr);
  return guarded([&] { *out = new lrare_config{}; });
}

void lrare_config_destroy(lrare_config* config) { delete config; }

lrare_status lrare_config_parse(lrare_config* config, const char* text,
                                const char* source) {
  LRARE_REQUIRE(config != nullptr && text != nullptr);
  return guarded([&] {
    lrare::ExperimentConfig updated = config->value;
    updated.merge(text, source != nullptr ? source : "<config>");
    config->value = std::move(updated);
  });
}

lrare_status lrare_config_load_file(lrare_config* config, const char* path) {
  LRARE_REQUIRE(config != nullptr && path != nullptr);
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw lrare::ConfigError(std::string("cannot open config file '") + path +
                               "'");
    std::ostringstream text;
    text << in.rdbuf();
    lrare::ExperimentConfig updated = config->value;
    updated.merge(text.str(), path);
    config->value = std::move(updated);
  });
}

lrare_status lrare_config_set(lrare_config* config, const char* key,
                              const char* value) {
  LRARE_REQUIRE(config != nullptr && key != nullptr && value != nullptr);
  return guarded([&] { config->value.set(key, value); });
}

lrare_status lrare_config_check(const lrare_config* config) {
  LRARE_REQUIRE(config != nullptr);
  return guarded([&] { config->value.check(); });
}

size_t lrare_config_key_count(void) {
  return lrare::ExperimentConfig::keys().size();
}

const char* lrare_config_key(size_t index) {
  const auto& keys = lrare::ExperimentConfig::keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

lrare_status lrare_config_echo(const lrare_config* config, lrare_report** out) {
  LRARE_REQUIRE(config != nullptr && out != nullptr);
  return guarded([&] { make_report(config->value.echo(), out); });
}

lrare_status lrare_run(const lrare_config* config, size_t workers,
                       lrare_report** out) {
  LRARE_REQUIRE(config != nullptr && out != nullptr);
  return guarded(
      [&] { make_report(lrare::run_experiment(config->value, workers), out); });
}

lrare_status lrare_validate(const lrare_config* config, lrare_report** out) {
  LRARE_REQUIRE(config != nullptr && out != nullptr);
  return guarded(
      [&] { make_report(lrare::validate_experiment(config->value), out); });
}

const char* lrare_report_text(const lrare_report* report) {
  return report != nullptr ? report->text.c_str() : "";
}

size_t lrare_report_size(const lrare_report* report) {
  return report != nullptr ? report->text.size() : 0;
}

void lrare_report_destroy(lrare_report* report) { delete report; }

lrare_status lrare_potential_create(const char* spec, size_t dim,
                                    lrare_potential** out) {
  LRARE_REQUIRE(spec != nullptr && out != nullptr && dim > 0);
  return guarded([&] {
    *out = new lrare_potential{lrare::make_potential(spec, dim)};
  });
}

lrare_status lrare_potential_transform(const lrare_potential* base,
                                       const char* region, lrare_transform kind,
                                       lrare_potential** out) {
  LRARE_REQUIRE(base != nullptr && region != nullptr && out != nullptr);
  LRARE_REQUIRE(kind == LRARE_FLATTEN || kind == LRARE_INVERT);
  return guarded([&] {
    auto D = lrare::parse_region(region, base->value->dimension());
    auto p = kind == LRARE_FLATTEN
                 ? lrare::flatten_on_region(base->value, std::move(D))
                 : lrare::invert_on_region(base->value, std::move(D));
    *out = new lrare_potential{std::move(p)};
  });
}

void lrare_potential_destroy(lrare_potential* potential) { delete potential; }

size_t lrare_potential_dimension(const lrare_potential* potential) {
  return potential != nullptr ? potential->value->dimension() : 0;
}

lrare_status lrare_potential_value(const lrare_potential* potential,
                                   const double* x, double* out) {
  LRARE_REQUIRE(potential != nullptr && x != nullptr && out != nullptr);
  return guarded([&] { *out = potential->value->value(point(potential, x)); });
}

lrare_status lrare_potential_gradient(const lrare_potential* potential,
                                      const double* x, double* out) {
  LRARE_REQUIRE(potential != nullptr && x != nullptr && out != nullptr);
  return guarded([&] {
    potential->value->gradient(point(potential, x),
                               {out, potential->value->dimension()});
  });
}

lrare_status lrare_potential_laplacian(const lrare_potential* potential,
                                       const double* x, double* out) {
  LRARE_REQUIRE(potential != nullptr && x != nullptr && out != nullptr);
  return guarded(
      [&] { *out = potential->value->laplacian(point(potential, x)); });
}

lrare_status lrare_generator_self(const lrare_potential* potential,
                                  double sigma, const double* x, double* out) {
  LRARE_REQUIRE(potential != nullptr && x != nullptr && out != nullptr);
  return guarded([&] {
    *out = lrare::generator_apply_to_self(
        *potential->value, lrare::NoiseScale::from_sigma(sigma),
        point(potential, x));
  });
}

lrare_status lrare_density_estimate(const lrare_potential* V, double sigma,
                                    const double* x, const double* y, double t,
                                    lrare_density_result* out) {
  LRARE_REQUIRE(V != nullptr && x != nullptr && y != nullptr && out != nullptr);
  return guarded([&] {
    const auto est = lrare::estimate_density(
        *V->value, lrare::NoiseScale::from_sigma(sigma), point(V, x),
        point(V, y), t);
    out->approx = est.approx;
    out->lower = est.lower;
    out->upper = est.upper;
    out->delta = est.constants.delta;
    out->K = est.constants.K_lipschitz;
  });
}

lrare_status lrare_fp_escape(const lrare_potential* V, double sigma, double x0,
                             double a, double b, double T, double dx, double dt,
                             double* out) {
  LRARE_REQUIRE(V != nullptr && out != nullptr);
  return guarded([&] {
    lrare::FpSettings s;
    if (dx > 0.0) s.dx = dx;
    if (dt > 0.0) s.dt = dt;
    *out = lrare::escape_probability(*V->value,
                                     lrare::NoiseScale::from_sigma(sigma), x0,
                                     a, b, T, s);
  });
}

lrare_status lrare_action_minimize(const lrare_potential* V, const double* x0,
                                   const char* region, double T, size_t knots,
                                   size_t restarts, double* value,
                                   int* converged) {
  LRARE_REQUIRE(V != nullptr && x0 != nullptr && region != nullptr &&
                value != nullptr);
  return guarded([&] {
    const auto D = lrare::parse_region(region, V->value->dimension());
    lrare::ActionOptions opt;
    if (knots > 0) opt.knots = knots;
    if (restarts > 0) opt.restarts = restarts;
    const auto r = lrare::minimize_exit_action(*V->value, point(V, x0), *D, T, opt);
    *value = r.value;
    if (converged != nullptr) *converged = r.converged ? 1 : 0;
  });
}

lrare_status lrare_run_plain(const lrare_potential* V, double sigma,
                             const double* x0, const char* region, double T,
                             double h, size_t N, uint64_t seed, size_t workers,
                             lrare_summary* out) {
  LRARE_REQUIRE(V != nullptr && x0 != nullptr && region != nullptr &&
                out != nullptr);
  return guarded([&] {
    const auto D = lrare::parse_region(region, V->value->dimension());
    const auto grid = lrare::TimeGrid::make(T, h);
    lrare::RunOptions opt;
    opt.seed = seed;
    opt.workers = workers;
    const auto r = lrare::run_plain(*V->value, lrare::NoiseScale::from_sigma(sigma),
                                    point(V, x0), grid, {D, grid.horizon}, N, opt);
    fill_summary(r.summary, out);
  });
}

lrare_status lrare_run_importance(const lrare_potential* V,
                                  const lrare_potential* Vtilde, double sigma,
                                  const double* x0, const char* region,
                                  double T, double h, double tau, size_t N,
                                  uint64_t seed, size_t workers,
                                  lrare_summary* out) {
  LRARE_REQUIRE(V != nullptr && Vtilde != nullptr && x0 != nullptr &&
                region != nullptr && out != nullptr);
  return guarded([&] {
    const auto D = lrare::parse_region(region, V->value->dimension());
    const auto grid = lrare::TimeGrid::make(T, h);
    lrare::RunOptions opt;
    opt.seed = seed;
    opt.workers = workers;
    const auto r = lrare::run_importance(
        *V->value, *Vtilde->value, lrare::NoiseScale::from_sigma(sigma),
        point(V, x0), grid, tau, {D, grid.horizon}, N, opt);
    fill_summary(r.summary, out);
  });
}

}  // extern "C"
