#include "lrare/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "lrare/density.hpp"
#include "lrare/error.hpp"
#include "lrare/estimators.hpp"
#include "lrare/fp_oracle.hpp"
#include "lrare/girsanov.hpp"
#include "lrare/rate_action.hpp"
#include "lrare/sde.hpp"

namespace lrare {

namespace {

const std::vector<std::string> kModes = {"plain",  "importance", "density",
                                         "fp",     "action",     "sweep",
                                         "table5"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string join(const std::vector<double>& v, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += num(v[i]);
  }
  return out;
}

std::vector<double> parse_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto part = trim(value.substr(
        start, comma == std::string_view::npos ? value.npos : comma - start));
    if (part.empty())
      throw ConfigError("key '" + std::string(key) + "': empty list entry");
    out.push_back(parse_number(part));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  try {
    const double v = parse_number(value);
    if (!std::isfinite(v)) throw ConfigError("not finite");
    return v;
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + std::string(key) + "': invalid number '" +
                      std::string(value) + "'");
  }
}

double positive(std::string_view key, std::string_view value) {
  const double v = parse_real(key, value);
  if (!(v > 0.0))
    throw ConfigError("key '" + std::string(key) + "' must be > 0, got " +
                      std::string(value));
  return v;
}

// Non-negative integer; "1e6" is accepted.
std::size_t count(std::string_view key, std::string_view value) {
  const double v = parse_real(key, value);
  if (v < 0.0 || v != std::floor(v) || v > 9.0e15)
    throw ConfigError("key '" + std::string(key) +
                      "' must be a non-negative integer, got " +
                      std::string(value));
  return static_cast<std::size_t>(v);
}

std::uint64_t parse_seed(std::string_view value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("key 'seed': expected an unsigned 64-bit integer, got '" +
                      std::string(value) + "'");
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string point_field(std::span<const double> x) {
  return join(std::vector<double>(x.begin(), x.end()), ' ');
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = {
      "mode",      "potential",   "sampling_potential",
      "dim",       "sigma",       "epsilon",
      "beta",      "x0",          "T",
      "h",         "tau",         "N",
      "plain_N",   "seed",        "region",
      "y",         "t",           "alpha",
      "quadrature_nodes",         "fp_dx",
      "fp_dt",     "density_dump", "knots",
      "restarts",  "max_iterations", "epsilons",
      "taus",      "sup_grid"};
  return k;
}

void ExperimentConfig::set(std::string_view key_in, std::string_view value_in) {
  const auto key = trim(key_in);
  const auto value = trim(value_in);
  const std::string k(key);
  if (k == "mode") {
    if (std::find(kModes.begin(), kModes.end(), value) == kModes.end())
      throw ConfigError("key 'mode': unknown mode '" + std::string(value) +
                        "' (plain|importance|density|fp|action|sweep|table5)");
    mode = value;
  } else if (k == "potential") {
    make_potential(value, dim);
    potential = value;
  } else if (k == "sampling_potential") {
    if (value.empty())
      throw ConfigError("key 'sampling_potential' must not be empty");
    sampling_potential = value;
  } else if (k == "dim") {
    dim = count(key, value);
    if (dim == 0) throw ConfigError("key 'dim' must be >= 1");
  } else if (k == "sigma") {
    sigma = positive(key, value);
  } else if (k == "epsilon") {
    sigma = NoiseScale::from_epsilon(positive(key, value)).sigma();
  } else if (k == "beta") {
    sigma = NoiseScale::from_beta(positive(key, value)).sigma();
  } else if (k == "x0") {
    x0 = parse_list(key, value);
  } else if (k == "T") {
    T = positive(key, value);
  } else if (k == "h") {
    h = positive(key, value);
  } else if (k == "tau") {
    tau = positive(key, value);
  } else if (k == "N") {
    N = count(key, value);
  } else if (k == "plain_N") {
    plain_N = count(key, value);
  } else if (k == "seed") {
    seed = parse_seed(value);
  } else if (k == "region") {
    try {
      region = parse_region(value, dim)->describe();
    } catch (const ConfigError& e) {
      throw ConfigError("key 'region': " + std::string(e.what()));
    }
  } else if (k == "y") {
    y = parse_list(key, value);
  } else if (k == "t") {
    t = positive(key, value);
  } else if (k == "alpha") {
    alpha = parse_real(key, value);
    if (!(alpha > 0.0 && alpha < 0.5))
      throw ConfigError("key 'alpha' must lie in (0, 0.5)");
  } else if (k == "quadrature_nodes") {
    quadrature_nodes = count(key, value);
  } else if (k == "fp_dx") {
    fp_dx = positive(key, value);
  } else if (k == "fp_dt") {
    fp_dt = positive(key, value);
  } else if (k == "density_dump") {
    density_dump = value;
  } else if (k == "knots") {
    knots = count(key, value);
  } else if (k == "restarts") {
    restarts = count(key, value);
  } else if (k == "max_iterations") {
    max_iterations = count(key, value);
  } else if (k == "epsilons") {
    epsilons = parse_list(key, value);
  } else if (k == "taus") {
    taus = parse_list(key, value);
  } else if (k == "sup_grid") {
    sup_grid = count(key, value);
  } else {
    throw ConfigError("unknown key '" + k + "'");
  }
}

void ExperimentConfig::merge(std::string_view text, std::string_view source) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + ": expected key=value, got '" +
                        std::string(line) + "'");
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
}

ExperimentConfig ExperimentConfig::parse(std::string_view text,
                                         std::string_view source) {
  ExperimentConfig c;
  c.merge(text, source);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

RegionPtr ExperimentConfig::region_ptr() const {
  return parse_region(region, dim);
}

PotentialPtr ExperimentConfig::potential_ptr() const {
  return make_potential(potential, dim);
}

PotentialPtr ExperimentConfig::sampling_potential_ptr() const {
  const std::string s(trim(sampling_potential));
  if (s == "same") return potential_ptr();
  if (s == "flatten(D)" || s == "flatten")
    return flatten_on_region(potential_ptr(), region_ptr());
  if (s == "invert(D)" || s == "invert")
    return invert_on_region(potential_ptr(), region_ptr());
  return make_potential(s, dim);
}

void ExperimentConfig::check() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(x0.size() == dim, "x0 has " + std::to_string(x0.size()) +
                             " coordinates but dim = " + std::to_string(dim));
  const auto D = region_ptr();
  need(D->dimension() == dim, "region dimension does not match dim");
  potential_ptr();
  need(N >= 2 || mode == "density" || mode == "fp" || mode == "action",
       "N must be >= 2");
  const TimeGrid grid = TimeGrid::make(T, h);
  if (mode == "importance" || mode == "sweep") RiemannMesh::make(tau, grid);
  if (mode == "importance" || mode == "sweep" || mode == "table5")
    sampling_potential_ptr();
  if (mode == "table5") {
    need(!taus.empty(), "taus must not be empty");
    for (double v : taus) RiemannMesh::make(v, grid);
    flatten_on_region(potential_ptr(), D);
    invert_on_region(potential_ptr(), D);
  }
  if (mode == "density") {
    need(y.size() == dim, "y has " + std::to_string(y.size()) +
                              " coordinates but dim = " + std::to_string(dim));
    need(quadrature_nodes >= 3, "quadrature_nodes must be >= 3");
  }
  if (mode == "fp") {
    need(dim == 1, "mode fp is one-dimensional");
    need(dynamic_cast<const BoxRegion*>(D.get()) != nullptr,
         "mode fp needs an interval region");
  }
  if (mode == "action" || mode == "sweep") {
    need(knots >= 2, "knots must be >= 2");
    need(max_iterations >= 1, "max_iterations must be >= 1");
  }
  if (mode == "sweep") {
    need(!epsilons.empty(), "epsilons must not be empty");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      need(epsilons[i] > 0.0, "epsilons must be > 0");
      need(i == 0 || epsilons[i] < epsilons[i - 1],
           "epsilons must be strictly decreasing");
    }
  }
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  out << "mode=" << mode << '\n'
      << "potential=" << potential << '\n'
      << "sampling_potential=" << sampling_potential << '\n'
      << "dim=" << dim << '\n'
      << "sigma=" << num(sigma) << '\n'
      << "x0=" << join(x0) << '\n'
      << "T=" << num(T) << '\n'
      << "h=" << num(h) << '\n'
      << "tau=" << num(tau) << '\n'
      << "N=" << N << '\n'
      << "plain_N=" << plain_N << '\n'
      << "seed=" << seed << '\n'
      << "region=" << region << '\n'
      << "y=" << join(y) << '\n'
      << "t=" << num(t) << '\n'
      << "alpha=" << num(alpha) << '\n'
      << "quadrature_nodes=" << quadrature_nodes << '\n'
      << "fp_dx=" << num(fp_dx) << '\n'
      << "fp_dt=" << num(fp_dt) << '\n'
      << "density_dump=" << density_dump << '\n'
      << "knots=" << knots << '\n'
      << "restarts=" << restarts << '\n'
      << "max_iterations=" << max_iterations << '\n'
      << "epsilons=" << join(epsilons) << '\n'
      << "taus=" << join(taus) << '\n'
      << "sup_grid=" << sup_grid << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kEstimatorHeader =
    "estimator,potential,N,tau,h,seed,mean,per_sample_variance,std_error,"
    "relative_error,lambda,variance_ratio,theorem3_bound\n";

struct Row {
  std::string estimator;
  std::string potential;
  std::size_t n = 0;
  std::optional<double> tau;
  const ExperimentConfig* cfg = nullptr;
  const EstimatorSummary* summary = nullptr;
  std::optional<double> variance_ratio;
  std::optional<double> bound;
};

void write_row(std::ostream& out, const Row& r) {
  const auto& s = *r.summary;
  out << r.estimator << ',' << csv_quote(r.potential) << ',' << r.n << ','
      << num(r.tau) << ',' << num(r.cfg->h) << ',' << r.cfg->seed << ','
      << num(s.mean()) << ',' << num(s.variance()) << ',' << num(s.std_error())
      << ',' << num(s.relative_error()) << ',' << num(s.lambda()) << ','
      << num(r.variance_ratio) << ',' << num(r.bound) << '\n';
}

void warn_clamped(const RunResult& r) {
  if (r.clamped_weights > 0)
    std::fprintf(stderr,
                 "lrare: warning: %zu importance weights clamped at 1e300\n",
                 r.clamped_weights);
}

RunOptions run_options(const ExperimentConfig& c, std::size_t workers) {
  RunOptions o;
  o.seed = c.seed;
  o.workers = workers;
  return o;
}

ActionOptions action_options(const ExperimentConfig& c, std::size_t workers) {
  ActionOptions o;
  o.knots = c.knots;
  o.restarts = c.restarts;
  o.max_iterations = c.max_iterations;
  o.workers = workers;
  return o;
}

std::string mode_plain(const ExperimentConfig& c, std::size_t workers) {
  const auto V = c.potential_ptr();
  const auto D = c.region_ptr();
  const TimeGrid grid = TimeGrid::make(c.T, c.h);
  const auto plain = run_plain(*V, c.noise(), c.x0, grid, {D, grid.horizon},
                               c.N, run_options(c, workers));
  std::ostringstream out;
  out << kEstimatorHeader;
  write_row(out, {"plain", V->describe(), c.N, std::nullopt, &c, &plain.summary,
                  std::nullopt, std::nullopt});
  return out.str();
}

std::string mode_importance(const ExperimentConfig& c, std::size_t workers) {
  const auto V = c.potential_ptr();
  const auto Vt = c.sampling_potential_ptr();
  const auto D = c.region_ptr();
  const auto noise = c.noise();
  const TimeGrid grid = TimeGrid::make(c.T, c.h);
  const EscapeEvent event{D, grid.horizon};
  std::ostringstream out;
  out << kEstimatorHeader;
  const auto is = run_importance(*V, *Vt, noise, c.x0, grid, c.tau, event, c.N,
                                 run_options(c, workers));
  warn_clamped(is);
  Diagnostics diag;
  if (c.plain_N > 0) {
    const auto plain = run_plain(*V, noise, c.x0, grid, event, c.plain_N,
                                 run_options(c, workers));
    write_row(out, {"plain", V->describe(), c.plain_N, std::nullopt, &c,
                    &plain.summary, std::nullopt, std::nullopt});
    diag = diagnostics(plain.summary, is.summary, *V, *Vt, *D, noise, c.x0,
                       grid.horizon);
  } else {
    diag = diagnostics(is.summary, *V, *Vt, *D, noise, c.x0, grid.horizon);
  }
  write_row(out, {"importance", c.sampling_potential, c.N, c.tau, &c,
                  &is.summary, diag.variance_ratio, diag.theorem3_bound});
  return out.str();
}

std::string mode_table5(const ExperimentConfig& c, std::size_t workers) {
  const auto V = c.potential_ptr();
  const auto D = c.region_ptr();
  const auto noise = c.noise();
  const TimeGrid grid = TimeGrid::make(c.T, c.h);
  const EscapeEvent event{D, grid.horizon};
  const std::size_t plain_n = c.plain_N > 0 ? c.plain_N : c.N;
  const auto plain = run_plain(*V, noise, c.x0, grid, event, plain_n,
                               run_options(c, workers));
  std::ostringstream out;
  out << kEstimatorHeader;
  write_row(out, {"plain", V->describe(), plain_n, std::nullopt, &c,
                  &plain.summary, std::nullopt, std::nullopt});
  const std::pair<std::string, PotentialPtr> samplers[] = {
      {"flatten(D)", flatten_on_region(V, D)},
      {"invert(D)", invert_on_region(V, D)}};
  for (const auto& [label, Vt] : samplers) {
    // Same seed for every tau: the rows differ only through the mesh.
    for (double tau : c.taus) {
      const auto is = run_importance(*V, *Vt, noise, c.x0, grid, tau, event,
                                     c.N, run_options(c, workers));
      warn_clamped(is);
      const auto diag = diagnostics(plain.summary, is.summary, *V, *Vt, *D,
                                    noise, c.x0, grid.horizon);
      write_row(out, {"importance", label, c.N, tau, &c, &is.summary,
                      diag.variance_ratio, diag.theorem3_bound});
    }
  }
  return out.str();
}

std::string mode_density(const ExperimentConfig& c) {
  const auto V = c.potential_ptr();
  DensityOptions opt;
  opt.nodes = c.quadrature_nodes;
  opt.alpha = c.alpha;
  opt.grid_per_axis = c.sup_grid;
  const auto est = estimate_density(*V, c.noise(), c.x0, c.y, c.t, opt);
  std::ostringstream out;
  out << "x,y,t,approx,lower,upper,M1,M2,gamma,delta,K,sup_abs_generator\n"
      << point_field(est.x) << ',' << point_field(est.y) << ',' << num(est.t)
      << ',' << num(est.approx) << ',' << num(est.lower) << ','
      << num(est.upper) << ',' << num(est.constants.M1) << ','
      << num(est.constants.M2) << ',' << num(est.constants.gamma) << ','
      << num(est.constants.delta) << ',' << num(est.constants.K_lipschitz)
      << ',' << num(est.constants.sup_abs_generator) << '\n';
  return out.str();
}

std::string mode_fp(const ExperimentConfig& c) {
  const auto V = c.potential_ptr();
  const auto D = c.region_ptr();
  const auto& box = dynamic_cast<const BoxRegion&>(*D);
  const double a = box.lower()[0];
  const double b = box.upper()[0];
  const auto noise = c.noise();
  FpSettings settings;
  settings.dx = c.fp_dx;
  settings.dt = c.fp_dt;
  FpGrid grid = escape_grid(a, b, noise, c.T, settings);
  set_point_mass(grid, c.x0[0]);
  const FpGrid final_grid = evolve(*V, noise, std::move(grid), c.T);
  const double mass = final_grid.mass();
  const double escape = std::clamp(
      (final_grid.mass_in(final_grid.x_min, a) +
       final_grid.mass_in(b, final_grid.x_max)) / mass,
      0.0, 1.0);
  if (!c.density_dump.empty()) {
    std::ofstream dump(c.density_dump, std::ios::binary);
    if (!dump)
      throw Error("cannot write density dump '" + c.density_dump + "'");
    write_density_csv(dump, final_grid);
  }
  std::ostringstream out;
  out << "x0,a,b,T,escape_probability,mass,clamped_mass,n_cells,dx,dt\n"
      << num(c.x0[0]) << ',' << num(a) << ',' << num(b) << ',' << num(c.T)
      << ',' << num(escape) << ',' << num(mass) << ','
      << num(final_grid.clamped_mass) << ',' << final_grid.n_cells << ','
      << num(final_grid.dx) << ',' << num(final_grid.dt) << '\n';
  return out.str();
}

std::string mode_action(const ExperimentConfig& c, std::size_t workers) {
  const auto V = c.potential_ptr();
  const auto D = c.region_ptr();
  const auto res =
      minimize_exit_action(*V, c.x0, *D, c.T, action_options(c, workers));
  if (!res.converged)
    std::fprintf(stderr,
                 "lrare: warning: action minimization did not converge in %zu "
                 "iterations\n",
                 res.iterations);
  std::ostringstream out;
  out << "I_hat,converged,m,iterations,exit_point\n"
      << num(res.value) << ',' << (res.converged ? "true" : "false") << ','
      << res.path.segments() << ',' << res.iterations << ','
      << point_field(res.path.terminal()) << '\n';
  return out.str();
}

std::string mode_sweep(const ExperimentConfig& c, std::size_t workers) {
  const auto V = c.potential_ptr();
  const auto Vt = c.sampling_potential_ptr();
  const auto D = c.region_ptr();
  const auto action =
      minimize_exit_action(*V, c.x0, *D, c.T, action_options(c, workers));
  SweepSettings s;
  s.epsilons = c.epsilons;
  s.horizon = c.T;
  s.step = c.h;
  s.tau = c.tau;
  s.samples = c.N;
  s.rate_function = action.value;
  s.run = run_options(c, workers);
  const auto rows = small_noise_sweep(*V, *Vt, D, c.x0, s);
  std::ostringstream out;
  out << "epsilon,N,hits,p_hat,lambda,lambda_std_error,eps_log_lambda,"
         "predicted_limit,note\n";
  for (const auto& r : rows)
    out << num(r.epsilon) << ',' << r.n << ',' << r.hits << ',' << num(r.p_hat)
        << ',' << num(r.lambda) << ',' << num(r.lambda_std_error) << ','
        << num(r.eps_log_lambda) << ',' << num(r.predicted_limit) << ','
        << csv_quote(r.note) << '\n';
  return out.str();
}

}  // namespace

std::string run_experiment(const ExperimentConfig& c, std::size_t workers) {
  c.check();
  if (c.mode == "plain") return mode_plain(c, workers);
  if (c.mode == "importance") return mode_importance(c, workers);
  if (c.mode == "table5") return mode_table5(c, workers);
  if (c.mode == "density") return mode_density(c);
  if (c.mode == "fp") return mode_fp(c);
  if (c.mode == "action") return mode_action(c, workers);
  if (c.mode == "sweep") return mode_sweep(c, workers);
  throw ConfigError("unknown mode '" + c.mode + "'");
}

// ---------------------------------------------------------------------------

namespace {

class CheckList {
 public:
  CheckList() { out_ << "check,status,value,detail\n"; }
  void add(const std::string& check, const char* status, double value,
           const std::string& detail) {
    out_ << check << ',' << status << ',' << num(value) << ','
         << csv_quote(detail) << '\n';
  }
  void pass_fail(const std::string& check, bool ok, double value,
                 const std::string& detail) {
    add(check, ok ? "PASS" : "FAIL", value, detail);
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

constexpr double kMatchTolerance = 1e-9;

// Integrates dy/dt = -grad W(y) from x0 with RK4 and returns the first time
// y leaves D (or nullopt), together with y(T).
std::pair<std::optional<double>, Point> deterministic_exit(
    const Potential& W, const Region& D, std::span<const double> x0,
    double T) {
  const std::size_t d = x0.size();
  const std::size_t steps = 10'000;
  const double dt = T / static_cast<double>(steps);
  Point y(x0.begin(), x0.end()), k1(d), k2(d), k3(d), k4(d), tmp(d);
  auto rhs = [&](const Point& at, Point& out) {
    W.gradient(at, out);
    for (double& v : out) v = -v;
  };
  std::optional<double> exit;
  for (std::size_t s = 0; s < steps; ++s) {
    rhs(y, k1);
    for (std::size_t k = 0; k < d; ++k) tmp[k] = y[k] + 0.5 * dt * k1[k];
    rhs(tmp, k2);
    for (std::size_t k = 0; k < d; ++k) tmp[k] = y[k] + 0.5 * dt * k2[k];
    rhs(tmp, k3);
    for (std::size_t k = 0; k < d; ++k) tmp[k] = y[k] + dt * k3[k];
    rhs(tmp, k4);
    for (std::size_t k = 0; k < d; ++k)
      y[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    if (!exit && !D.contains(y)) exit = static_cast<double>(s + 1) * dt;
  }
  return {exit, y};
}

}  // namespace

std::string validate_experiment(const ExperimentConfig& c) {
  const auto V = c.potential_ptr();
  const auto D = c.region_ptr();
  if (D->dimension() != c.dim || c.x0.size() != c.dim)
    throw ConfigError("validate: x0 and region must match dim");
  const auto noise = c.noise();
  CheckList list;

  PotentialPtr Vt;
  try {
    Vt = c.sampling_potential_ptr();
  } catch (const Error& e) {
    list.add("sampling_potential", "FAIL", std::numeric_limits<double>::quiet_NaN(),
             e.what());
    return list.str();
  }

  const double v0 = V->value(c.x0);
  const double vt0 = Vt->value(c.x0);
  list.pass_fail("V(x0) < V~(x0)", v0 < vt0, vt0 - v0,
                 "V(x0) = " + num(v0) + "; V~(x0) = " + num(vt0));

  const double grad_excess = sup_over_region(
      *D,
      [&](std::span<const double> x) {
        return std::sqrt(Vt->gradient_norm_squared(x)) -
               std::sqrt(V->gradient_norm_squared(x));
      },
      c.sup_grid);
  list.pass_fail("|grad V~| <= |grad V| on D", grad_excess <= kMatchTolerance,
                 grad_excess, "sup over D of |grad V~| - |grad V|");

  const Box outer = D->bounding_box().inflated(1.0);
  const double outside_gap = sup_over_box(
      outer,
      [&](std::span<const double> x) {
        return D->contains(x) ? 0.0 : std::abs(Vt->value(x) - V->value(x));
      },
      c.sup_grid);
  list.pass_fail("V~ = V outside D", outside_gap <= kMatchTolerance,
                 outside_gap, "sup of |V~ - V| off D within distance 1");

  const double M = variance_bound_exponent_M(*V, *Vt, *D, c.sup_grid);
  const double eps_TM = noise.epsilon() * c.T * M;
  list.pass_fail("V~(x0) - V(x0) >= eps T M", vt0 - v0 >= eps_TM, vt0 - v0,
                 "M = " + num(M) + "; eps T M = " + num(eps_TM));
  list.add("variance ratio bound", "INFO",
           variance_ratio_bound(*V, *Vt, *D, noise, c.x0, c.T, c.sup_grid),
           "exp(eps^-1 (V(x0) - V~(x0)) + T M)");

  double boundary_grad = 0.0;
  double boundary_value = 0.0;
  for (const Point& p : D->boundary_probe(64)) {
    boundary_grad = std::max(boundary_grad, std::sqrt(V->gradient_norm_squared(p)));
    boundary_value = std::max(boundary_value, std::abs(V->value(p)));
  }
  list.pass_fail("grad V = 0 on boundary of D",
                 boundary_grad <= kBoundaryMatchTolerance, boundary_grad,
                 "max |grad V| over boundary probe");
  list.pass_fail("V = 0 on boundary of D",
                 boundary_value <= kBoundaryMatchTolerance, boundary_value,
                 "max |V| over boundary probe");
  const double inversion_gap = sup_over_region(
      *D,
      [&](std::span<const double> x) {
        return std::abs(Vt->value(x) + V->value(x));
      },
      c.sup_grid);
  list.pass_fail("V~ = -V on D", inversion_gap <= kMatchTolerance,
                 inversion_gap, "sup over D of |V~ + V|");
  const double K = sup_over_region(
      *D, [&](std::span<const double> x) { return std::abs(V->laplacian(x)); },
      c.sup_grid);
  list.add("K = sup |Lap V| on D", "INFO", K, "");

  const auto [exit_time, yT] = deterministic_exit(*Vt, *D, c.x0, c.T);
  const bool out_at_T = !D->contains(yT);
  std::string detail = "y(T) = " + point_field(yT);
  if (exit_time) detail += "; first exit at t = " + num(*exit_time);
  else detail += "; flow under -grad V~ stays in D up to T";
  list.pass_fail("y(T) not in D for dy/dt = -grad V~(y)", out_at_T,
                 exit_time.value_or(std::numeric_limits<double>::infinity()),
                 detail);
  return list.str();
}

}  // namespace lrare
