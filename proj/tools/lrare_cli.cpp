// Batch front end: lrare_cli run|validate --config FILE [--key value ...]
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lrare.h"

namespace {

int exit_code(lrare_status s) {
  switch (s) {
    case LRARE_OK:
      return 0;
    case LRARE_CONFIG_ERROR:
      return 1;
    default:
      return 2;
  }
}

int report_error(lrare_status s) {
  std::fprintf(stderr, "lrare_cli: %s error: %s\n",
               s == LRARE_CONFIG_ERROR ? "config" : "runtime",
               lrare_last_error());
  return exit_code(s);
}

struct Common {
  std::string config_path;
  std::string output;
  std::size_t workers = 0;
  bool print_config = false;
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "key=value config file");
  cmd->add_option("-o,--output", c.output, "write the CSV report here");
  cmd->add_option("-w,--workers", c.workers,
                  "worker threads (default: LRARE_WORKERS or all cores)");
  cmd->add_flag("--print-config", c.print_config,
                "print the resolved config and exit");
  for (std::size_t i = 0; i < lrare_config_key_count(); ++i) {
    const std::string key = lrare_config_key(i);
    cmd->add_option_function<std::string>(
        "--" + key, [&c, key](const std::string& v) { c.overrides[key] = v; },
        "override config key '" + key + "'");
  }
}

int execute(const Common& c, bool validate) {
  lrare_config* config = nullptr;
  lrare_status s = lrare_config_create(&config);
  if (s != LRARE_OK) return report_error(s);
  auto done = [&](int code) {
    lrare_config_destroy(config);
    return code;
  };
  if (!c.config_path.empty()) {
    s = lrare_config_load_file(config, c.config_path.c_str());
    if (s != LRARE_OK) return done(report_error(s));
  }
  // dim first so that potentials and regions are read in the right dimension.
  std::vector<std::pair<std::string, std::string>> ordered;
  if (auto it = c.overrides.find("dim"); it != c.overrides.end())
    ordered.push_back(*it);
  for (const auto& kv : c.overrides)
    if (kv.first != "dim") ordered.push_back(kv);
  for (const auto& [key, value] : ordered) {
    s = lrare_config_set(config, key.c_str(), value.c_str());
    if (s != LRARE_OK) return done(report_error(s));
  }

  lrare_report* report = nullptr;
  if (c.print_config)
    s = lrare_config_echo(config, &report);
  else if (validate)
    s = lrare_validate(config, &report);
  else
    s = lrare_run(config, c.workers, &report);
  if (s != LRARE_OK) return done(report_error(s));

  int code = 0;
  if (c.output.empty()) {
    std::fwrite(lrare_report_text(report), 1, lrare_report_size(report), stdout);
  } else {
    std::ofstream out(c.output, std::ios::binary);
    out.write(lrare_report_text(report),
              static_cast<std::streamsize>(lrare_report_size(report)));
    if (!out) {
      std::fprintf(stderr, "lrare_cli: runtime error: cannot write '%s'\n",
                   c.output.c_str());
      code = 2;
    }
  }
  lrare_report_destroy(report);
  return done(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-event estimation for overdamped Langevin dynamics"};
  app.require_subcommand(1);
  // -h is taken by the step-size key.
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", lrare_version());

  Common run_opts;
  Common validate_opts;
  auto* run = app.add_subcommand("run", "run the configured mode, print CSV");
  run->set_help_flag("--help", "print this help and exit");
  add_common(run, run_opts);
  auto* validate =
      app.add_subcommand("validate", "check sampling-potential hypotheses");
  validate->set_help_flag("--help", "print this help and exit");
  add_common(validate, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (run->parsed()) return execute(run_opts, false);
  return execute(validate_opts, true);
}
