// Command line front end over the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "wienerlab/wienerlab.h"

int main(int argc, char** argv) {
  CLI::App app{"wienerlab: Wiener-space decoupling and BSDE experiments"};
  app.require_subcommand(1);
  unsigned threads = 0;
  std::string out_dir;
  app.add_option("--threads", threads, "worker threads (0 keeps the config value)");
  app.add_option("--out", out_dir, std::string("output directory (overrides the config and ") + "WIENERLAB_OUT)");

  auto* run = app.add_subcommand("run", "run one experiment config");
  std::string config;
  run->add_option("config", config, "YAML experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--threads", threads, "worker threads (0 keeps the config value)");
  run->add_option("--out", out_dir, "output directory");

  app.add_subcommand("list", "list experiments, functionals, Phi variants and BSDE presets");
  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list")) {
    char* text = nullptr;
    if (wl_catalog(&text) != WL_OK) {
      std::fprintf(stderr, "error: %s\n", wl_last_error());
      return 1;
    }
    std::fputs(text, stdout);
    wl_string_free(text);
    return 0;
  }

  int exit_code = 0;
  const wl_status st = wl_run_config(config.c_str(), threads, out_dir.empty() ? nullptr : out_dir.c_str(), &exit_code);
  if (st != WL_OK) {
    std::fprintf(stderr, "error (%s): %s\n", wl_status_name(st), wl_last_error());
    return 1;
  }
  if (exit_code != 0) std::fprintf(stderr, "%s\n", wl_last_error());
  return exit_code;
}
