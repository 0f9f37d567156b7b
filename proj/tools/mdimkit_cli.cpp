// mdimkit: runs experiment configs and writes CSV/JSON tables.
//
// Exit status: 0 success, 1 an exact inequality failed (verify-vp) or a
// tiling did not validate, 2 configuration or usage error, 3 runtime error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mdimkit/commands.hpp"
#include "mdimkit/config.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::size_t budget_cells = 0;
};

void add_common(CLI::App* sub, Flags& f, bool needs_config) {
  auto* c = sub->add_option("--config", f.config, "experiment config file");
  if (needs_config) c->required();
  sub->add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
  sub->add_option("--seed", f.seed, "override the config seed");
  sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--budget-cells", f.budget_cells, "override the |X| x |Y| cell budget")->check(CLI::PositiveNumber);
}

mdk::Overrides overrides(CLI::App* sub, const Flags& f) {
  mdk::Overrides o;
  if (sub->count("--seed")) o.seed = f.seed;
  if (sub->count("--jobs")) o.jobs = f.jobs;
  if (sub->count("--budget-cells")) o.budget_cells = f.budget_cells;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdimkit: metric mean dimension and rate-distortion experiments"};
  app.set_version_flag("--version", std::string("mdimkit ") + mdk::kToolkitVersion);
  app.require_subcommand(1);
  Flags f;
  for (const char* name : {"mdim", "rd", "verify-vp", "tiling"}) {
    add_common(app.add_subcommand(name, std::string("run the ") + name + " command"), f, true);
  }
  add_common(app.add_subcommand("selftest", "run every stock config"), f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    if (command == "selftest") {
      if (!f.config.empty()) throw mdk::ConfigError("command line", 0, "--config", "selftest uses the stock configs");
      const auto res = mdk::run_selftest(f.out_dir, overrides(sub, f), std::cout);
      std::cout << "selftest " << (res.status == 0 ? "passed" : "failed") << "\n";
      return res.status;
    }
    mdk::ExperimentConfig cfg = mdk::resolve_config(mdk::load_config_file(f.config));
    mdk::apply_overrides(cfg, overrides(sub, f));
    return mdk::run_command(command, cfg, f.out_dir, std::cout).status;
  } catch (const mdk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
