// rfdress: potentials, ring analysis, frequency sweeps and synthetic images
// for rf-dressed quadrupole traps.
#include "rfdress/commands.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "INI configuration file")->required();
  sub->add_option("--out", o.out, "output directory (overrides [output] directory)");
  sub->add_option("--set", o.overrides, "override, section.key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rf-dressed quadrupole trap toolkit"};
  app.require_subcommand(1);
  Options opt;
  using Runner = void (*)(const rfdress::RunConfig&, const std::filesystem::path&);
  const std::pair<const char*, Runner> commands[] = {
      {"potential", rfdress::run_potential},
      {"analyze", rfdress::run_analyze},
      {"sweep", rfdress::run_sweep},
      {"image", rfdress::run_image},
  };
  const char* help[] = {"sample the dressed potential on a grid", "classify the trap and locate its minima",
                        "analyze the trap over a list of rf frequencies", "simulate an absorption image and measure the ring radius"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    add_common(sub, opt);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : rfdress::kExitConfig;
  }

  try {
    rfdress::RunConfig cfg = rfdress::load_run_config(opt.config, opt.overrides);
    if (!opt.out.empty()) cfg.output.directory = opt.out;
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) commands[i].second(cfg, cfg.output.directory);
  } catch (...) {
    std::string msg;
    const int rc = rfdress::exit_code_for_current_exception(msg);
    std::fprintf(stderr, "rfdress: %s\n", msg.c_str());
    return rc;
  }
  return rfdress::kExitOk;
}
