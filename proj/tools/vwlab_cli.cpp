#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "vwlab.h"

namespace {

struct Globals {
  std::string config;
  std::string out = "run";
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> sets;
};

std::string overrides_for(const Globals& g, const std::string& mode) {
  std::string o;
  if (!mode.empty()) o += "run.mode = " + mode + "\n";
  if (g.seed_set) o += "run.seed = " + std::to_string(g.seed) + "\n";
  for (const auto& s : g.sets) o += s + "\n";
  return o;
}

int load(const Globals& g, const std::string& mode, vwlab_config** cfg) {
  const std::string o = overrides_for(g, mode);
  const vwlab_status st = g.config.empty() ? vwlab_config_from_text("", o.c_str(), cfg)
                                           : vwlab_config_from_file(g.config.c_str(), o.c_str(), cfg);
  if (st != VWLAB_OK) std::fprintf(stderr, "vwlab: %s\n", vwlab_last_error());
  return st;
}

int execute(const Globals& g, const std::string& sub) {
  vwlab_set_threads(g.threads);
  vwlab_config* cfg = nullptr;
  std::string mode = sub;
  if (sub == "simulate") {
    // memory unless the file asks for the direct wave solver
    if (int st = load(g, "", &cfg); st != VWLAB_OK) return st;
    mode = std::strcmp(vwlab_config_mode(cfg), "direct-wave") == 0 ? "direct-wave" : "memory";
    vwlab_config_free(cfg);
    cfg = nullptr;
  }
  if (int st = load(g, mode, &cfg); st != VWLAB_OK) return st;
  char hash[17];
  vwlab_config_hash(cfg, hash);
  std::fprintf(stderr, "vwlab %s: mode %s, config %s, output %s\n", vwlab_version(), vwlab_config_mode(cfg),
               hash, g.out.c_str());
  const int code = vwlab_run(cfg, g.out.c_str());
  vwlab_config_free(cfg);
  if (code != 0) std::fprintf(stderr, "vwlab: exit %d; see %s/failure.txt\n", code, g.out.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vlasov-wave laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Configuration file (key = value lines)")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Run directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "Random seed")->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--set", g.sets, "Override, e.g. --set transport.dt=0.01 (repeatable)");

  const std::vector<std::pair<const char*, const char*>> subs = {
      {"kernels", "Tabulate the memory kernel and its integral"},
      {"simulate", "Self-consistent transport (memory or direct-wave coupling)"},
      {"picard", "Picard iteration for the memory formulation"},
      {"sweep", "Rescaled runs against the limit dynamics"},
      {"vpkernel", "Mollified Coulomb kernel gap study"},
      {"validate", "Run the acceptance criteria"},
      {"nparticle", "Particle system with the memory force"},
  };
  for (const auto& [name, help] : subs) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : VWLAB_E_CONFIG;
  }
  return execute(g, app.get_subcommands().front()->get_name());
}
