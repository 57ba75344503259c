#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "botimpact/config.hpp"
#include "botimpact/error.hpp"
#include "botimpact/pipeline.hpp"

namespace fs = std::filesystem;
using namespace botimpact;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumerical = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput: return kExitInput;
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kNumerical: return kExitNumerical;
    case ErrorKind::kInvalidArgument: return kExitInput;
  }
  return kExitOther;
}

struct GlobalFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

PipelineConfig resolve(const GlobalFlags& g) {
  PipelineConfig c = g.config.empty() ? default_config() : load_config(g.config);
  if (!g.out.empty()) c.out_dir = g.out;
  if (g.seed) c.seed = *g.seed;
  if (g.workers) c.workers = *g.workers;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bot detection and opinion-impact pipeline for retweet/follower corpora"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.add_option("--config", flags.config, "pipeline config (JSON)");
  app.add_option("--out", flags.out, "output directory (overrides config out_dir)");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--workers", flags.workers, "worker threads")->check(CLI::Range(1, 256));

  auto* build = app.add_subcommand("build", "persist follower/retweet networks and tweet rates");
  auto* detect = app.add_subcommand("detect-bots", "daily bot inference, bot set and histogram");
  auto* classify = app.add_subcommand("classify", "account table and group summary");
  auto* ghic = app.add_subcommand("ghic", "daily bot impact series and per-bot summary");
  auto* report = app.add_subcommand("report", "consolidated text report");
  auto* all = app.add_subcommand("run", "build, detect-bots, classify, ghic and report");
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string spec_path;
  synth->add_option("spec", spec_path, "synth spec (JSON)")->required();

  for (auto* sub : {build, detect, classify, ghic, report, all, synth}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) {
      const fs::path dir = flags.out.empty() ? fs::path("synth_out") : fs::path(flags.out);
      run_synth(spec_path, dir, flags.seed, std::cerr);
      return 0;
    }
    const PipelineConfig config = resolve(flags);
    if (*build) run_build(config, std::cerr);
    if (*detect) run_detect_bots(config, std::cerr);
    if (*classify) run_classify(config, std::cerr);
    if (*ghic) run_ghic(config, std::cerr);
    if (*report) run_report(config, std::cerr);
    if (*all) run_all(config, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return 0;
}
