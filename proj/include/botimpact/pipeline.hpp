#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "botimpact/config.hpp"
#include "botimpact/graph.hpp"
#include "botimpact/ingest.hpp"

namespace botimpact {

// Stage outputs, relative to the configured out_dir.
namespace outputs {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kFollowerNetwork = "follower_network.tsv";
inline constexpr const char* kRetweetDir = "retweet";
inline constexpr const char* kRates = "rates.csv";
inline constexpr const char* kPosteriorDir = "bots";
inline constexpr const char* kBots = "bots.csv";
inline constexpr const char* kHistogram = "bot_histogram.csv";
inline constexpr const char* kAccounts = "accounts.csv";
inline constexpr const char* kGroupSummary = "group_summary.csv";
inline constexpr const char* kGhicSeries = "ghic_series.csv";
inline constexpr const char* kGhicPerBot = "ghic_per_bot.csv";
inline constexpr const char* kReport = "report.txt";
}  // namespace outputs

// Every edge (u, v) weighted by how often v retweeted u over the corpus.
DirectedWeightedGraph build_corpus_retweet_network(std::span<const TweetRecord> tweets);

// Each stage reads its inputs from the config and earlier stage outputs in
// out_dir, writes its own outputs atomically, and logs diagnostics to `log`.
void run_build(const PipelineConfig& config, std::ostream& log);
void run_detect_bots(const PipelineConfig& config, std::ostream& log);
void run_classify(const PipelineConfig& config, std::ostream& log);
void run_ghic(const PipelineConfig& config, std::ostream& log);
void run_report(const PipelineConfig& config, std::ostream& log);

// build, detect-bots, classify, ghic, report.
void run_all(const PipelineConfig& config, std::ostream& log);

// Generates a corpus from a JSON spec file into `dir`.
void run_synth(const std::filesystem::path& spec_path, const std::filesystem::path& dir,
               std::optional<std::uint64_t> seed_override, std::ostream& log);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws InputError when the column is absent.
  std::size_t column(std::string_view name) const;
};

// Comma-separated with a header row; fields carry no quoting.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace botimpact
