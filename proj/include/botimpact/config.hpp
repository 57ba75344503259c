#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "botimpact/analytics.hpp"
#include "botimpact/bot_detect.hpp"
#include "botimpact/opinion.hpp"

namespace botimpact {

enum class Tristate { kAny, kYes, kNo };

// Bots selected for one GHIC series by partisanship and Qanon status.
struct GroupDefinition {
  std::string name;
  std::optional<Partisanship> partisanship;  // nullopt = any
  Tristate qanon = Tristate::kAny;
};

struct PipelineConfig {
  std::filesystem::path tweets;
  std::filesystem::path profiles;
  std::filesystem::path ratings;  // empty = no media-quality columns
  std::filesystem::path anti_keywords;
  std::filesystem::path pro_keywords;
  std::filesystem::path qanon_keywords;
  std::filesystem::path out_dir = "out";

  EquilibriumMethod method = EquilibriumMethod::kLinearSolve;
  SolverOptions solver;
  FactorGraphParams bot_detect;

  double stubborn_low = 0.10;
  double stubborn_high = 0.90;
  double partisan_cutoff = kDefaultPartisanCutoff;
  double bot_threshold = 0.8;
  std::size_t followings_cap = kDefaultFollowingsCap;
  std::size_t histogram_bins = 20;
  std::size_t leaderboard_k = 10;
  std::vector<GroupDefinition> ghic_groups = default_groups();
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  static std::vector<GroupDefinition> default_groups();

  // Throws ConfigError naming the first out-of-range field.
  void validate() const;
};

// Directory holding the bundled keyword lists.
std::filesystem::path default_keyword_dir();

// Defaults with keyword paths pointing at the bundled lists.
PipelineConfig default_config();

// JSON object; unknown keys are errors. Relative paths resolve against
// `base_dir`.
PipelineConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// Everything except out_dir, with paths as given.
nlohmann::ordered_json config_snapshot(const PipelineConfig& config);

}  // namespace botimpact
