#include "botimpact/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "botimpact/analytics.hpp"
#include "botimpact/bot_detect.hpp"
#include "botimpact/error.hpp"
#include "botimpact/ghic.hpp"
#include "botimpact/io.hpp"
#include "botimpact/parallel.hpp"
#include "botimpact/stats.hpp"
#include "botimpact/synth.hpp"

namespace botimpact {
namespace fs = std::filesystem;
namespace {

using OrderedJson = nlohmann::ordered_json;

constexpr std::size_t kMaxLoggedDiagnostics = 10;

fs::path out_path(const PipelineConfig& c, std::string_view name) { return c.out_dir / name; }

void require_file(const fs::path& path, std::string_view stage) {
  if (!fs::exists(path)) {
    throw InputError(fmt::format("missing {} (run the {} stage first)", path.string(), stage));
  }
}

void require_input(const fs::path& path, std::string_view field) {
  if (path.empty()) throw ConfigError(fmt::format("config field '{}' is not set", field));
  if (!fs::exists(path)) throw InputError(fmt::format("input file not found: {}", path.string()));
}

template <typename Record>
void log_diagnostics(std::ostream& log, std::string_view what, const LoadResult<Record>& r) {
  if (r.skipped > 0) log << fmt::format("warning: skipped {} malformed {} lines\n", r.skipped, what);
  for (std::size_t i = 0; i < std::min(r.diagnostics.size(), kMaxLoggedDiagnostics); ++i) {
    log << "  " << r.diagnostics[i] << '\n';
  }
  if (r.truncated > 0) {
    log << fmt::format("note: {} {} records truncated to the followings cap\n", r.truncated, what);
  }
}

std::vector<TweetRecord> load_tweet_input(const PipelineConfig& c, std::ostream& log,
                                          LoadResult<TweetRecord>* full = nullptr) {
  require_input(c.tweets, "tweets");
  auto result = load_tweets(c.tweets);
  log_diagnostics(log, "tweet", result);
  if (result.records.empty()) {
    throw InputError(fmt::format("no valid tweets in {}", c.tweets.string()));
  }
  if (full != nullptr) {
    *full = std::move(result);
    return full->records;
  }
  return std::move(result.records);
}

LoadResult<UserProfileRecord> load_profile_input(const PipelineConfig& c, std::ostream& log) {
  require_input(c.profiles, "profiles");
  auto result = load_profiles(c.profiles, c.followings_cap);
  log_diagnostics(log, "profile", result);
  return result;
}

TweetRates corpus_rates(std::span<const TweetRecord> tweets) {
  return tweet_rates(tweets, window_of(tweets));
}

std::string csv_bool(bool b) { return b ? "1" : "0"; }

std::string csv_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

double parse_number(const std::string& s, const fs::path& path, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(fmt::format("{}: row {}: bad number '{}'", path.string(), row + 2, s));
}

std::optional<double> parse_optional(const std::string& s, const fs::path& path,
                                     std::size_t row) {
  if (s.empty()) return std::nullopt;
  return parse_number(s, path, row);
}

OrderedJson load_manifest(const PipelineConfig& c) {
  const fs::path path = out_path(c, outputs::kManifest);
  require_file(path, "build");
  std::ifstream in(path);
  try {
    return OrderedJson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<UtcDay> manifest_days(const OrderedJson& manifest) {
  std::vector<UtcDay> days;
  for (const auto& d : manifest.at("days")) days.push_back(UtcDay::parse(d.get<std::string>()));
  return days;
}

std::set<std::string> load_bot_ids(const PipelineConfig& c) {
  const fs::path path = out_path(c, outputs::kBots);
  require_file(path, "detect-bots");
  const CsvTable t = read_csv(path);
  const std::size_t id = t.column("account_id");
  std::set<std::string> bots;
  for (const auto& row : t.rows) bots.insert(row[id]);
  return bots;
}

std::vector<AccountRecord> load_accounts(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_id = t.column("account_id");
  const std::size_t c_op = t.column("opinion");
  const std::size_t c_scored = t.column("opinion_scored");
  const std::size_t c_count = t.column("tweet_count");
  const std::size_t c_rate = t.column("tweet_rate");
  const std::size_t c_part = t.column("partisanship");
  const std::size_t c_qanon = t.column("qanon");
  const std::size_t c_bot = t.column("bot");
  const std::size_t c_tox = t.column("mean_toxicity");
  const auto media_it = std::find(t.header.begin(), t.header.end(), "media_quality");
  const bool has_media = media_it != t.header.end();
  const std::size_t c_media = static_cast<std::size_t>(media_it - t.header.begin());

  std::vector<AccountRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    AccountRecord a;
    a.account_id = row[c_id];
    a.opinion = parse_number(row[c_op], path, r);
    a.opinion_scored = row[c_scored] == "1";
    a.tweet_count = static_cast<std::uint64_t>(parse_number(row[c_count], path, r));
    a.tweet_rate = parse_number(row[c_rate], path, r);
    a.partisanship = row[c_part] == "pro" ? Partisanship::kPro : Partisanship::kAnti;
    a.qanon = row[c_qanon] == "1";
    a.bot = row[c_bot] == "1";
    if (has_media) a.media_quality = parse_optional(row[c_media], path, r);
    a.mean_toxicity = parse_optional(row[c_tox], path, r);
    out.push_back(std::move(a));
  }
  return out;
}

// Accounts without a scored tweet carry no partisanship evidence and never
// join a partisan group.
bool in_group(const GroupDefinition& g, const AccountRecord& a) {
  if (g.partisanship && (!a.opinion_scored || *g.partisanship != a.partisanship)) return false;
  if (g.qanon == Tristate::kYes && !a.qanon) return false;
  if (g.qanon == Tristate::kNo && a.qanon) return false;
  return true;
}

std::string fixed(double v, int digits = 4) { return fmt::format("{:.{}f}", v, digits); }

std::string fixed(const std::optional<double>& v, int digits = 4) {
  return v ? fixed(*v, digits) : std::string("n/a");
}

std::string p_value_text(double p) {
  if (p < 1e-6) return "<1e-6";
  return fmt::format("{:.4g}", p);
}

std::string welch_line(std::string_view label, std::span<const double> a,
                       std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    return fmt::format("  {}: n/a (needs >= 2 per side, have {} and {})\n", label, a.size(),
                       b.size());
  }
  const TestResult t = welch_t_test(a, b);
  return fmt::format("  {}: difference {} t = {} p = {}\n", label, fixed(t.difference),
                     fixed(t.statistic, 3), p_value_text(t.p_value));
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError(fmt::format("CSV column '{}' missing", name));
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const fs::path& path) {
  LineReader reader(path);
  CsvTable t;
  std::string line;
  if (!reader.next(line)) throw InputError(fmt::format("{}: empty CSV file", path.string()));
  for (auto f : split(line, ',')) t.header.emplace_back(f);
  while (reader.next(line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    for (auto f : split(line, ',')) row.emplace_back(f);
    if (row.size() != t.header.size()) {
      throw InputError(fmt::format("{}:{}: expected {} fields, found {}", path.string(),
                                   reader.line_number(), t.header.size(), row.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

DirectedWeightedGraph build_corpus_retweet_network(std::span<const TweetRecord> tweets) {
  std::set<std::string> names;
  for (const auto& t : tweets) {
    names.insert(t.author_id);
    if (t.retweeted_author_id) names.insert(*t.retweeted_author_id);
  }
  DirectedWeightedGraph::Builder b;
  for (const auto& n : names) b.add_node(n);
  for (const auto& t : tweets) {
    if (t.retweeted_author_id) b.add_interaction(*t.retweeted_author_id, t.author_id);
  }
  return std::move(b).build();
}

void run_build(const PipelineConfig& c, std::ostream& log) {
  LoadResult<TweetRecord> tweet_load;
  const auto tweets = load_tweet_input(c, log, &tweet_load);
  const auto profiles = load_profile_input(c, log);
  fs::create_directories(c.out_dir / outputs::kRetweetDir);

  const auto authors = corpus_authors(tweets);
  const auto follower = build_follower_network(profiles.records, authors);
  write_edge_list(follower, out_path(c, outputs::kFollowerNetwork));

  const CollectionWindow window = window_of(tweets);
  const TweetRates rates = tweet_rates(tweets, window);
  {
    AtomicFileWriter f(out_path(c, outputs::kRates));
    f.stream() << "account_id,tweet_count,rate\n";
    for (const auto& [id, n] : rates.counts) {
      f.stream() << id << ',' << n << ',' << format_double(rates.rate(id)) << '\n';
    }
    f.commit();
  }

  const auto days = tweet_days(tweets);
  std::vector<std::string> day_files(days.size());
  std::vector<double> day_weights(days.size(), 0.0);
  parallel_for(days.size(), c.workers, [&](std::size_t i) {
    const auto net = build_daily_retweet_network(tweets, days[i]);
    day_files[i] = fmt::format("{}/{}.tsv", outputs::kRetweetDir, days[i].iso());
    write_edge_list(net, out_path(c, day_files[i]));
    day_weights[i] = net.total_weight();
  });

  std::size_t retweets = 0;
  for (const auto& t : tweets) retweets += t.is_retweet() ? 1 : 0;

  OrderedJson m;
  m["tweets"] = {{"records", tweets.size()}, {"skipped", tweet_load.skipped}};
  m["profiles"] = {{"records", profiles.records.size()},
                   {"skipped", profiles.skipped},
                   {"truncated", profiles.truncated}};
  m["accounts"] = authors.size();
  m["retweets"] = retweets;
  m["daily_retweet_weight"] = std::accumulate(day_weights.begin(), day_weights.end(), 0.0);
  m["follower_edges"] = follower.edge_count();
  m["window"] = {{"start", window.start().iso()},
                 {"end", window.end().iso()},
                 {"days", window.duration_days()}};
  auto day_list = OrderedJson::array();
  for (const auto& d : days) day_list.push_back(d.iso());
  m["days"] = day_list;
  OrderedJson files;
  files[outputs::kFollowerNetwork] = sha256_hex(out_path(c, outputs::kFollowerNetwork));
  files[outputs::kRates] = sha256_hex(out_path(c, outputs::kRates));
  for (const auto& f : day_files) files[f] = sha256_hex(out_path(c, f));
  m["files"] = files;
  m["config"] = config_snapshot(c);
  write_file_atomic(out_path(c, outputs::kManifest), m.dump(2) + "\n");
  log << fmt::format("build: {} tweets, {} accounts, {} days, {} follower edges\n", tweets.size(),
                     authors.size(), days.size(), follower.edge_count());
}

void run_detect_bots(const PipelineConfig& c, std::ostream& log) {
  c.bot_detect.validate();
  const auto days = manifest_days(load_manifest(c));
  fs::create_directories(c.out_dir / outputs::kPosteriorDir);

  struct DayResult {
    std::vector<std::string> names;
    std::vector<double> probability;
    bool converged = true;
  };
  std::vector<DayResult> results(days.size());
  parallel_for(days.size(), c.workers, [&](std::size_t i) {
    const fs::path in =
        out_path(c, fmt::format("{}/{}.tsv", outputs::kRetweetDir, days[i].iso()));
    require_file(in, "build");
    const auto net = read_edge_list(in);
    const BotPosterior post = infer_bot_probabilities(net, c.bot_detect);
    DayResult& r = results[i];
    r.names = net.names();
    r.probability = post.bot_probability;
    r.converged = post.converged;

    AtomicFileWriter f(out_path(
        c, fmt::format("{}/posterior_{}.csv", outputs::kPosteriorDir, days[i].iso())));
    f.stream() << "account_id,bot_probability,converged\n";
    for (NodeId u = 0; u < net.node_count(); ++u) {
      f.stream() << net.name(u) << ',' << format_double(post.bot_probability[u]) << ','
                 << csv_bool(post.converged) << '\n';
    }
    f.commit();
  });

  std::map<std::string, double> peak;
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (!results[i].converged) {
      log << fmt::format("warning: belief propagation did not converge on {}\n", days[i].iso());
    }
    for (std::size_t k = 0; k < results[i].names.size(); ++k) {
      double& p = peak.try_emplace(results[i].names[k], 0.0).first->second;
      p = std::max(p, results[i].probability[k]);
    }
  }

  AtomicFileWriter bots(out_path(c, outputs::kBots));
  bots.stream() << "account_id,max_bot_probability\n";
  std::vector<double> peaks;
  std::size_t bot_count = 0;
  for (const auto& [id, p] : peak) {
    peaks.push_back(p);
    if (p > c.bot_threshold) {
      bots.stream() << id << ',' << format_double(p) << '\n';
      ++bot_count;
    }
  }
  bots.commit();

  const Histogram h = probability_histogram(peaks, c.histogram_bins);
  AtomicFileWriter hist(out_path(c, outputs::kHistogram));
  hist.stream() << "bin_lower,bin_upper,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    hist.stream() << format_double(h.bin_lower(b)) << ',' << format_double(h.bin_upper(b)) << ','
                  << h.counts[b] << '\n';
  }
  hist.commit();
  log << fmt::format("detect-bots: {} of {} accounts above {}\n", bot_count, peak.size(),
                     c.bot_threshold);
}

void run_classify(const PipelineConfig& c, std::ostream& log) {
  load_manifest(c);
  const auto tweets = load_tweet_input(c, log);
  const auto profiles = load_profile_input(c, log);
  const auto bots = load_bot_ids(c);
  const TweetRates rates = corpus_rates(tweets);
  require_input(c.qanon_keywords, "qanon_keywords");
  const KeywordSet qanon = KeywordSet::load(KeywordLabel::kQanon, c.qanon_keywords);

  std::optional<MediaRatingsTable> ratings;
  if (!c.ratings.empty() && fs::exists(c.ratings)) {
    ratings = MediaRatingsTable::load(c.ratings);
  } else {
    log << "warning: no media ratings file; media_quality columns omitted\n";
  }

  AccountInputs in;
  in.tweets = tweets;
  in.profiles = profiles.records;
  in.rates = &rates;
  in.bots = &bots;
  in.qanon_keywords = &qanon;
  in.ratings = ratings ? &*ratings : nullptr;
  in.partisan_cutoff = c.partisan_cutoff;
  const auto accounts = build_account_records(in);

  {
    AtomicFileWriter f(out_path(c, outputs::kAccounts));
    auto& o = f.stream();
    o << "account_id,opinion,opinion_scored,tweet_count,tweet_rate,partisanship,qanon,bot,";
    if (ratings) o << "media_quality,";
    o << "mean_toxicity\n";
    for (const auto& a : accounts) {
      o << a.account_id << ',' << format_double(a.opinion) << ',' << csv_bool(a.opinion_scored)
        << ',' << a.tweet_count << ',' << format_double(a.tweet_rate) << ','
        << to_string(a.partisanship) << ',' << csv_bool(a.qanon) << ',' << csv_bool(a.bot) << ',';
      if (ratings) o << csv_optional(a.media_quality) << ',';
      o << csv_optional(a.mean_toxicity) << '\n';
    }
    f.commit();
  }

  const GroupSummary summary = group_summary(accounts);
  AtomicFileWriter f(out_path(c, outputs::kGroupSummary));
  auto& o = f.stream();
  o << "partisanship,bot,qanon,accounts,tweets,mean_tweet_rate,";
  if (ratings) o << "mean_media_quality,";
  o << "mean_toxicity\n";
  auto row = [&](std::string_view p, std::string_view b, std::string_view q, const GroupRow& r) {
    o << p << ',' << b << ',' << q << ',' << r.count << ',' << r.tweet_count << ','
      << format_double(r.mean_rate) << ',';
    if (ratings) o << csv_optional(r.mean_media_quality) << ',';
    o << csv_optional(r.mean_toxicity) << '\n';
  };
  for (const auto& [key, r] : summary.rows) {
    row(to_string(key.partisanship), csv_bool(key.bot), csv_bool(key.qanon), r);
  }
  row("all", "all", "all", summary.totals);
  f.commit();
  log << fmt::format("classify: {} accounts, {} bots\n", accounts.size(), bots.size());
}

void run_ghic(const PipelineConfig& c, std::ostream& log) {
  load_manifest(c);
  const fs::path accounts_path = out_path(c, outputs::kAccounts);
  require_file(accounts_path, "classify");
  const fs::path follower_path = out_path(c, outputs::kFollowerNetwork);
  require_file(follower_path, "build");

  const auto tweets = load_tweet_input(c, log);
  const auto accounts = load_accounts(accounts_path);
  const TweetRates rates = corpus_rates(tweets);
  std::vector<std::string> ids;
  for (const auto& a : accounts) ids.push_back(a.account_id);
  const auto follower = read_edge_list(follower_path, nullptr, ids);

  std::vector<double> opinions;
  std::vector<bool> is_bot;
  for (const auto& a : accounts) {
    opinions.push_back(a.opinion);
    is_bot.push_back(a.bot);
  }
  const StubbornSelection sel = identify_stubborn(opinions, is_bot, c.stubborn_low, c.stubborn_high);
  std::map<std::string, AccountState> states;
  for (std::size_t i = 0; i < accounts.size(); ++i) {
    states[accounts[i].account_id] = {sel.assignment.stubborn[i], accounts[i].opinion};
  }
  log << fmt::format("ghic: stubborn cut points low {} high {}, {} stubborn of {}\n",
                     format_double(sel.thresholds.low), format_double(sel.thresholds.high),
                     sel.assignment.stubborn_count(), accounts.size());

  std::vector<BotGroup> groups;
  for (const auto& def : c.ghic_groups) {
    BotGroup g{def.name, {}};
    for (const auto& a : accounts) {
      if (a.bot && in_group(def, a)) g.members.insert(a.account_id);
    }
    groups.push_back(std::move(g));
  }

  GhicOptions opts;
  opts.method = c.method;
  opts.solver = c.solver;
  const DailyGhicSeries series =
      daily_ghic_series(tweets, follower, rates, states, groups, opts, c.workers);
  for (const auto& note : series.notes) log << "note: " << note << '\n';

  {
    AtomicFileWriter f(out_path(c, outputs::kGhicSeries));
    f.stream() << "day,group,ghic,active_nodes,group_active_count,ghic_per_bot\n";
    for (const auto& e : series.entries) {
      for (const auto& g : e.groups) {
        f.stream() << e.day.iso() << ',' << g.group << ',' << format_double(g.result.value) << ','
                   << e.active_nodes << ',' << g.group_active << ','
                   << format_double(g.per_bot()) << '\n';
      }
    }
    f.commit();
  }
  AtomicFileWriter f(out_path(c, outputs::kGhicPerBot));
  f.stream() << "group,min,q1,median,q3,max,mean,n\n";
  for (const auto& d : ghic_per_bot(series, groups)) {
    if (d.never_active) {
      f.stream() << d.group << ",,,,,,,0\n";
      continue;
    }
    f.stream() << d.group << ',' << format_double(d.min) << ',' << format_double(d.q1) << ','
               << format_double(d.median) << ',' << format_double(d.q3) << ','
               << format_double(d.max) << ',' << format_double(d.mean) << ',' << d.values.size()
               << '\n';
  }
  f.commit();
  log << fmt::format("ghic: {} days, {} groups\n", series.entries.size(), groups.size());
}

void run_report(const PipelineConfig& c, std::ostream& log) {
  std::ostringstream r;
  r << "Bot impact report\n=================\n\n";

  const fs::path manifest_path = out_path(c, outputs::kManifest);
  if (fs::exists(manifest_path)) {
    const auto m = load_manifest(c);
    r << "Corpus\n------\n";
    r << fmt::format("tweets: {}\nretweets: {}\naccounts: {}\nfollower edges: {}\n",
                     m["tweets"]["records"].get<std::size_t>(), m["retweets"].get<std::size_t>(),
                     m["accounts"].get<std::size_t>(), m["follower_edges"].get<std::size_t>());
    r << fmt::format("window: {} to {} ({} days)\n\n", m["window"]["start"].get<std::string>(),
                     m["window"]["end"].get<std::string>(), m["window"]["days"].get<int>());
  } else {
    r << "Corpus section omitted: build outputs not found.\n\n";
  }

  const fs::path accounts_path = out_path(c, outputs::kAccounts);
  std::vector<AccountRecord> accounts;
  if (fs::exists(accounts_path)) accounts = load_accounts(accounts_path);

  if (accounts.empty()) {
    r << "Account sections omitted: classify outputs not found.\n\n";
  } else {
    const GroupSummary s = group_summary(accounts);
    r << "Account groups\n--------------\n";
    r << fmt::format("{:<13}{:<7}{:<7}{:>10}{:>10}{:>12}{:>10}{:>10}\n", "partisanship", "bot",
                     "qanon", "accounts", "tweets", "rate/day", "media", "toxicity");
    auto line = [&](std::string_view p, std::string_view b, std::string_view q,
                    const GroupRow& g) {
      r << fmt::format("{:<13}{:<7}{:<7}{:>10}{:>10}{:>12}{:>10}{:>10}\n", p, b, q, g.count,
                       g.tweet_count, fixed(g.mean_rate, 3), fixed(g.mean_media_quality, 3),
                       fixed(g.mean_toxicity, 3));
    };
    for (const auto& [k, g] : s.rows) {
      line(to_string(k.partisanship), k.bot ? "yes" : "no", k.qanon ? "yes" : "no", g);
    }
    line("all", "", "", s.totals);
    r << '\n';

    r << "Bot prevalence\n--------------\n";
    std::vector<std::pair<std::size_t, std::size_t>> counts;
    for (const auto& def : c.ghic_groups) {
      std::size_t n = 0, b = 0;
      for (const auto& a : accounts) {
        if (!in_group(def, a)) continue;
        ++n;
        b += a.bot ? 1 : 0;
      }
      counts.emplace_back(b, n);
      r << fmt::format("bot fraction {}: {}/{} = {}\n", def.name, b, n,
                       n > 0 ? fixed(double(b) / double(n)) : std::string("n/a"));
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      for (std::size_t j = i + 1; j < counts.size(); ++j) {
        if (counts[i].second == 0 || counts[j].second == 0) continue;
        const auto t = two_proportion_z_test(counts[i].first, counts[i].second, counts[j].first,
                                             counts[j].second);
        r << fmt::format("  {} vs {}: z = {} p = {}\n", c.ghic_groups[i].name,
                         c.ghic_groups[j].name, fixed(t.statistic, 3), p_value_text(t.p_value));
      }
    }
    r << '\n';

    r << "Tweet rates\n-----------\n";
    std::vector<double> humans, qanon_humans, bots;
    for (const auto& a : accounts) {
      if (a.bot) {
        bots.push_back(a.tweet_rate);
      } else if (a.qanon) {
        qanon_humans.push_back(a.tweet_rate);
      } else {
        humans.push_back(a.tweet_rate);
      }
    }
    auto mean = [](const std::vector<double>& v) -> std::optional<double> {
      if (v.empty()) return std::nullopt;
      return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    };
    r << fmt::format("mean rate non-qanon humans: {} (n={})\n", fixed(mean(humans), 3),
                     humans.size());
    r << fmt::format("mean rate qanon humans: {} (n={})\n", fixed(mean(qanon_humans), 3),
                     qanon_humans.size());
    r << fmt::format("mean rate bots: {} (n={})\n", fixed(mean(bots), 3), bots.size());
    r << welch_line("qanon vs non-qanon humans", qanon_humans, humans);
    r << welch_line("bots vs non-qanon humans", bots, humans);
    r << '\n';

    r << "Media quality and toxicity\n--------------------------\n";
    for (Partisanship p : {Partisanship::kAnti, Partisanship::kPro}) {
      std::vector<double> mq_b, mq_h, tx_b, tx_h;
      for (const auto& a : accounts) {
        if (a.partisanship != p) continue;
        if (a.media_quality) (a.bot ? mq_b : mq_h).push_back(*a.media_quality);
        if (a.mean_toxicity) (a.bot ? tx_b : tx_h).push_back(*a.mean_toxicity);
      }
      r << fmt::format("{}: media quality bots {} humans {}; toxicity bots {} humans {}\n",
                       to_string(p), fixed(mean(mq_b), 3), fixed(mean(mq_h), 3),
                       fixed(mean(tx_b), 3), fixed(mean(tx_h), 3));
      r << welch_line(fmt::format("{} media quality bots vs humans", to_string(p)), mq_b, mq_h);
      r << welch_line(fmt::format("{} toxicity bots vs humans", to_string(p)), tx_b, tx_h);
    }
    r << '\n';

    std::map<std::string, const AccountRecord*> by_id;
    for (const auto& a : accounts) by_id[a.account_id] = &a;

    if (!c.tweets.empty() && fs::exists(c.tweets)) {
      std::ostringstream sink;
      const auto tweets = load_tweet_input(c, sink);
      const auto net = build_corpus_retweet_network(tweets);
      auto is_bot = [&](NodeId u) {
        auto it = by_id.find(net.name(u));
        return it != by_id.end() && it->second->bot;
      };
      r << "Retweet leaderboards\n--------------------\n";
      for (bool by_bots : {true, false}) {
        r << fmt::format("most retweeted by {}:\n", by_bots ? "bots" : "humans");
        const auto top = retweet_leaderboard(
            net, [&](NodeId u) { return is_bot(u) == by_bots; }, c.leaderboard_k);
        if (top.empty()) r << "  (none)\n";
        for (std::size_t i = 0; i < top.size(); ++i) {
          r << fmt::format("  {:>2}. {} {}\n", i + 1, top[i].account_id,
                           format_double(top[i].retweets));
        }
      }
      r << '\n';
    } else {
      r << "Leaderboard section omitted: tweets file not found.\n\n";
    }

    const fs::path follower_path = out_path(c, outputs::kFollowerNetwork);
    if (fs::exists(follower_path)) {
      std::vector<std::string> ids;
      for (const auto& a : accounts) ids.push_back(a.account_id);
      const auto follower = read_edge_list(follower_path, nullptr, ids);
      std::vector<std::optional<Partisanship>> labels(follower.node_count());
      for (NodeId u = 0; u < follower.node_count(); ++u) {
        auto it = by_id.find(follower.name(u));
        if (it != by_id.end() && it->second->opinion_scored) labels[u] = it->second->partisanship;
      }
      std::vector<NodeId> anti_bots, pro_bots;
      for (NodeId u = 0; u < follower.node_count(); ++u) {
        auto it = by_id.find(follower.name(u));
        if (it == by_id.end() || !it->second->bot) continue;
        (it->second->partisanship == Partisanship::kAnti ? anti_bots : pro_bots).push_back(u);
      }
      const auto ov = follower_overlap(follower, anti_bots, pro_bots);
      r << "Bot follower overlap\n--------------------\n";
      r << fmt::format("followers of anti bots only: {}\nfollowers of pro bots only: {}\n"
                       "followers of both: {}\n\n",
                       ov.a_only, ov.b_only, ov.both);

      r << "Co-partisan follower fractions\n------------------------------\n";
      std::vector<std::vector<double>> fractions(c.ghic_groups.size());
      for (std::size_t g = 0; g < c.ghic_groups.size(); ++g) {
        for (NodeId u = 0; u < follower.node_count(); ++u) {
          auto it = by_id.find(follower.name(u));
          if (it == by_id.end() || !it->second->bot || !in_group(c.ghic_groups[g], *it->second)) {
            continue;
          }
          if (auto f = co_partisan_fraction(follower, u, it->second->partisanship, labels)) {
            fractions[g].push_back(*f);
          }
        }
        r << fmt::format("{}: mean {} over {} bots with labeled followers\n",
                         c.ghic_groups[g].name, fixed(mean(fractions[g])), fractions[g].size());
      }
      for (std::size_t i = 0; i < fractions.size(); ++i) {
        for (std::size_t j = i + 1; j < fractions.size(); ++j) {
          r << welch_line(fmt::format("{} vs {}", c.ghic_groups[i].name, c.ghic_groups[j].name),
                          fractions[i], fractions[j]);
        }
      }
      r << '\n';
    } else {
      r << "Network sections omitted: follower network not found.\n\n";
    }
  }

  const fs::path series_path = out_path(c, outputs::kGhicSeries);
  const fs::path per_bot_path = out_path(c, outputs::kGhicPerBot);
  if (fs::exists(series_path) && fs::exists(per_bot_path)) {
    r << "Impact (GHIC)\n-------------\n";
    const CsvTable pb = read_csv(per_bot_path);
    r << fmt::format("{:<16}{:>6}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}\n", "group", "days", "min",
                     "q1", "median", "q3", "max", "mean");
    for (const auto& row : pb.rows) {
      auto cell = [&](std::string_view col) {
        const auto& v = row[pb.column(col)];
        return v.empty() ? std::string("n/a")
                         : fmt::format("{:.3e}", parse_number(v, per_bot_path, 0));
      };
      r << fmt::format("{:<16}{:>6}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}\n", row[pb.column("group")],
                       row[pb.column("n")], cell("min"), cell("q1"), cell("median"), cell("q3"),
                       cell("max"), cell("mean"));
    }
    const CsvTable s = read_csv(series_path);
    std::map<std::string, std::vector<double>> per_bot;
    std::map<std::string, std::vector<double>> totals;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      const auto& row = s.rows[i];
      const std::string& g = row[s.column("group")];
      if (!per_bot.contains(g)) order.push_back(g);
      auto& v = per_bot[g];
      totals[g].push_back(parse_number(row[s.column("ghic")], series_path, i));
      if (row[s.column("group_active_count")] != "0") {
        v.push_back(parse_number(row[s.column("ghic_per_bot")], series_path, i));
      }
    }
    for (const auto& g : order) {
      const auto& t = totals[g];
      r << fmt::format("{}: mean daily GHIC {:.3e} over {} days\n", g,
                       std::accumulate(t.begin(), t.end(), 0.0) /
                           double(std::max<std::size_t>(1, t.size())),
                       t.size());
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = i + 1; j < order.size(); ++j) {
        r << welch_line(fmt::format("per-bot GHIC {} vs {}", order[i], order[j]),
                        per_bot[order[i]], per_bot[order[j]]);
      }
    }
    r << '\n';
  } else {
    r << "Impact section omitted: GHIC outputs not found (run the ghic stage).\n\n";
  }

  fs::create_directories(c.out_dir);
  write_file_atomic(out_path(c, outputs::kReport), r.str());
  log << fmt::format("report: written to {}\n", out_path(c, outputs::kReport).string());
}

void run_all(const PipelineConfig& c, std::ostream& log) {
  run_build(c, log);
  run_detect_bots(c, log);
  run_classify(c, log);
  run_ghic(c, log);
  run_report(c, log);
}

void run_synth(const fs::path& spec_path, const fs::path& dir,
               std::optional<std::uint64_t> seed_override, std::ostream& log) {
  std::string text;
  try {
    LineReader reader(spec_path);
    std::string line;
    while (reader.next(line)) text += line + '\n';
  } catch (const InputError& e) {
    throw ConfigError(fmt::format("cannot read synth spec: {}", e.what()));
  }
  SynthSpec spec = parse_synth_spec(text);
  if (seed_override) spec.seed = *seed_override;
  const SynthCorpus corpus = generate_corpus(spec);
  write_corpus(corpus, dir);
  std::size_t bots = 0;
  for (const auto& a : corpus.accounts) bots += a.bot ? 1 : 0;
  log << fmt::format("synth: {} accounts ({} bots), {} follow edges, {} tweets -> {}\n",
                     corpus.accounts.size(), bots, corpus.follows.size(), corpus.tweets.size(),
                     dir.string());
}

}  // namespace botimpact
