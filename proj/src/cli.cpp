/*
 * Copyright 2026 The fedenv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "fedenv/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "fedenv/bounds.hpp"
#include "json.hpp"

#ifndef FEDENV_VERSION
#define FEDENV_VERSION "0.0.0"
#endif

namespace fedenv {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array kSubcommands{Subcommand::kTradeoff,  Subcommand::kCdf,
                                  Subcommand::kQuantiles, Subcommand::kSubsample,
                                  Subcommand::kVerifyBounds, Subcommand::kSynth};

// Flag names shared by the command line and --config files.
constexpr std::array<std::string_view, 19> kKeys{
    "dataset",    "out",        "cost",        "l-values",           "s-values",
    "seed",       "target",     "ts-column",   "user-column",        "value-column",
    "utc-offset-minutes", "delimiter", "min-days", "threads",       "trials",
    "p-values",   "users",      "days",        "gap-every"};

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    std::string item(text.substr(start, end - start));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw std::invalid_argument("empty item in list '" + std::string(text) + "'");
    out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("--" + std::string(key) + ": not a number: '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(v[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += v[i];
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

Scheme scheme_for_cost(const std::string& cost) {
  if (cost == "l1") return Scheme::kL1Opt;
  if (cost == "l2") return Scheme::kL2Opt;
  if (cost == "naive") return Scheme::kNaive;
  return Scheme::kMseBaseline;
}

// A fatal error: exit code 2.
struct Fatal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Fatal("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Fatal("failed writing " + path.string());
}

struct Dataset {
  std::vector<ClientRecord> clients;
  ojson manifest;
};

Dataset load_dataset(const CliConfig& config, std::ostream& log) {
  if (!config.dataset_path) {
    throw Fatal(std::string(to_string(config.subcommand)) + " needs --dataset");
  }
  const std::string& path = *config.dataset_path;
  try {
    const std::string digest = sha256_file(path);
    const LoadResult loaded = load_csv(path, config.columns);
    std::map<std::string, int> users;
    for (const auto& r : loaded.readings) ++users[r.user_id];
    const SynchronizedUsers sync = filter_synchronized(loaded.readings, config.min_days);
    Dataset ds;
    for (const auto& [id, sig] : sync.signals) ds.clients.push_back({id, sig});
    ds.manifest["path"] = path;
    ds.manifest["sha256"] = digest;
    ds.manifest["readings"] = loaded.readings.size();
    ds.manifest["skipped_rows"] = loaded.skipped;
    ds.manifest["skip_examples"] = loaded.skip_examples;
    ds.manifest["users_loaded"] = users.size();
    ds.manifest["users_retained"] = ds.clients.size();
    ds.manifest["window_start_utc"] = format_hour(sync.window_start_hour);
    ds.manifest["n"] = sync.n;
    log << "dataset: " << users.size() << " users loaded, " << ds.clients.size()
        << " retained, n = " << sync.n << ", " << loaded.skipped << " rows skipped\n";
    return ds;
  } catch (const IngestError& e) {
    throw Fatal(e.what());
  }
}

std::vector<int> or_default(const std::vector<int>& v, std::vector<int> fallback) {
  return v.empty() ? fallback : v;
}

struct Outcome {
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
  int row_failures = 0;
};

std::string clamp_note(int requested, int used, int n) {
  return "L=" + std::to_string(requested) + " needs " + std::to_string(2 * requested + 1) +
         " coefficients but n=" + std::to_string(n) + "; ran L=" + std::to_string(used) +
         " (full-rank limit)";
}

void run_rows(const CliConfig& config, const Dataset& ds, bool subsample, const fs::path& dir,
              Outcome& outcome, std::ostream& log) {
  ExperimentConfig ec;
  ec.seed = config.seed;
  ec.target = config.target;
  ec.threads = config.threads;
  const std::string sub(to_string(config.subcommand));
  for (const auto& cost : config.costs) {
    ec.schemes = {scheme_for_cost(cost)};
    std::vector<MetricsRow> rows;
    if (subsample) {
      ec.L_values = or_default(config.l_values, {10, 20, 30, 40, 50, 60, 70, 80});
      ec.subsample_S = or_default(config.s_values, {1, 2, 4, 8});
      rows = experiment_subsampling(ds.clients, ec);
    } else {
      ec.L_values = or_default(config.l_values, {1, 36, 72, 180, 360});
      rows = experiment_tradeoff(ds.clients, ec);
    }
    for (const auto& r : rows) {
      if (r.status != SolveStatus::kOptimal) ++outcome.row_failures;
      if (r.requested_L != r.L) {
        outcome.notes.push_back(cost + ": " + clamp_note(r.requested_L, r.L, ds.clients[0].signal.size()));
      }
    }
    const std::string base = sub + "_" + cost;
    write_file(dir / (base + ".csv"), metrics_csv(rows));
    write_file(dir / (base + ".json"), metrics_json(rows) + "\n");
    outcome.outputs.push_back(base + ".csv");
    outcome.outputs.push_back(base + ".json");
    log << base << ": " << rows.size() << " rows\n";
  }
}

// Envelope CDF per (scheme, L) on the clamped L grid; nullopt when a client
// solve fails.
struct CdfCell {
  Scheme scheme;
  int L;
  std::optional<EmpiricalCdf> cdf;
};

std::vector<CdfCell> envelope_cdfs(const CliConfig& config, const Dataset& ds,
                                   const std::vector<Scheme>& schemes, Outcome& outcome) {
  const int n = ds.clients[0].signal.size();
  std::vector<CdfCell> out;
  for (Scheme scheme : schemes) {
    for (int requested : or_default(config.l_values, {36, 180, 324})) {
      if (requested < 0) throw std::invalid_argument("L values must be >= 0");
      const int L = std::min(requested, max_rank_bandwidth(n, 1));
      if (L != requested && scheme == schemes.front()) {
        outcome.notes.push_back(clamp_note(requested, L, n));
      }
      const auto sols = run_clients(ds.clients, L, 1, scheme, config.threads);
      const bool ok = std::all_of(sols.begin(), sols.end(), [](const auto& s) { return s.ok(); });
      if (!ok) {
        ++outcome.row_failures;
        out.push_back({scheme, L, std::nullopt});
      } else {
        out.push_back({scheme, L, server_view(sols, ds.clients, config.target).env_cdf});
      }
    }
  }
  return out;
}

void run_cdf(const CliConfig& config, const Dataset& ds, const fs::path& dir, Outcome& outcome,
             std::ostream& log) {
  const EmpiricalCdf actual = true_cdf(ds.clients, config.target);
  constexpr int kLevels = 200;
  for (const auto& cost : config.costs) {
    std::vector<Scheme> schemes{scheme_for_cost(cost)};
    if (schemes[0] != Scheme::kNaive) schemes.push_back(Scheme::kNaive);
    const auto cells = envelope_cdfs(config, ds, schemes, outcome);
    std::string csv = "series,L,level,value\n";
    for (int i = 1; i < kLevels; ++i) {
      const double level = static_cast<double>(i) / kLevels;
      csv += "Actual,," + format_double(level) + ',' + format_double(quantile(actual, level)) + '\n';
    }
    for (const auto& cell : cells) {
      for (int i = 1; i < kLevels; ++i) {
        const double level = static_cast<double>(i) / kLevels;
        csv += std::string(to_string(cell.scheme)) + ',' + std::to_string(cell.L) + ',' +
               format_double(level) + ',' +
               (cell.cdf ? format_double(quantile(*cell.cdf, level)) : std::string()) + '\n';
      }
    }
    const std::string name = "cdf_" + cost + ".csv";
    write_file(dir / name, csv);
    outcome.outputs.push_back(name);
    log << name << ": " << cells.size() + 1 << " curves\n";
  }
}

void run_quantiles(const CliConfig& config, const Dataset& ds, const fs::path& dir,
                   Outcome& outcome, std::ostream& log) {
  const EmpiricalCdf actual = true_cdf(ds.clients, config.target);
  for (const auto& cost : config.costs) {
    const Scheme scheme = scheme_for_cost(cost);
    const auto env = envelope_cdfs(config, ds, {scheme}, outcome);
    const auto naive = envelope_cdfs(config, ds, {Scheme::kNaive}, outcome);
    std::string csv = "quantile,actual,cost";
    for (const auto& c : env) csv += ",env_L" + std::to_string(c.L);
    for (const auto& c : naive) csv += ",naive_L" + std::to_string(c.L);
    csv += '\n';
    for (double q : kReportedQuantiles) {
      csv += format_double(q) + ',' + format_double(quantile(actual, q)) + ',' + cost;
      for (const auto* group : {&env, &naive}) {
        for (const auto& c : *group) {
          csv += ',' + (c.cdf ? format_double(quantile(*c.cdf, q)) : std::string());
        }
      }
      csv += '\n';
    }
    const std::string name = "quantiles_" + cost + ".csv";
    write_file(dir / name, csv);
    outcome.outputs.push_back(name);
    log << name << " written\n";
  }
}

void run_verify(const CliConfig& config, const fs::path& dir, Outcome& outcome, std::ostream& log) {
  const auto Ls = or_default(config.l_values, {5, 10, 20});
  const auto Ss = or_default(config.s_values, {1, 2, 4, 8});
  VerifyOptions opts;
  opts.threads = config.threads;
  std::string csv = "theorem,p,check,trial,seed,L,measured,lower,upper,slack,hard,ok\n";
  auto bound = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
  for (double p : config.p_values) {
    std::vector<VerificationReport> reports;
    try {
      reports.push_back(verify_theorem1(config.trials, p, Ls, config.seed, opts));
      reports.push_back(verify_theorem2(config.trials, p, Ls, std::nullopt, config.seed, opts));
      reports.push_back(verify_theorem3(config.trials, p, Ls, Ss, config.seed, opts));
    } catch (const std::runtime_error& e) {
      // A solver failure inside a trial.
      ++outcome.row_failures;
      outcome.notes.push_back(std::string("p=") + format_double(p) + ": " + e.what());
      continue;
    }
    for (const auto& r : reports) {
      const std::string name = "verify-bounds_" + r.theorem + "_p" + format_double(p) + ".json";
      write_file(dir / name, r.to_json() + "\n");
      outcome.outputs.push_back(name);
      log << name << ": " << r.checks.size() << " checks, " << r.hard_violations()
          << " hard violations\n";
      for (const auto& c : r.checks) {
        csv += r.theorem + ',' + format_double(p) + ',' + c.check + ',' + std::to_string(c.trial) +
               ',' + std::to_string(c.seed) + ',' + std::to_string(c.L) + ',' +
               format_double(c.measured) + ',' + bound(c.lower) + ',' + bound(c.upper) + ',' +
               bound(c.slack()) + ',' + (c.hard ? "1" : "0") + ',' + (c.ok ? "1" : "0") + '\n';
      }
    }
  }
  write_file(dir / "verify-bounds_checks.csv", csv);
  outcome.outputs.push_back("verify-bounds_checks.csv");
}

void run_synth(const CliConfig& config, const fs::path& dir, Outcome& outcome, std::ostream& log) {
  const auto readings = synthetic_readings(config.users, config.days, config.seed, 473352,
                                           config.gap_every);
  const std::string name = "synth_dataset.csv";
  try {
    write_csv((dir / name).string(), readings, config.columns);
  } catch (const IngestError& e) {
    throw Fatal(e.what());
  }
  outcome.outputs.push_back(name);
  log << name << ": " << readings.size() << " readings\n";
}

}  // namespace

std::string_view version() { return FEDENV_VERSION; }

std::string_view to_string(Subcommand sub) {
  switch (sub) {
    case Subcommand::kTradeoff: return "tradeoff";
    case Subcommand::kCdf: return "cdf";
    case Subcommand::kQuantiles: return "quantiles";
    case Subcommand::kSubsample: return "subsample";
    case Subcommand::kVerifyBounds: return "verify-bounds";
    case Subcommand::kSynth: return "synth";
  }
  return "unknown";
}

Subcommand subcommand_from_string(std::string_view name) {
  for (Subcommand s : kSubcommands) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown subcommand: " + std::string(name));
}

std::string CliConfig::to_json(int indent) const {
  ojson j;
  j["subcommand"] = fedenv::to_string(subcommand);
  j["dataset"] = dataset_path ? ojson(*dataset_path) : ojson(nullptr);
  j["out"] = output_dir;
  j["cost"] = join(costs);
  j["l-values"] = join(l_values);
  j["s-values"] = join(s_values);
  j["seed"] = seed;
  j["target"] = target == AnalyticsTarget::kPooledCdf ? "pooled" : "sum";
  j["ts-column"] = columns.timestamp;
  j["user-column"] = columns.user;
  j["value-column"] = columns.value;
  j["utc-offset-minutes"] = columns.utc_offset_minutes;
  j["delimiter"] = std::string(1, columns.delimiter);
  j["min-days"] = min_days;
  j["threads"] = threads;
  j["trials"] = trials;
  j["p-values"] = join(p_values);
  j["users"] = users;
  j["days"] = days;
  j["gap-every"] = gap_every;
  return j.dump(indent);
}

void apply_setting(CliConfig& c, std::string_view key, std::string_view value) {
  const std::string v(value);
  if (key == "dataset") {
    if (v.empty()) {
      c.dataset_path.reset();
    } else {
      c.dataset_path = v;
    }
  } else if (key == "out") {
    if (v.empty()) throw std::invalid_argument("--out must not be empty");
    c.output_dir = v;
  } else if (key == "cost") {
    std::vector<std::string> costs;
    for (const auto& t : split_list(v)) {
      if (t == "both") {
        costs.insert(costs.end(), {"l1", "l2"});
      } else if (t == "l1" || t == "l2" || t == "naive" || t == "mse") {
        costs.push_back(t);
      } else {
        throw std::invalid_argument("--cost: unknown cost '" + t + "' (l1, l2, both, naive, mse)");
      }
    }
    std::vector<std::string> unique;
    for (auto& t : costs) {
      if (std::find(unique.begin(), unique.end(), t) == unique.end()) unique.push_back(t);
    }
    c.costs = std::move(unique);
  } else if (key == "l-values") {
    c.l_values = v.empty() ? std::vector<int>{} : parse_list<int>(key, v);
  } else if (key == "s-values") {
    c.s_values = v.empty() ? std::vector<int>{} : parse_list<int>(key, v);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "target") {
    c.target = analytics_target_from_string(v);
  } else if (key == "ts-column") {
    c.columns.timestamp = v;
  } else if (key == "user-column") {
    c.columns.user = v;
  } else if (key == "value-column") {
    c.columns.value = v;
  } else if (key == "utc-offset-minutes") {
    c.columns.utc_offset_minutes = parse_number<int>(key, v);
  } else if (key == "delimiter") {
    if (v.size() != 1) throw std::invalid_argument("--delimiter must be one character");
    c.columns.delimiter = v[0];
  } else if (key == "min-days") {
    c.min_days = parse_number<int>(key, v);
  } else if (key == "threads") {
    c.threads = parse_number<int>(key, v);
  } else if (key == "trials") {
    c.trials = parse_number<int>(key, v);
  } else if (key == "p-values") {
    c.p_values = parse_list<double>(key, v);
  } else if (key == "users") {
    c.users = parse_number<int>(key, v);
  } else if (key == "days") {
    c.days = parse_number<int>(key, v);
  } else if (key == "gap-every") {
    c.gap_every = parse_number<int>(key, v);
  } else {
    throw std::invalid_argument("unknown setting '" + std::string(key) + "'");
  }
}

void apply_json_settings(CliConfig& config, std::string_view json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    throw std::invalid_argument(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  auto text_of = [](const ojson& v) -> std::string {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i].is_string() ? v[i].get<std::string>() : v[i].dump();
      }
      return out;
    }
    return v.dump();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "subcommand") {
      config.subcommand = subcommand_from_string(text_of(value));
    } else {
      apply_setting(config, key, text_of(value));
    }
  }
}

ParseResult parse_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Envelope approximations of client time series and their server analytics", "fedenv"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with settings; flags given here win");
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flags;
  const std::map<std::string_view, std::string_view> help{
      {"dataset", "hourly CSV with timestamp, user and W3 columns"},
      {"out", "output directory (default fedenv_out)"},
      {"cost", "comma list of l1, l2, both, naive, mse (default l1)"},
      {"l-values", "comma list of bandwidths L"},
      {"s-values", "comma list of subsampling strides S"},
      {"seed", "run seed (default 0)"},
      {"target", "pooled or sum: population of the CDFs (default pooled)"},
      {"ts-column", "timestamp column name (default timestamp)"},
      {"user-column", "user column name (default user_id)"},
      {"value-column", "energy column name (default W3)"},
      {"utc-offset-minutes", "fixed offset of the timestamps from UTC (default 0)"},
      {"delimiter", "CSV delimiter (default ,)"},
      {"min-days", "length of the synchronized window in days (default 30)"},
      {"threads", "solver threads, 0 = all cores (default 0)"},
      {"trials", "verify-bounds trials (default 50)"},
      {"p-values", "verify-bounds decay exponents (default 2)"},
      {"users", "synth: number of users (default 39)"},
      {"days", "synth: days of data (default 31)"},
      {"gap-every", "synth: users with index divisible by this get a gap (default 20)"}};
  for (auto key : kKeys) {
    const std::string k(key);
    flags[k] = app.add_option("--" + k, flag_values[k], std::string(help.at(key)));
  }
  const std::map<Subcommand, std::string> about{
      {Subcommand::kTradeoff, "RMS, Wasserstein and communication cost against L"},
      {Subcommand::kCdf, "quantile curves of the actual, envelope and naive CDFs"},
      {Subcommand::kQuantiles, "10/50/90% quantiles: actual, envelope and naive per L"},
      {Subcommand::kSubsample, "metrics over the (S, L) grid of subsampled constraints"},
      {Subcommand::kVerifyBounds, "check the approximation and CDF bounds on synthetic signals"},
      {Subcommand::kSynth, "write a synthetic hourly dataset"}};
  for (Subcommand s : kSubcommands) {
    app.add_subcommand(std::string(to_string(s)), about.at(s))->fallthrough();
  }
  app.fallthrough();
  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return {std::nullopt, 0};
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return {std::nullopt, 0};
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return {std::nullopt, 2};
  }

  CliConfig config;
  bool have_subcommand = false;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw std::invalid_argument("cannot read config file " + config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      const auto j = ojson::parse(buf.str(), nullptr, false);
      have_subcommand = j.is_object() && j.contains("subcommand");
      apply_json_settings(config, buf.str());
    }
    for (auto key : kKeys) {
      const std::string k(key);
      if (flags[k]->count() > 0) apply_setting(config, k, flag_values[k]);
    }
    const auto subs = app.get_subcommands();
    if (!subs.empty()) {
      config.subcommand = subcommand_from_string(subs.front()->get_name());
      have_subcommand = true;
    }
    if (!have_subcommand) throw std::invalid_argument("a subcommand is required\n" + app.help());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return {std::nullopt, 2};
  }
  return {config, std::nullopt};
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open dataset: " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

int run(const CliConfig& config, std::ostream& log) {
  const fs::path dir(config.output_dir);
  Outcome outcome;
  ojson dataset_info = nullptr;
  int code = 0;
  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Fatal("cannot create output directory " + dir.string());
    switch (config.subcommand) {
      case Subcommand::kVerifyBounds:
        run_verify(config, dir, outcome, log);
        break;
      case Subcommand::kSynth:
        run_synth(config, dir, outcome, log);
        break;
      default: {
        const Dataset ds = load_dataset(config, log);
        dataset_info = ds.manifest;
        switch (config.subcommand) {
          case Subcommand::kTradeoff: run_rows(config, ds, false, dir, outcome, log); break;
          case Subcommand::kSubsample: run_rows(config, ds, true, dir, outcome, log); break;
          case Subcommand::kCdf: run_cdf(config, ds, dir, outcome, log); break;
          default: run_quantiles(config, ds, dir, outcome, log); break;
        }
      }
    }
    code = outcome.row_failures > 0 ? 1 : 0;
  } catch (const Fatal& e) {
    log << "fatal: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    log << "fatal: " << e.what() << '\n';
    return 2;
  }

  ojson manifest;
  manifest["tool"] = "fedenv";
  manifest["version"] = version();
  manifest["subcommand"] = to_string(config.subcommand);
  manifest["config"] = ojson::parse(config.to_json());
  manifest["seed"] = config.seed;
  manifest["dataset"] = dataset_info;
  manifest["outputs"] = outcome.outputs;
  manifest["notes"] = outcome.notes;
  manifest["row_failures"] = outcome.row_failures;
  manifest["exit_code"] = code;
  try {
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const Fatal& e) {
    log << "fatal: " << e.what() << '\n';
    return 2;
  }
  return code;
}

}  // namespace fedenv
