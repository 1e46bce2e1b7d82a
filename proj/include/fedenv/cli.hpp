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


#ifndef FEDENV_CLI_HPP_
#define FEDENV_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedenv/fedsim.hpp"
#include "fedenv/ingest.hpp"

namespace fedenv {

std::string_view version();

enum class Subcommand { kTradeoff, kCdf, kQuantiles, kSubsample, kVerifyBounds, kSynth };

std::string_view to_string(Subcommand sub);
// Throws std::invalid_argument for an unknown name.
Subcommand subcommand_from_string(std::string_view name);

struct CliConfig {
  Subcommand subcommand = Subcommand::kTradeoff;
  std::optional<std::string> dataset_path;
  std::string output_dir = "fedenv_out";
  // Tokens l1, l2, naive, mse; "both" expands to l1,l2 while parsing.
  std::vector<std::string> costs{"l1"};
  // Empty lists take the subcommand defaults.
  std::vector<int> l_values;
  std::vector<int> s_values;
  std::uint64_t seed = 0;
  AnalyticsTarget target = AnalyticsTarget::kPooledCdf;
  ColumnMap columns;
  int min_days = 30;
  int threads = 0;
  // verify-bounds
  int trials = 50;
  std::vector<double> p_values{2.0};
  // synth
  int users = 39;
  int days = 31;
  int gap_every = 20;

  // Every field under the key used by --config, so the echo can be replayed.
  std::string to_json(int indent = 2) const;
};

// Sets one field from its flag name (without dashes) and a text value; lists
// are comma separated. Throws std::invalid_argument on a bad key or value.
void apply_setting(CliConfig& config, std::string_view key, std::string_view value);

// Applies a JSON object of settings (values may be strings, numbers or arrays).
// A "subcommand" key is honoured as well.
void apply_json_settings(CliConfig& config, std::string_view json_text);

struct ParseResult {
  std::optional<CliConfig> config;
  // Set when parsing already decided the outcome (help, usage error).
  std::optional<int> exit_code;
};

// Precedence: defaults, then the --config file, then flags on the command
// line. Usage errors print to `err` and yield exit code 2; --help yields 0.
ParseResult parse_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Runs one subcommand and writes its outputs plus manifest.json into
// output_dir. Returns 0 on success, 1 if some rows failed (files are still
// written) and 2 on fatal errors.
int run(const CliConfig& config, std::ostream& log);

// Lower-case hex SHA-256 of a file's bytes. Throws IngestError if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace fedenv

#endif  // FEDENV_CLI_HPP_
