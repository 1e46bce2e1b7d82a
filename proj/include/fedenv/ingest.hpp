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


#ifndef FEDENV_INGEST_HPP_
#define FEDENV_INGEST_HPP_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fedenv/signal.hpp"

namespace fedenv {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One hourly reading. `hour` counts hours since 1970-01-01T00:00Z.
struct RawReading {
  std::int64_t hour = 0;
  std::string user_id;
  double w3_energy = 0.0;  // watt-hours

  bool operator==(const RawReading&) const = default;
};

// Column names in the CSV header and the fixed timezone of its timestamps.
struct ColumnMap {
  std::string timestamp = "timestamp";
  std::string user = "user_id";
  std::string value = "W3";
  // Local time = UTC + offset; no DST rules are applied.
  int utc_offset_minutes = 0;
  char delimiter = ',';
};

struct LoadResult {
  std::vector<RawReading> readings;
  int skipped = 0;
  // "line N: reason" for the first few skipped rows.
  std::vector<std::string> skip_examples;
};

// Parses "YYYY-MM-DD HH:MM[:SS]" (also with 'T' or a trailing 'Z', or '/' as
// the date separator) and returns the UTC hour, truncating minutes. Returns
// false on malformed input.
bool parse_timestamp(std::string_view text, int utc_offset_minutes, std::int64_t& hour);

// "YYYY-MM-DD HH:MM" in the local time of the given offset.
std::string format_hour(std::int64_t hour, int utc_offset_minutes = 0);

// Reads a headered CSV. Rows with an unparseable timestamp, an empty user, or
// a value that is not a finite number >= 0 are skipped and counted. Throws
// IngestError when the file cannot be read, a mapped column is missing, or no
// row parses.
LoadResult load_csv(const std::string& path, const ColumnMap& columns = {});

struct SynchronizedUsers {
  std::int64_t window_start_hour = 0;
  int n = 0;
  std::map<std::string, SampledSignal> signals;
};

// Keeps the users that have every hour of a common window of min_days * 24
// hours. The window maximizes the number of such users; ties go to the
// earliest start. Duplicate readings for one user and hour keep the first.
// Throws std::invalid_argument if min_days < 1 and IngestError when no user
// covers any full window.
SynchronizedUsers filter_synchronized(const std::vector<RawReading>& readings, int min_days);

// Writes readings in the layout load_csv reads with the same ColumnMap.
void write_csv(const std::string& path, const std::vector<RawReading>& readings,
               const ColumnMap& columns = {});

// Hourly energy-like readings for `users` users over `days` days from
// `start_hour`: a daily load curve with per-user scale, noise and occasional
// spikes, all >= 0. Users whose index is a multiple of `gap_every` (when > 0)
// get a one-hour gap in the middle of the span.
std::vector<RawReading> synthetic_readings(int users, int days, std::uint64_t seed,
                                           std::int64_t start_hour = 473352,
                                           int gap_every = 0);

}  // namespace fedenv

#endif  // FEDENV_INGEST_HPP_
