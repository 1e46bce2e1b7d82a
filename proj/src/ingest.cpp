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


#include "fedenv/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace fedenv {

namespace {

constexpr int kMaxSkipExamples = 10;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits one CSV record; double quotes group delimiters and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delim) {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.emplace_back(trim(field));
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

bool parse_timestamp(std::string_view text, int utc_offset_minutes, std::int64_t& hour) {
  text = trim(text);
  if (!text.empty() && (text.back() == 'Z' || text.back() == 'z')) text.remove_suffix(1);
  // YYYY-MM-DD?HH:MM[:SS]
  if (text.size() != 16 && text.size() != 19) return false;
  const char sep = text[4];
  if ((sep != '-' && sep != '/') || text[7] != sep) return false;
  if (text[10] != ' ' && text[10] != 'T') return false;
  if (text[13] != ':' || (text.size() == 19 && text[16] != ':')) return false;
  int y, mo, d, h, mi, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), h) ||
      !parse_int(text.substr(14, 2), mi)) {
    return false;
  }
  if (text.size() == 19 && !parse_int(text.substr(17, 2), s)) return false;
  if (h > 23 || mi > 59 || s > 60) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  const std::int64_t days = std::chrono::sys_days(ymd).time_since_epoch().count();
  const std::int64_t minutes = days * 1440 + h * 60 + mi - utc_offset_minutes;
  // Floor division keeps pre-1970 timestamps on the right hour.
  hour = minutes >= 0 ? minutes / 60 : -((-minutes + 59) / 60);
  return true;
}

std::string format_hour(std::int64_t hour, int utc_offset_minutes) {
  const std::int64_t minutes = hour * 60 + utc_offset_minutes;
  const std::int64_t day = minutes >= 0 ? minutes / 1440 : -((-minutes + 1439) / 1440);
  const int in_day = static_cast<int>(minutes - day * 1440);
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                in_day / 60, in_day % 60);
  return buf;
}

LoadResult load_csv(const std::string& path, const ColumnMap& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError("dataset is empty: " + path);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_record(line, columns.delimiter);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IngestError("dataset has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ts_col = column(columns.timestamp);
  const std::size_t user_col = column(columns.user);
  const std::size_t value_col = column(columns.value);
  const std::size_t needed = std::max({ts_col, user_col, value_col}) + 1;

  LoadResult result;
  auto skip = [&](int line_no, const std::string& why) {
    ++result.skipped;
    if (static_cast<int>(result.skip_examples.size()) < kMaxSkipExamples) {
      result.skip_examples.push_back("line " + std::to_string(line_no) + ": " + why);
    }
  };
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_record(line, columns.delimiter);
    if (fields.size() < needed) {
      skip(line_no, "too few fields");
      continue;
    }
    RawReading r;
    if (!parse_timestamp(fields[ts_col], columns.utc_offset_minutes, r.hour)) {
      skip(line_no, "bad timestamp '" + fields[ts_col] + "'");
      continue;
    }
    r.user_id = fields[user_col];
    if (r.user_id.empty()) {
      skip(line_no, "empty user id");
      continue;
    }
    if (!parse_double(fields[value_col], r.w3_energy) || !std::isfinite(r.w3_energy) ||
        r.w3_energy < 0.0) {
      skip(line_no, "bad energy value '" + fields[value_col] + "'");
      continue;
    }
    result.readings.push_back(std::move(r));
  }
  if (result.readings.empty()) throw IngestError("no parseable rows in " + path);
  return result;
}

SynchronizedUsers filter_synchronized(const std::vector<RawReading>& readings, int min_days) {
  if (min_days < 1) throw std::invalid_argument("min_days must be >= 1");
  const std::int64_t width = static_cast<std::int64_t>(min_days) * 24;

  // user -> hour -> first value seen
  std::map<std::string, std::map<std::int64_t, double>> by_user;
  for (const auto& r : readings) by_user[r.user_id].try_emplace(r.hour, r.w3_energy);

  // Each run of consecutive hours admits window starts [run_start, run_end - width + 1].
  struct Span {
    std::int64_t first, last;
    const std::string* user;
  };
  std::vector<Span> spans;
  for (const auto& [user, hours] : by_user) {
    auto it = hours.begin();
    while (it != hours.end()) {
      const std::int64_t start = it->first;
      std::int64_t end = start;
      for (++it; it != hours.end() && it->first == end + 1; ++it) end = it->first;
      if (end - start + 1 >= width) spans.push_back({start, end - width + 1, &user});
    }
  }
  if (spans.empty()) throw IngestError("no user covers a full synchronized window");

  // Sweep interval endpoints; openings sort before closings at the same hour.
  std::vector<std::pair<std::int64_t, int>> events;
  for (const auto& s : spans) {
    events.emplace_back(s.first, +1);
    events.emplace_back(s.last + 1, -1);
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  });
  int live = 0, best = 0;
  std::int64_t best_start = 0;
  for (std::size_t i = 0; i < events.size();) {
    const std::int64_t at = events[i].first;
    for (; i < events.size() && events[i].first == at; ++i) live += events[i].second;
    if (live > best) {
      best = live;
      best_start = at;
    }
  }

  SynchronizedUsers out;
  out.window_start_hour = best_start;
  out.n = static_cast<int>(width);
  for (const auto& s : spans) {
    if (s.first > best_start || s.last < best_start) continue;
    const auto& hours = by_user.at(*s.user);
    std::vector<double> values;
    values.reserve(width);
    for (auto it = hours.find(best_start); values.size() < static_cast<std::size_t>(width); ++it) {
      values.push_back(it->second);
    }
    out.signals.emplace(*s.user, SampledSignal(std::move(values)));
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<RawReading>& readings,
               const ColumnMap& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write " + path);
  const char d = columns.delimiter;
  out << columns.timestamp << d << columns.user << d << columns.value << '\n';
  char buf[64];
  for (const auto& r : readings) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r.w3_energy);
    out << format_hour(r.hour, columns.utc_offset_minutes) << d << r.user_id << d
        << std::string_view(buf, end - buf) << '\n';
  }
  if (!out) throw IngestError("failed writing " + path);
}

std::vector<RawReading> synthetic_readings(int users, int days, std::uint64_t seed,
                                           std::int64_t start_hour, int gap_every) {
  if (users < 1 || days < 1) throw std::invalid_argument("need users >= 1 and days >= 1");
  Rng rng(seed);
  std::vector<RawReading> out;
  const int hours = days * 24;
  out.reserve(static_cast<std::size_t>(users) * hours);
  for (int u = 0; u < users; ++u) {
    char id[16];
    std::snprintf(id, sizeof id, "user%03d", u + 1);
    const double scale = 50.0 + 450.0 * rng.uniform();
    const double phase = rng.uniform(-2.0, 2.0);
    const bool gap = gap_every > 0 && u % gap_every == 0;
    for (int h = 0; h < hours; ++h) {
      const double daily = 0.6 * std::cos(2.0 * std::numbers::pi * (h % 24 - 19 - phase) / 24.0);
      double w = scale * (1.0 + daily) * (0.7 + 0.6 * rng.uniform());
      if (rng.uniform() < 0.02) w += 4.0 * scale * rng.uniform();
      if (rng.uniform() < 0.05) w = 0.0;
      if (gap && h == hours / 2) continue;
      out.push_back({start_hour + h, id, std::round(w * 100.0) / 100.0});
    }
  }
  return out;
}

}  // namespace fedenv
