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


#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "doctest.h"
#include "fedenv/ingest.hpp"

using namespace fedenv;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("fedenv_ingest_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv");
    std::ofstream(path, std::ios::binary) << contents;
  }
  ~TempFile() { fs::remove(path); }
  std::string str() const { return path.string(); }
};

std::vector<RawReading> hours_for(const std::string& user, std::int64_t start, int count,
                                  double value = 1.0) {
  std::vector<RawReading> out;
  for (int h = 0; h < count; ++h) out.push_back({start + h, user, value + h});
  return out;
}

}  // namespace

TEST_CASE("parse_timestamp") {
  std::int64_t h = 0;
  REQUIRE(parse_timestamp("1970-01-01 00:00", 0, h));
  CHECK(h == 0);
  REQUIRE(parse_timestamp("2024-01-01T05:59:59Z", 0, h));
  CHECK(h == 473352 + 5);
  REQUIRE(parse_timestamp("2024/01/01 05:00", 120, h));
  CHECK(h == 473352 + 3);
  REQUIRE(parse_timestamp("1969-12-31 23:30", 0, h));
  CHECK(h == -1);
  CHECK_FALSE(parse_timestamp("2024-02-30 00:00", 0, h));
  CHECK_FALSE(parse_timestamp("2024-01-01 24:00", 0, h));
  CHECK_FALSE(parse_timestamp("yesterday", 0, h));
  CHECK_FALSE(parse_timestamp("2024-01-01", 0, h));

  for (int offset : {0, 60, -300, 330}) {
    for (std::int64_t hour : {std::int64_t{0}, std::int64_t{473352}, std::int64_t{-50}}) {
      REQUIRE(parse_timestamp(format_hour(hour, offset), offset, h));
      CHECK(h == hour);
    }
  }
}

TEST_CASE("load_csv") {
  SUBCASE("well formed") {
    TempFile f("timestamp,user_id,W1,W3\n"
               "2024-01-01 00:00,a,9,1.5\n"
               "2024-01-01 01:00,a,9,2\n"
               "\"2024-01-01 00:00\",\"b, jr\",9,0\n");
    const auto r = load_csv(f.str());
    REQUIRE(r.readings.size() == 3);
    CHECK(r.skipped == 0);
    CHECK(r.readings[1] == RawReading{473353, "a", 2.0});
    CHECK(r.readings[2].user_id == "b, jr");
  }
  SUBCASE("malformed rows are skipped and reported") {
    TempFile f("timestamp,user_id,W3\r\n"
               "2024-01-01 00:00,a,1\r\n"
               "not a time,a,2\r\n"
               "2024-01-01 02:00,a,3\r\n");
    const auto r = load_csv(f.str());
    CHECK(r.readings.size() == 2);
    CHECK(r.skipped == 1);
    REQUIRE(r.skip_examples.size() == 1);
    CHECK(r.skip_examples[0].find("line 3") == 0);
  }
  SUBCASE("negative and non-numeric values") {
    TempFile f("timestamp,user_id,W3\n2024-01-01 00:00,a,-1\n2024-01-01 00:00,a,x\n"
               "2024-01-01 00:00,a,nan\n2024-01-01 00:00,,1\n2024-01-01 00:00,a,1e2\n");
    const auto r = load_csv(f.str());
    CHECK(r.readings.size() == 1);
    CHECK(r.readings[0].w3_energy == 100.0);
    CHECK(r.skipped == 4);
  }
  SUBCASE("custom column map") {
    TempFile f("when;who;kwh\n2024-01-01 03:00;u;4\n");
    ColumnMap cm{"when", "who", "kwh", 60, ';'};
    const auto r = load_csv(f.str(), cm);
    REQUIRE(r.readings.size() == 1);
    CHECK(r.readings[0].hour == 473352 + 2);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(load_csv("/nonexistent/dir/file.csv"), IngestError);
    TempFile missing("timestamp,user,W3\n2024-01-01 00:00,a,1\n");
    CHECK_THROWS_AS(load_csv(missing.str()), IngestError);
    TempFile none("timestamp,user_id,W3\nbad,a,1\n");
    CHECK_THROWS_AS(load_csv(none.str()), IngestError);
  }
}

TEST_CASE("filter_synchronized") {
  SUBCASE("two fully overlapping users") {
    auto r = hours_for("a", 1000, 720);
    const auto b = hours_for("b", 1000, 720, 5.0);
    r.insert(r.end(), b.begin(), b.end());
    const auto out = filter_synchronized(r, 30);
    CHECK(out.n == 720);
    CHECK(out.window_start_hour == 1000);
    REQUIRE(out.signals.size() == 2);
    CHECK(out.signals.at("a").size() == 720);
    CHECK(out.signals.at("b")[3] == 8.0);
  }
  SUBCASE("a one-hour gap drops the user") {
    auto r = hours_for("a", 0, 48);
    auto c = hours_for("c", 0, 48);
    c.erase(c.begin() + 20);
    r.insert(r.end(), c.begin(), c.end());
    const auto out = filter_synchronized(r, 2);
    CHECK(out.signals.size() == 1);
    CHECK(out.signals.count("a") == 1);
  }
  SUBCASE("window maximizes the user count, earliest on ties") {
    std::vector<RawReading> r;
    for (const auto& [u, s] : std::vector<std::pair<std::string, int>>{
             {"early", 0}, {"mid1", 30}, {"mid2", 36}, {"late", 100}}) {
      const auto h = hours_for(u, s, 48);
      r.insert(r.end(), h.begin(), h.end());
    }
    // Valid 24 h starts: early 0..24, mid1 30..54, mid2 36..60, late 100..124.
    // Two users share starts 36..54; the earliest of those wins.
    const auto out = filter_synchronized(r, 1);
    CHECK(out.window_start_hour == 36);
    CHECK(out.signals.size() == 2);

    const auto single = filter_synchronized(hours_for("x", 5, 30), 1);
    CHECK(single.window_start_hour == 5);
  }
  SUBCASE("duplicates keep the first") {
    auto r = hours_for("a", 0, 24);
    r.push_back({3, "a", 99.0});
    const auto out = filter_synchronized(r, 1);
    CHECK(out.signals.at("a")[3] == 4.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(filter_synchronized(hours_for("a", 0, 10), 1), IngestError);
    CHECK_THROWS_AS(filter_synchronized(hours_for("a", 0, 10), 0), std::invalid_argument);
  }
}

TEST_CASE("synthetic dataset round trip") {
  const auto readings = synthetic_readings(6, 31, 17, 473352, 3);
  for (const auto& r : readings) CHECK(r.w3_energy >= 0.0);
  CHECK(synthetic_readings(6, 31, 17, 473352, 3) == readings);

  TempFile f("");
  write_csv(f.str(), readings);
  const auto loaded = load_csv(f.str());
  CHECK(loaded.skipped == 0);
  CHECK(loaded.readings == readings);

  const auto sync = filter_synchronized(loaded.readings, 30);
  // Users 1 and 4 (indices 0 and 3) carry a mid-span gap.
  CHECK(sync.signals.size() == 4);
  CHECK(sync.signals.count("user001") == 0);
  CHECK(sync.signals.count("user004") == 0);
  for (const auto& [id, sig] : sync.signals) {
    CHECK(sig.size() == 720);
    for (double v : sig.values()) CHECK(v >= 0.0);
  }
  const auto again = filter_synchronized(load_csv(f.str()).readings, 30);
  CHECK(again.signals == sync.signals);
}
