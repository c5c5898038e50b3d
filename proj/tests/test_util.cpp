// Copyright 2026 The Stampede Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <atomic>
#include <numeric>

#include "stampede/util/config.hpp"
#include "stampede/util/csv.hpp"
#include "stampede/util/rng.hpp"
#include "stampede/util/threading.hpp"

using namespace stampede::util;

TEST_CASE("config parses sections and round-trips") {
  const std::string text =
      "task = ant\n"
      "agents = 64   # comment\n"
      "\n"
      "[ppo]\n"
      "epochs = 20\n"
      "gamma = 0.99\n";
  ConfigFile cfg = ConfigFile::parse_text(text);
  CHECK(cfg.get_raw("", "task") == "ant");
  CHECK(cfg.get_raw("ppo", "epochs") == "20");

  ConfigFile again = ConfigFile::parse_text(cfg.serialize());
  CHECK(again.serialize() == cfg.serialize());
  CHECK(again.get_raw("ppo", "gamma") == "0.99");
}

TEST_CASE("config binder rejects unknown keys") {
  ConfigFile cfg = ConfigFile::parse_text("task = ant\nbogus = 1\n");
  ConfigBinder binder(cfg);
  CHECK(binder.get_string("", "task", "x") == "ant");
  CHECK_THROWS_AS(binder.finish(), std::invalid_argument);

  ConfigFile clean = ConfigFile::parse_text("task = ant\n");
  ConfigBinder ok(clean);
  ok.get_string("", "task", "x");
  CHECK_NOTHROW(ok.finish());
}

TEST_CASE("config binder parses typed values") {
  ConfigFile cfg = ConfigFile::parse_text("a = 1.5\nb = 7\nc = true\nd = 1,2.5,3\n");
  ConfigBinder binder(cfg);
  CHECK(binder.get_double("", "a", 0) == doctest::Approx(1.5));
  CHECK(binder.get_int("", "b", 0) == 7);
  CHECK(binder.get_bool("", "c", false));
  auto d = binder.get_doubles("", "d", {});
  REQUIRE(d.size() == 3);
  CHECK(d[1] == doctest::Approx(2.5));
  CHECK(binder.get_int("", "missing", 42) == 42);
  CHECK_NOTHROW(binder.finish());
}

TEST_CASE("derived seeds differ per tag and engines round-trip") {
  CHECK(derive_seed(7, 1, 2) != derive_seed(7, 1, 3));
  CHECK(derive_seed(7, 1, 2) != derive_seed(8, 1, 2));

  std::mt19937_64 eng(123);
  (void)uniform(eng, 0, 1);
  std::string state = save_engine(eng);
  double next = uniform(eng, 0, 1);
  std::mt19937_64 restored;
  load_engine(restored, state);
  CHECK(uniform(restored, 0, 1) == next);
}

TEST_CASE("parallel_for covers the range exactly once") {
  ThreadPool pool(4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(&pool, 1000, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) hits[i].fetch_add(1);
  });
  for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("csv format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, -0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
