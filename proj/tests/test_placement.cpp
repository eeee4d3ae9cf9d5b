/* Copyright 2026 The wavepipe Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "wavepipe/placement.hpp"

#include <vector>

#include "doctest.h"

using namespace wavepipe;

namespace {

std::vector<int> slice_indices(const StagePlacement& p, int device) {
  std::vector<int> out;
  for (const StageSlice& s : p.assignment[device]) out.push_back(s.index);
  return out;
}

}  // namespace

TEST_SUITE("placement") {

TEST_CASE("classic schemes map device p to slice p") {
  for (Scheme s : {Scheme::GPipe, Scheme::Dapple}) {
    ScheduleConfig cfg = make_config(s, 4, 4);
    StagePlacement p = make_placement(cfg);
    REQUIRE(p.device_count() == 4);
    for (int d = 0; d < 4; ++d) {
      REQUIRE(p.assignment[d].size() == 1);
      CHECK(p.assignment[d][0].index == d);
      CHECK(p.assignment[d][0].fraction == Rational(1));
      CHECK(p.assignment[d][0].direction == Direction::Down);
    }
  }
}

TEST_CASE("bidirectional placement holds one slice per direction") {
  ScheduleConfig cfg = make_config(Scheme::Chimera, 4, 4);
  StagePlacement p = make_placement(cfg);
  for (int d = 0; d < 4; ++d) {
    REQUIRE(p.assignment[d].size() == 2);
    CHECK(p.assignment[d][0].index == d);
    CHECK(p.assignment[d][0].direction == Direction::Down);
    CHECK(p.assignment[d][1].index == 3 - d);
    CHECK(p.assignment[d][1].direction == Direction::Up);
    CHECK(p.assignment[d][0].fraction == Rational(1));
  }
}

TEST_CASE("wave placement, one wave") {
  ScheduleConfig cfg = make_config(Scheme::Hanayo, 4, 4, 1);
  StagePlacement p = make_placement(cfg);
  CHECK(slice_indices(p, 0) == std::vector<int>{0, 7});
  CHECK(slice_indices(p, 1) == std::vector<int>{1, 6});
  CHECK(slice_indices(p, 2) == std::vector<int>{2, 5});
  CHECK(slice_indices(p, 3) == std::vector<int>{3, 4});
  for (int d = 0; d < 4; ++d) {
    for (const StageSlice& s : p.assignment[d]) {
      CHECK(s.fraction == Rational(1, 2));
    }
    CHECK(p.assignment[d][0].direction == Direction::Down);
    CHECK(p.assignment[d][1].direction == Direction::Up);
  }
}

TEST_CASE("wave placement, two waves") {
  ScheduleConfig cfg = make_config(Scheme::Hanayo, 4, 4, 2);
  StagePlacement p = make_placement(cfg);
  CHECK(slice_indices(p, 0) == std::vector<int>{0, 7, 8, 15});
  CHECK(slice_indices(p, 1) == std::vector<int>{1, 6, 9, 14});
  CHECK(slice_indices(p, 2) == std::vector<int>{2, 5, 10, 13});
  CHECK(slice_indices(p, 3) == std::vector<int>{3, 4, 11, 12});
  for (int d = 0; d < 4; ++d) {
    for (const StageSlice& s : p.assignment[d]) {
      CHECK(s.fraction == Rational(1, 4));
    }
  }
}

TEST_CASE("wave placement, two devices") {
  ScheduleConfig cfg = make_config(Scheme::Hanayo, 2, 2, 1);
  StagePlacement p = make_placement(cfg);
  CHECK(slice_indices(p, 0) == std::vector<int>{0, 3});
  CHECK(slice_indices(p, 1) == std::vector<int>{1, 2});
}

TEST_CASE("chimera-wave reuses the wave placement") {
  ScheduleConfig cfg = make_config(Scheme::ChimeraWave, 2, 2, 1, 2);
  StagePlacement p = make_placement(cfg);
  CHECK(slice_indices(p, 0) == std::vector<int>{0, 3});
  CHECK(slice_indices(p, 1) == std::vector<int>{1, 2});
  CHECK(p.assignment[0][0].fraction == Rational(1, 2));
}

TEST_CASE("slice ownership follows microbatch direction") {
  ScheduleConfig cfg = make_config(Scheme::Chimera, 4, 4);
  StagePlacement p = make_placement(cfg);
  CHECK(slice_owner(cfg, p, 0, Direction::Down).device == 0);
  CHECK(slice_owner(cfg, p, 0, Direction::Up).device == 3);
  CHECK(slice_owner(cfg, p, 3, Direction::Down).device == 3);
  CHECK(slice_owner(cfg, p, 3, Direction::Up).device == 0);
  CHECK(slice_owner(cfg, p, 1, Direction::Up).local_rank == 1);

  ScheduleConfig h = make_config(Scheme::Hanayo, 4, 4, 2);
  StagePlacement hp = make_placement(h);
  CHECK(slice_owner(h, hp, 5, Direction::Down).device == 2);
  CHECK(slice_owner(h, hp, 11, Direction::Down).device == 3);
  CHECK(slice_owner(h, hp, 15, Direction::Down).device == 0);
  CHECK(slice_owner(h, hp, 15, Direction::Down).local_rank == 3);
}

TEST_CASE("microbatch direction split") {
  ScheduleConfig cfg = make_config(Scheme::Chimera, 4, 4);
  CHECK(microbatch_direction(cfg, 0) == Direction::Down);
  CHECK(microbatch_direction(cfg, 1) == Direction::Down);
  CHECK(microbatch_direction(cfg, 2) == Direction::Up);
  CHECK(microbatch_direction(cfg, 3) == Direction::Up);
  ScheduleConfig g = make_config(Scheme::GPipe, 4, 4);
  CHECK(microbatch_direction(g, 3) == Direction::Down);
}

TEST_CASE("bidirectional-to-wave transformation") {
  ScheduleConfig cfg = make_config(Scheme::Chimera, 4, 4);
  auto [wave_cfg, wave_placement] = transform_chimera_to_wave(cfg);
  CHECK(wave_cfg.scheme == Scheme::Hanayo);
  CHECK(wave_cfg.devices == 2);
  CHECK(wave_cfg.microbatches == 2);
  CHECK(wave_cfg.waves == 1);
  CHECK(wave_cfg.replicas == 2);
  CHECK(wave_cfg.stages == 4);
  CHECK(slice_indices(wave_placement, 0) == std::vector<int>{0, 3});
  CHECK(slice_indices(wave_placement, 1) == std::vector<int>{1, 2});

  ScheduleConfig g = make_config(Scheme::GPipe, 4, 4);
  CHECK_THROWS_AS(transform_chimera_to_wave(g), ConfigError);
}

}  // TEST_SUITE
