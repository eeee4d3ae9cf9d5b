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

#include "wavepipe/rational.hpp"

#include "doctest.h"

using wavepipe::Rational;

TEST_SUITE("rational") {

TEST_CASE("construction normalizes sign and gcd") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(-1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(0, -7).den() == 1);
  CHECK(Rational(6, 3).num() == 2);
  CHECK(Rational(6, 3).den() == 1);
}

TEST_CASE("arithmetic") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(2, 3) / Rational(4, 9) == Rational(3, 2));
  CHECK(-Rational(1, 2) == Rational(-1, 2));
  Rational acc(0);
  for (int i = 0; i < 8; ++i) acc += Rational(1, 8);
  CHECK(acc == Rational(1));
}

TEST_CASE("comparisons") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(2, 4) <= Rational(1, 2));
  CHECK(Rational(3, 2) > Rational(1));
  CHECK(Rational(7, 7) >= Rational(1));
  CHECK(Rational(1, 3) != Rational(2, 3));
}

TEST_CASE("rendering") {
  CHECK(Rational(3, 4).to_string() == "3/4");
  CHECK(Rational(6, 2).to_string() == "3");
  CHECK(Rational(-1, 2).to_string() == "-1/2");
  CHECK(Rational(0).to_string() == "0");
  CHECK(Rational(1, 4).to_double() == doctest::Approx(0.25));
}

TEST_CASE("sum of slice fractions is exact") {
  // 2W slices of fraction 1/(2W) must sum to exactly one model share.
  for (int w = 1; w <= 8; ++w) {
    Rational total(0);
    for (int i = 0; i < 2 * w; ++i) total += Rational(1, 2 * w);
    CHECK(total == Rational(1));
  }
}

}  // TEST_SUITE
