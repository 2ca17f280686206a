// Copyright 2026 The zanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zanon/popularity.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "zanon/model.h"
#include "zanon/observation.h"
#include "zanon/simulator.h"

namespace zanon {
namespace {

TEST(PowerLawRatesTest, FollowsInverseRankLaw) {
  const RatePopularity popularity = PowerLawRates(100, 0.05);
  ASSERT_EQ(popularity.values.size(), 100u);
  EXPECT_EQ(popularity.kind, RatePopularity::Kind::kRates);
  EXPECT_TRUE(popularity.labels.empty());
  for (size_t i = 0; i < popularity.values.size(); ++i) {
    EXPECT_DOUBLE_EQ(popularity.values[i], 0.05 / static_cast<double>(i + 1));
  }
  EXPECT_NO_THROW(popularity.Validate());
}

TEST(PowerLawRatesTest, RejectsInvalidArguments) {
  EXPECT_THROW(PowerLawRates(0, 0.05), std::invalid_argument);
  EXPECT_THROW(PowerLawRates(10, 0.0), std::invalid_argument);
  EXPECT_THROW(PowerLawRates(10, -1.0), std::invalid_argument);
  EXPECT_THROW(PowerLawRates(10, std::nan("")), std::invalid_argument);
}

TEST(RatePopularityTest, ValidateEnforcesShape) {
  RatePopularity popularity;
  popularity.kind = RatePopularity::Kind::kRates;
  popularity.values = {3.0, 2.0, 2.0, 0.5};
  EXPECT_NO_THROW(popularity.Validate());

  popularity.values = {1.0, 2.0};
  EXPECT_THROW(popularity.Validate(), std::invalid_argument);

  popularity.values = {1.0, -0.5};
  EXPECT_THROW(popularity.Validate(), std::invalid_argument);

  popularity.values = {std::nan("")};
  EXPECT_THROW(popularity.Validate(), std::invalid_argument);

  // Rates above 1 are legal; exposure probabilities are not.
  popularity.values = {1.5, 0.5};
  EXPECT_NO_THROW(popularity.Validate());
  popularity.kind = RatePopularity::Kind::kExposureProbs;
  EXPECT_THROW(popularity.Validate(), std::invalid_argument);

  popularity.values = {0.5, 0.25};
  popularity.labels = {"only-one"};
  EXPECT_THROW(popularity.Validate(), std::invalid_argument);
  popularity.labels = {"a", "b"};
  EXPECT_NO_THROW(popularity.Validate());
}

TEST(AccessLogTest, ValidateEnforcesBounds) {
  AccessLog log;
  log.records = {{0.0, "u", "a"}};
  log.window = 1.0;
  log.period_length = 1.0;
  EXPECT_NO_THROW(log.Validate());

  AccessLog empty = log;
  empty.records.clear();
  EXPECT_THROW(empty.Validate(), std::invalid_argument);

  AccessLog bad_window = log;
  bad_window.window = 0.0;
  EXPECT_THROW(bad_window.Validate(), std::invalid_argument);

  AccessLog short_period = log;
  short_period.period_length = 0.5;
  EXPECT_THROW(short_period.Validate(), std::invalid_argument);
}

// Hand-checkable log: 3 users, 3 whole windows of length 10 starting at the
// earliest record. carol only appears past the truncated period end, so she
// widens the user denominator without contributing exposures.
TEST(EstimateExposureProbsTest, CountsDistinctUserWindowPairs) {
  AccessLog log;
  log.window = 10.0;
  log.period_length = 30.0;
  log.records = {
      {0.0, "alice", "a1"},   // window 0
      {2.0, "alice", "a1"},   // window 0, duplicate pair
      {11.0, "alice", "a1"},  // window 1
      {21.0, "alice", "a1"},  // window 2
      {5.0, "bob", "a1"},     // window 0
      {3.0, "alice", "a2"},   // window 0
      {25.0, "bob", "a3"},    // window 2
      {29.5, "bob", "a3"},    // window 2, duplicate pair
      {31.0, "carol", "a9"},  // past the 3 whole windows, exposure dropped
  };
  const RatePopularity estimate = EstimateExposureProbs(log);
  EXPECT_EQ(estimate.kind, RatePopularity::Kind::kExposureProbs);
  const std::vector<std::string> expected_labels = {"a1", "a2", "a3"};
  EXPECT_EQ(estimate.labels, expected_labels);
  ASSERT_EQ(estimate.values.size(), 3u);
  // Denominator: 3 windows * 3 distinct users.
  EXPECT_NEAR(estimate.values[0], 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(estimate.values[1], 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(estimate.values[2], 1.0 / 9.0, 1e-15);
  EXPECT_NO_THROW(estimate.Validate());
}

TEST(EstimateExposureProbsTest, TiesBreakByLabel) {
  AccessLog log;
  log.window = 1.0;
  log.period_length = 1.0;
  log.records = {
      {0.0, "u1", "zz"},
      {0.1, "u1", "aa"},
      {0.2, "u1", "mm"},
  };
  const RatePopularity estimate = EstimateExposureProbs(log);
  const std::vector<std::string> expected = {"aa", "mm", "zz"};
  EXPECT_EQ(estimate.labels, expected);
}

// The generator draws per-(user, window) exposure counts as independent
// Poisson(lambda * delta_t) variables, so each estimated probability is a
// binomial proportion with mean 1 - exp(-lambda * delta_t). Checks the
// estimator against that ground truth within 3 sigma plus the small bias
// from anchoring windows at the first arrival.
TEST(EstimateExposureProbsTest, RecoversGeneratorProbabilities) {
  SimConfig config;
  config.users = 300;
  config.attributes = 4;
  config.rates = PowerLawRates(4, 0.5);
  config.delta_t = 1.0;
  config.horizon = 40;
  config.seed = 2026;
  const std::vector<Observation> stream = GenerateStream(config);

  AccessLog log;
  log.records = stream;
  log.window = config.delta_t;
  log.period_length = static_cast<double>(config.horizon) * config.delta_t;
  const RatePopularity estimate = EstimateExposureProbs(log);

  ASSERT_EQ(estimate.values.size(), 4u);
  const std::vector<std::string> expected_labels = {"a1", "a2", "a3", "a4"};
  EXPECT_EQ(estimate.labels, expected_labels);
  const double cells = static_cast<double>(config.users) *
                       static_cast<double>(config.horizon);
  for (size_t rank = 0; rank < estimate.values.size(); ++rank) {
    const double truth =
        ExposureProbability(config.rates.values[rank], config.delta_t);
    const double sigma = std::sqrt(truth * (1.0 - truth) / cells);
    EXPECT_NEAR(estimate.values[rank], truth, 3.0 * sigma + 1e-3)
        << "rank " << rank + 1;
  }
}

}  // namespace
}  // namespace zanon
