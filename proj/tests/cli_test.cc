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
//
// End-to-end tests that spawn the real binary (path injected through the
// ZANON_CLI_PATH compile definition) and check bytes and exit codes.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "zanon/csv.h"
#include "zanon/model.h"
#include "zanon/popularity.h"
#include "zanon/simulator.h"

namespace zanon {
namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::vector<std::string> SplitCsvRow(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream row(line);
  std::string field;
  while (std::getline(row, field, ',')) {
    fields.push_back(field);
  }
  return fields;
}

// Data rows of a report: everything that is not a comment or blank.
std::vector<std::string> DataRows(const std::string& text) {
  std::vector<std::string> rows;
  std::stringstream body(text);
  std::string line;
  while (std::getline(body, line)) {
    if (!csv::IsIgnorableLine(line)) {
      rows.push_back(line);
    }
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    char tmpl[] = "/tmp/zanon_cli_XXXXXX";
    ASSERT_NE(mkdtemp(tmpl), nullptr);
    dir_ = tmpl;
  }

  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Path(const std::string& name) const { return dir_ + "/" + name; }

  void WriteFile(const std::string& path, const std::string& content) {
    std::ofstream file(path);
    ASSERT_TRUE(file.is_open()) << path;
    file << content;
  }

  std::string ReadFile(const std::string& path) {
    std::ifstream file(path);
    std::stringstream content;
    content << file.rdbuf();
    return content.str();
  }

  CliResult RunShell(const std::string& command) {
    const std::string out_path = Path("cli_stdout");
    const std::string err_path = Path("cli_stderr");
    const std::string full =
        command + " > '" + out_path + "' 2> '" + err_path + "'";
    const int status = std::system(full.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = ReadFile(out_path);
    result.err = ReadFile(err_path);
    return result;
  }

  CliResult RunCli(const std::string& args) {
    return RunShell(std::string("'") + ZANON_CLI_PATH + "' " + args);
  }

  std::string dir_;
};

constexpr char kBurstCsv[] =
    "t,u,a\n"
    "# five records, one attribute\n"
    "0,u0,a0\n"
    "2,u1,a0\n"
    "4,u0,a0\n"
    "6,u2,a0\n"
    "15,u3,a0\n";

TEST_F(CliTest, HelpExitsZero) {
  const CliResult result = RunCli("--help");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.out.find("anonymize"), std::string::npos);
  EXPECT_NE(result.out.find("simulate"), std::string::npos);
}

TEST_F(CliTest, MissingSubcommandExitsTwo) {
  EXPECT_EQ(RunCli("").exit_code, 2);
}

TEST_F(CliTest, UnknownFlagExitsTwo) {
  EXPECT_EQ(RunCli("anonymize --bogus").exit_code, 2);
}

TEST_F(CliTest, AnonymizeDropKeepsOnlyReleasedLines) {
  const std::string input = Path("in.csv");
  const std::string output = Path("out.csv");
  WriteFile(input, kBurstCsv);
  const CliResult result = RunCli("anonymize '" + input +
                                  "' --z 3 --delta-t 10 --out '" + output +
                                  "'");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(ReadFile(output), "6,u2,a0\n");
  EXPECT_NE(result.err.find("in=5 released=1 suppressed=4 malformed=0 "
                            "rejected=0 z=3"),
            std::string::npos)
      << result.err;
}

TEST_F(CliTest, AnonymizeBlurMasksSuppressedAttributes) {
  const std::string input = Path("in.csv");
  WriteFile(input, kBurstCsv);
  const CliResult result =
      RunCli("anonymize '" + input + "' --z 3 --delta-t 10 --mode blur");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.out,
            "0,u0,*\n"
            "2,u1,*\n"
            "4,u0,*\n"
            "6,u2,a0\n"
            "15,u3,*\n");
}

TEST_F(CliTest, AnonymizeThresholdOneEchoesRecordBytes) {
  const std::string input = Path("in.csv");
  WriteFile(input, kBurstCsv);
  const CliResult result =
      RunCli("anonymize '" + input + "' --z 1 --delta-t 10");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.out,
            "0,u0,a0\n"
            "2,u1,a0\n"
            "4,u0,a0\n"
            "6,u2,a0\n"
            "15,u3,a0\n");
}

TEST_F(CliTest, AnonymizeReadsStdinByDefault) {
  const CliResult result = RunShell(
      std::string("printf '0,u1,aa\\n1,u2,aa\\n' | '") + ZANON_CLI_PATH +
      "' anonymize --z 2 --delta-t 5");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.out, "1,u2,aa\n");
}

TEST_F(CliTest, AnonymizeMalformedLinesSkippedUnlessStrict) {
  const std::string input = Path("in.csv");
  WriteFile(input, "0,u1,aa\nnot a record\n1,u2,aa\n");
  const CliResult lenient =
      RunCli("anonymize '" + input + "' --z 1 --delta-t 5");
  EXPECT_EQ(lenient.exit_code, 0);
  EXPECT_EQ(lenient.out, "0,u1,aa\n1,u2,aa\n");
  EXPECT_NE(lenient.err.find("malformed=1"), std::string::npos);

  const CliResult strict =
      RunCli("anonymize '" + input + "' --z 1 --delta-t 5 --strict");
  EXPECT_EQ(strict.exit_code, 1);
}

TEST_F(CliTest, AnonymizeSlackControlsRegressionHandling) {
  const std::string input = Path("in.csv");
  WriteFile(input, "10,u1,aa\n3,u2,aa\n");
  const CliResult lenient =
      RunCli("anonymize '" + input + "' --z 2 --delta-t 5");
  EXPECT_EQ(lenient.exit_code, 0);
  EXPECT_EQ(lenient.out, "");
  EXPECT_NE(lenient.err.find("rejected=1"), std::string::npos);

  const CliResult strict =
      RunCli("anonymize '" + input + "' --z 2 --delta-t 5 --strict");
  EXPECT_EQ(strict.exit_code, 1);

  // With enough slack the late record is processed at the stream clock and
  // completes the pair, echoing its original bytes.
  const CliResult slack =
      RunCli("anonymize '" + input + "' --z 2 --delta-t 5 --slack 10");
  EXPECT_EQ(slack.exit_code, 0);
  EXPECT_EQ(slack.out, "3,u2,aa\n");
  EXPECT_NE(slack.err.find("rejected=0"), std::string::npos);
}

TEST_F(CliTest, InvalidConfigurationExitsTwo) {
  const std::string input = Path("in.csv");
  WriteFile(input, kBurstCsv);
  EXPECT_EQ(RunCli("anonymize '" + input + "' --z 0").exit_code, 2);
  EXPECT_EQ(RunCli("anonymize '" + input + "' --delta-t 0").exit_code, 2);
  EXPECT_EQ(RunCli("anonymize '" + input + "' --mode shred").exit_code, 2);
  EXPECT_EQ(RunCli("anonymize '" + input + "' --slack -1").exit_code, 2);
  EXPECT_EQ(RunCli("model --sweep q=1:5:1").exit_code, 2);
  EXPECT_EQ(RunCli("model --sweep z=5:1:1").exit_code, 2);
  EXPECT_EQ(RunCli("model --popularity nonsense:3").exit_code, 2);
  EXPECT_EQ(RunCli("simulate --users 1").exit_code, 2);
  EXPECT_EQ(RunCli("simulate --k 0 --users 10 --attributes 2").exit_code, 2);
  // Period shorter than one window is a configuration error.
  EXPECT_EQ(RunCli("estimate '" + input + "' --period 5 --delta-t 10")
                .exit_code,
            2);
}

TEST_F(CliTest, MissingInputExitsOne) {
  EXPECT_EQ(RunCli("anonymize '" + Path("nope.csv") + "'").exit_code, 1);
  EXPECT_EQ(RunCli("model --popularity file:" + Path("nope.csv")).exit_code,
            1);
  const std::string empty = Path("empty.csv");
  WriteFile(empty, "# nothing but comments\n");
  EXPECT_EQ(RunCli("estimate '" + empty + "'").exit_code, 1);
}

TEST_F(CliTest, ModelSinglePointMatchesLibrary) {
  const CliResult result = RunCli(
      "model --users 100 --attributes 4 --delta-t 1 --horizon 2 --z 2 --k 2");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.out.find("# zanon model users=100"), std::string::npos);
  EXPECT_NE(result.out.find("# columns: z,p_q,p_k_anon"), std::string::npos);
  const std::vector<std::string> rows = DataRows(result.out);
  ASSERT_EQ(rows.size(), 1u);
  const std::vector<std::string> fields = SplitCsvRow(rows[0]);
  ASSERT_EQ(fields.size(), 3u);
  EXPECT_EQ(fields[0], "2");

  ModelParams params{.users = 100, .attributes = 4, .delta_t = 1.0,
                     .horizon = 2, .z = 2, .k = 2};
  const KAnonReport expected = Evaluate(params, PowerLawRates(4));
  // %.17g output round-trips doubles exactly.
  EXPECT_DOUBLE_EQ(std::stod(fields[1]), expected.pair_match.value);
  EXPECT_DOUBLE_EQ(std::stod(fields[2]), expected.p_k_anon);
}

TEST_F(CliTest, ModelSweepEmitsOneRowPerPoint) {
  const std::string output = Path("sweep.csv");
  const CliResult result = RunCli(
      "model --users 100 --attributes 4 --delta-t 1 --horizon 2 --k 2 "
      "--sweep z=1:5:2 --out '" +
      output + "'");
  EXPECT_EQ(result.exit_code, 0);
  const std::vector<std::string> rows = DataRows(ReadFile(output));
  ASSERT_EQ(rows.size(), 3u);
  const std::vector<int64_t> swept = {1, 3, 5};
  for (size_t i = 0; i < rows.size(); ++i) {
    const std::vector<std::string> fields = SplitCsvRow(rows[i]);
    ASSERT_EQ(fields.size(), 3u);
    EXPECT_EQ(std::stoll(fields[0]), swept[i]);
    ModelParams params{.users = 100, .attributes = 4, .delta_t = 1.0,
                       .horizon = 2, .z = swept[i], .k = 2};
    const KAnonReport expected = Evaluate(params, PowerLawRates(4));
    EXPECT_DOUBLE_EQ(std::stod(fields[2]), expected.p_k_anon) << rows[i];
  }
}

TEST_F(CliTest, ModelSweepOfPinnedParameterExitsTwo) {
  EXPECT_EQ(RunCli("model --z 5 --sweep z=1:5:1").exit_code, 2);
  EXPECT_EQ(RunCli("model --users 10 --sweep U=10,20").exit_code, 2);
}

TEST_F(CliTest, ModelAttributeSweepRegrowsPowerLaw) {
  const CliResult result = RunCli(
      "model --users 50 --delta-t 1 --horizon 2 --z 2 --k 2 --sweep A=2,4");
  EXPECT_EQ(result.exit_code, 0);
  const std::vector<std::string> rows = DataRows(result.out);
  ASSERT_EQ(rows.size(), 2u);
  for (size_t i = 0; i < rows.size(); ++i) {
    const int64_t attributes = i == 0 ? 2 : 4;
    ModelParams params{.users = 50, .attributes = attributes, .delta_t = 1.0,
                       .horizon = 2, .z = 2, .k = 2};
    const KAnonReport expected = Evaluate(params, PowerLawRates(attributes));
    const std::vector<std::string> fields = SplitCsvRow(rows[i]);
    EXPECT_DOUBLE_EQ(std::stod(fields[2]), expected.p_k_anon) << rows[i];
  }
}

TEST_F(CliTest, ModelReadsPopularityFiles) {
  const std::string popularity = Path("pop.csv");
  WriteFile(popularity,
            "rank,label,p_x\n"
            "1,x,0.3\n"
            "2,y,0.2\n");
  const CliResult result = RunCli(
      "model --users 50 --attributes 2 --delta-t 1 --horizon 2 --z 2 --k 2 "
      "--popularity file:" +
      popularity);
  EXPECT_EQ(result.exit_code, 0);
  const std::vector<std::string> rows = DataRows(result.out);
  ASSERT_EQ(rows.size(), 1u);

  RatePopularity direct;
  direct.kind = RatePopularity::Kind::kExposureProbs;
  direct.values = {0.3, 0.2};
  direct.labels = {"x", "y"};
  ModelParams params{.users = 50, .attributes = 2, .delta_t = 1.0,
                     .horizon = 2, .z = 2, .k = 2};
  const KAnonReport expected = Evaluate(params, direct);
  EXPECT_DOUBLE_EQ(std::stod(SplitCsvRow(rows[0])[2]), expected.p_k_anon);
}

TEST_F(CliTest, ModelDumpsRankProbabilities) {
  const std::string dump = Path("ranks.csv");
  const CliResult result = RunCli(
      "model --users 100 --attributes 3 --delta-t 1 --horizon 2 --z 2 --k 2 "
      "--dump-rank-probs '" +
      dump + "'");
  EXPECT_EQ(result.exit_code, 0);
  const std::string content = ReadFile(dump);
  EXPECT_NE(content.find("# columns: rank,label,p_x,p_o,p_y,p_n"),
            std::string::npos);
  const std::vector<std::string> rows = DataRows(content);
  ASSERT_EQ(rows.size(), 3u);
  const std::vector<std::string> first = SplitCsvRow(rows[0]);
  ASSERT_EQ(first.size(), 6u);
  EXPECT_EQ(first[0], "1");
  EXPECT_EQ(first[1], "a1");
  EXPECT_DOUBLE_EQ(std::stod(first[2]), ExposureProbability(0.05, 1.0));
}

TEST_F(CliTest, SimulateReportMatchesLibraryRun) {
  const CliResult result = RunCli(
      "simulate --users 40 --attributes 3 --delta-t 1 --horizon 5 --z 2 "
      "--seed 7 --k 1,2 --popularity powerlaw:3:0.3");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.out.find("# columns: section,key,empirical,model"),
            std::string::npos);

  SimConfig config;
  config.users = 40;
  config.attributes = 3;
  config.rates = PowerLawRates(3, 0.3);
  config.delta_t = 1.0;
  config.horizon = 5;
  config.z = 2;
  config.seed = 7;
  const std::vector<int64_t> ks = {1, 2};
  const EmpiricalReport expected = RunExperiment(config, ks);

  size_t publish_rows = 0;
  size_t kanon_rows = 0;
  for (const std::string& row : DataRows(result.out)) {
    const std::vector<std::string> fields = SplitCsvRow(row);
    ASSERT_EQ(fields.size(), 4u) << row;
    if (fields[0] == "publish") {
      const size_t rank = std::stoul(fields[1]);
      ASSERT_GE(rank, 1u);
      ASSERT_LE(rank, 3u);
      EXPECT_DOUBLE_EQ(std::stod(fields[2]),
                       expected.empirical_publish[rank - 1])
          << row;
      ++publish_rows;
    } else {
      ASSERT_EQ(fields[0], "kanon") << row;
      const size_t k_index = kanon_rows;
      EXPECT_EQ(std::stoll(fields[1]),
                expected.k_anon_fraction[k_index].first);
      EXPECT_DOUBLE_EQ(std::stod(fields[2]),
                       expected.k_anon_fraction[k_index].second)
          << row;
      ++kanon_rows;
    }
  }
  EXPECT_EQ(publish_rows, 3u);
  EXPECT_EQ(kanon_rows, 2u);
}

TEST_F(CliTest, EstimateWritesPopularityFileThatModelAccepts) {
  const std::string input = Path("log.csv");
  const std::string output = Path("est.csv");
  WriteFile(input,
            "t,u,a\n"
            "0,alice,a1\n"
            "2,alice,a1\n"
            "11,alice,a1\n"
            "21,alice,a1\n"
            "5,bob,a1\n"
            "3,alice,a2\n"
            "25,bob,a3\n"
            "29.5,bob,a3\n"
            "31,carol,a9\n");
  const CliResult result = RunCli("estimate '" + input +
                                  "' --delta-t 10 --period 30 --out '" +
                                  output + "'");
  EXPECT_EQ(result.exit_code, 0);

  const std::string content = ReadFile(output);
  EXPECT_NE(content.find("windows=3"), std::string::npos);
  std::stringstream stream(content);
  const RatePopularity estimated = csv::ReadPopularityCsv(stream);
  ASSERT_EQ(estimated.values.size(), 3u);
  EXPECT_DOUBLE_EQ(estimated.values[0], 4.0 / 9.0);
  const std::vector<std::string> labels = {"a1", "a2", "a3"};
  EXPECT_EQ(estimated.labels, labels);

  const CliResult chained = RunCli(
      "model --users 30 --attributes 3 --delta-t 10 --horizon 3 --z 2 --k 2 "
      "--popularity file:" +
      output);
  EXPECT_EQ(chained.exit_code, 0);
}

TEST_F(CliTest, EstimateDefaultPeriodCoversObservedSpan) {
  const std::string input = Path("log.csv");
  WriteFile(input, "0,u1,a\n25,u2,a\n");
  const CliResult result = RunCli("estimate '" + input + "' --delta-t 10");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.out.find("period=30"), std::string::npos) << result.out;
  EXPECT_NE(result.out.find("windows=3"), std::string::npos) << result.out;
}

// Scaled-down stream through the real binary, checked record by record
// against the quadratic reference implementation.
TEST_F(CliTest, AnonymizeAgreesWithOracleOnLargeStream) {
  SimConfig config;
  config.users = 500;
  config.attributes = 20;
  config.rates = PowerLawRates(20, 2.0);
  config.delta_t = 0.5;
  config.horizon = 80;
  config.seed = 20260815;
  const std::vector<Observation> stream = GenerateStream(config);
  ASSERT_GT(stream.size(), 100000u);

  const int64_t z = 10;
  const std::vector<Decision> oracle = OracleAnonymize(stream, z, 0.5);
  std::string input_text;
  std::string expected_output;
  int64_t expected_released = 0;
  for (size_t i = 0; i < stream.size(); ++i) {
    const std::string line = csv::FormatObservation(stream[i]);
    input_text += line;
    input_text += '\n';
    if (oracle[i].verdict == Verdict::kRelease) {
      expected_output += line;
      expected_output += '\n';
      ++expected_released;
    }
  }
  const std::string input = Path("big.csv");
  const std::string output = Path("big_out.csv");
  WriteFile(input, input_text);

  const CliResult result = RunCli("anonymize '" + input +
                                  "' --z 10 --delta-t 0.5 --out '" + output +
                                  "'");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(ReadFile(output), expected_output);
  EXPECT_NE(result.err.find("released=" + std::to_string(expected_released)),
            std::string::npos)
      << result.err;
}

}  // namespace
}  // namespace zanon
