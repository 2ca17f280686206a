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
// zanon: stream anonymization toolkit.
//
//   zanon anonymize  release/suppress a CSV observation stream, zero delay
//   zanon model      closed-form k-anonymity probabilities, with sweeps
//   zanon simulate   synthetic streams through the engine vs. the model
//   zanon estimate   per-attribute exposure probabilities from a log
//
// Exit codes: 0 success, 1 input error, 2 invalid configuration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zanon/anonymizer.h"
#include "zanon/csv.h"
#include "zanon/model.h"
#include "zanon/popularity.h"
#include "zanon/simulator.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;

// Thrown for problems with the input data (exit 1) as opposed to
// configuration mistakes, which surface as std::invalid_argument (exit 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IoOptions {
  std::string input = "-";
  std::string output;
};

std::unique_ptr<std::istream> OpenInput(const std::string& path) {
  if (path.empty() || path == "-") {
    return nullptr;  // caller falls back to std::cin
  }
  auto file = std::make_unique<std::ifstream>(path);
  if (!*file) {
    throw InputError("cannot open input file: " + path);
  }
  return file;
}

std::unique_ptr<std::ostream> OpenOutput(const std::string& path) {
  if (path.empty() || path == "-") {
    return nullptr;  // caller falls back to std::cout
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) {
    throw InputError("cannot open output file: " + path);
  }
  return file;
}

std::string FormatDouble(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// --popularity powerlaw:<A>:<lambda1> | file:<path>
struct PopularitySpec {
  std::string raw = "powerlaw";
  bool is_file = false;
  std::string path;
  int64_t attribute_count = 0;  // 0: follow the --attributes flag
  double top_rate = 0.05;
};

PopularitySpec ParsePopularitySpec(const std::string& text) {
  PopularitySpec spec;
  spec.raw = text;
  if (text.rfind("file:", 0) == 0) {
    spec.is_file = true;
    spec.path = text.substr(5);
    if (spec.path.empty()) {
      throw std::invalid_argument("--popularity file: needs a path");
    }
    return spec;
  }
  if (text.rfind("powerlaw", 0) != 0) {
    throw std::invalid_argument(
        "--popularity must be powerlaw[:A[:lambda1]] or file:<path>");
  }
  std::string rest = text.substr(8);
  if (!rest.empty()) {
    if (rest.front() != ':') {
      throw std::invalid_argument("--popularity: expected powerlaw:A:lambda1");
    }
    std::istringstream fields(rest.substr(1));
    std::string field;
    if (std::getline(fields, field, ':')) {
      spec.attribute_count = std::stoll(field);
    }
    if (std::getline(fields, field, ':')) {
      spec.top_rate = std::stod(field);
    }
    if (std::getline(fields, field, ':')) {
      throw std::invalid_argument("--popularity: too many fields");
    }
  }
  return spec;
}

zanon::RatePopularity LoadPopularity(const PopularitySpec& spec,
                                     int64_t attributes) {
  if (spec.is_file) {
    std::ifstream file(spec.path);
    if (!file) {
      throw InputError("cannot open popularity file: " + spec.path);
    }
    return zanon::csv::ReadPopularityCsv(file);
  }
  const int64_t count =
      spec.attribute_count > 0 ? spec.attribute_count : attributes;
  return zanon::PowerLawRates(count, spec.top_rate);
}

// --sweep <param>=<start>:<stop>:<step> or <param>=v1,v2,...
struct SweepSpec {
  std::string parameter;  // one of z, k, A, U, N
  std::vector<int64_t> points;
};

SweepSpec ParseSweepSpec(const std::string& text) {
  const size_t equals = text.find('=');
  if (equals == std::string::npos) {
    throw std::invalid_argument("--sweep must look like z=1:50:1 or z=1,4,8");
  }
  SweepSpec spec;
  spec.parameter = text.substr(0, equals);
  const std::string values = text.substr(equals + 1);
  static const std::vector<std::string> kSweepable = {"z", "k", "A", "U",
                                                      "N"};
  if (std::find(kSweepable.begin(), kSweepable.end(), spec.parameter) ==
      kSweepable.end()) {
    throw std::invalid_argument("--sweep parameter must be one of z,k,A,U,N");
  }
  try {
    if (values.find(':') != std::string::npos) {
      std::istringstream fields(values);
      std::string field;
      int64_t bounds[3] = {0, 0, 1};
      int parsed = 0;
      while (std::getline(fields, field, ':')) {
        if (parsed >= 3) {
          throw std::invalid_argument("--sweep range has too many fields");
        }
        bounds[parsed++] = std::stoll(field);
      }
      if (parsed < 2 || bounds[2] < 1 || bounds[1] < bounds[0]) {
        throw std::invalid_argument("--sweep range must be start:stop:step");
      }
      for (int64_t v = bounds[0]; v <= bounds[1]; v += bounds[2]) {
        spec.points.push_back(v);
      }
    } else {
      std::istringstream fields(values);
      std::string field;
      while (std::getline(fields, field, ',')) {
        spec.points.push_back(std::stoll(field));
      }
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("--sweep values must be integers");
  }
  if (spec.points.empty()) {
    throw std::invalid_argument("--sweep produced no points");
  }
  return spec;
}

struct AnonymizeOptions {
  IoOptions io;
  int64_t z = 1;
  double delta_t = 1.0;
  std::string mode = "drop";
  double slack = 0.0;
  bool strict = false;
};

int RunAnonymize(const AnonymizeOptions& options) {
  zanon::ZAnonConfig config{.z = options.z,
                            .delta_t = options.delta_t,
                            .clock_slack = options.slack};
  config.Validate();
  if (options.mode != "drop" && options.mode != "blur") {
    throw std::invalid_argument("--mode must be drop or blur");
  }
  const bool blur = options.mode == "blur";

  std::unique_ptr<std::istream> input_file = OpenInput(options.io.input);
  std::istream& in = input_file ? *input_file : std::cin;
  std::unique_ptr<std::ostream> output_file = OpenOutput(options.io.output);
  std::ostream& out = output_file ? *output_file : std::cout;

  zanon::Anonymizer engine(config);
  uint64_t malformed = 0;
  bool seen_record_or_header = false;
  std::string line;
  std::string parse_error;
  while (std::getline(in, line)) {
    if (zanon::csv::IsIgnorableLine(line)) {
      continue;
    }
    if (!seen_record_or_header && zanon::csv::IsObservationHeader(line)) {
      seen_record_or_header = true;
      continue;
    }
    seen_record_or_header = true;
    const std::optional<zanon::Observation> record =
        zanon::csv::ParseObservationLine(line, &parse_error);
    if (!record) {
      ++malformed;
      if (options.strict) {
        std::cerr << "zanon: malformed line: " << parse_error << "\n";
        return kExitInputError;
      }
      continue;
    }
    const std::optional<zanon::Decision> decision = engine.Process(*record);
    if (!decision) {
      if (options.strict) {
        std::cerr << "zanon: timestamp regression beyond slack\n";
        return kExitInputError;
      }
      continue;
    }
    if (decision->verdict == zanon::Verdict::kRelease) {
      out << line << "\n";
    } else if (blur) {
      // Suppressed records keep their time and user bytes; the attribute
      // becomes the reserved token.
      const size_t first = line.find(',');
      const size_t second = line.find(',', first + 1);
      out << std::string_view(line).substr(0, second) << ",*\n";
    }
  }
  if (in.bad()) {
    throw InputError("error while reading input");
  }

  const zanon::AnonymizerStats& stats = engine.stats();
  std::cerr << "# zanon anonymize summary: in=" << stats.observations_in
            << " released=" << stats.released
            << " suppressed=" << stats.suppressed
            << " malformed=" << malformed << " rejected=" << stats.rejected
            << " z=" << options.z << " delta_t=" << options.delta_t
            << " mode=" << options.mode << " slack=" << options.slack
            << "\n";
  return kExitOk;
}

struct ModelOptions {
  zanon::ModelParams params;
  std::string popularity = "powerlaw";
  std::string sweep;
  std::string rank_dump;
  std::string output;
  // Flags the user set explicitly, to reject sweeping a pinned parameter.
  bool z_set = false, k_set = false, users_set = false;
  bool attributes_set = false, horizon_set = false;
};

void DumpRankProbabilities(const std::string& path,
                           const zanon::KAnonReport& report,
                           const zanon::RatePopularity& popularity,
                           const std::string& comment) {
  std::unique_ptr<std::ostream> file = OpenOutput(path);
  std::ostream& out = file ? *file : std::cout;
  out << "# " << comment << "\n";
  out << "# columns: rank,label,p_x,p_o,p_y,p_n\n";
  for (size_t i = 0; i < report.p_exposure.size(); ++i) {
    const std::string label = popularity.labels.empty()
                                  ? "a" + std::to_string(i + 1)
                                  : popularity.labels[i];
    out << (i + 1) << ',' << zanon::csv::EscapeToken(label) << ','
        << FormatDouble(report.p_exposure[i]) << ','
        << FormatDouble(report.p_release[i]) << ','
        << FormatDouble(report.p_publish[i]) << ','
        << FormatDouble(report.p_horizon[i]) << "\n";
  }
}

int RunModel(const ModelOptions& options) {
  options.params.Validate();
  const PopularitySpec popularity_spec =
      ParsePopularitySpec(options.popularity);

  SweepSpec sweep;
  if (options.sweep.empty()) {
    // No sweep requested: emit the single configured point, z column.
    sweep.parameter = "z";
    sweep.points = {options.params.z};
  } else {
    sweep = ParseSweepSpec(options.sweep);
    const bool pinned = (sweep.parameter == "z" && options.z_set) ||
                        (sweep.parameter == "k" && options.k_set) ||
                        (sweep.parameter == "U" && options.users_set) ||
                        (sweep.parameter == "A" && options.attributes_set) ||
                        (sweep.parameter == "N" && options.horizon_set);
    if (pinned) {
      throw std::invalid_argument("--sweep parameter " + sweep.parameter +
                                  " is also fixed by a flag");
    }
  }

  // Load before writing anything so a bad popularity file cannot leave a
  // partial report behind.
  const zanon::RatePopularity loaded =
      LoadPopularity(popularity_spec, options.params.attributes);

  std::unique_ptr<std::ostream> output_file = OpenOutput(options.output);
  std::ostream& out = output_file ? *output_file : std::cout;
  out << "# zanon model users=" << options.params.users
      << " attributes=" << options.params.attributes
      << " delta_t=" << options.params.delta_t
      << " horizon=" << options.params.horizon << " z=" << options.params.z
      << " k=" << options.params.k << " popularity=" << popularity_spec.raw
      << " sweep="
      << (options.sweep.empty() ? std::string("none") : options.sweep)
      << "\n";
  out << "# columns: " << sweep.parameter << ",p_q,p_k_anon\n";
  for (int64_t value : sweep.points) {
    zanon::ModelParams point = options.params;
    zanon::RatePopularity popularity = loaded;
    if (sweep.parameter == "z") {
      point.z = value;
    } else if (sweep.parameter == "k") {
      point.k = value;
    } else if (sweep.parameter == "U") {
      point.users = value;
    } else if (sweep.parameter == "N") {
      point.horizon = value;
    } else {
      point.attributes = value;
      // Power-law popularity tracks the swept attribute count unless the
      // spec pinned its own length.
      if (!popularity_spec.is_file && popularity_spec.attribute_count == 0) {
        popularity = zanon::PowerLawRates(value, popularity_spec.top_rate);
      }
    }
    const zanon::KAnonReport report = zanon::Evaluate(point, popularity);
    out << value << ',' << FormatDouble(report.pair_match.value) << ','
        << FormatDouble(report.p_k_anon) << "\n";
  }

  if (!options.rank_dump.empty()) {
    const zanon::KAnonReport base = zanon::Evaluate(options.params, loaded);
    std::ostringstream comment;
    comment << "zanon model rank probabilities users="
            << options.params.users
            << " attributes=" << options.params.attributes
            << " delta_t=" << options.params.delta_t
            << " horizon=" << options.params.horizon
            << " z=" << options.params.z
            << " popularity=" << popularity_spec.raw;
    DumpRankProbabilities(options.rank_dump, base, loaded, comment.str());
  }
  return kExitOk;
}

struct SimulateOptions {
  int64_t users = 2000;
  int64_t attributes = 500;
  double delta_t = 1.0;
  int64_t horizon = 24;
  int64_t z = 1;
  uint64_t seed = 0;
  std::vector<int64_t> k_values = {2};
  std::string popularity = "powerlaw";
  std::string output;
};

int RunSimulate(const SimulateOptions& options) {
  const PopularitySpec popularity_spec =
      ParsePopularitySpec(options.popularity);
  zanon::SimConfig config{.users = options.users,
                          .attributes = options.attributes,
                          .rates = LoadPopularity(popularity_spec,
                                                  options.attributes),
                          .delta_t = options.delta_t,
                          .horizon = options.horizon,
                          .z = options.z,
                          .seed = options.seed};
  config.Validate();

  const zanon::EmpiricalReport report =
      zanon::RunExperiment(config, options.k_values);

  zanon::ModelParams params{.users = options.users,
                            .attributes = options.attributes,
                            .delta_t = options.delta_t,
                            .horizon = options.horizon,
                            .z = options.z,
                            .k = 1};
  const zanon::KAnonReport model = zanon::Evaluate(params, config.rates);

  std::unique_ptr<std::ostream> output_file = OpenOutput(options.output);
  std::ostream& out = output_file ? *output_file : std::cout;
  out << "# zanon simulate users=" << options.users
      << " attributes=" << options.attributes
      << " delta_t=" << options.delta_t << " horizon=" << options.horizon
      << " z=" << options.z << " seed=" << options.seed << " k=";
  for (size_t i = 0; i < options.k_values.size(); ++i) {
    out << (i > 0 ? "," : "") << options.k_values[i];
  }
  out << " popularity=" << popularity_spec.raw << "\n";
  out << "# columns: section,key,empirical,model\n";
  // publish rows: per rank, fraction of user-windows with a release.
  for (size_t i = 0; i < report.empirical_publish.size(); ++i) {
    out << "publish," << (i + 1) << ','
        << FormatDouble(report.empirical_publish[i]) << ','
        << FormatDouble(model.p_publish[i]) << "\n";
  }
  // kanon rows: fraction of users in anonymity classes of size >= k.
  for (const auto& [k, fraction] : report.k_anon_fraction) {
    const double model_value = zanon::KAnonymityProbabilityFromLog(
        model.pair_match.log_value, options.users, k);
    out << "kanon," << k << ',' << FormatDouble(fraction) << ','
        << FormatDouble(model_value) << "\n";
  }
  return kExitOk;
}

struct EstimateOptions {
  IoOptions io;
  double delta_t = 1.0;
  double period = 0.0;  // 0: cover the observed span, rounded up
  bool strict = false;
};

int RunEstimate(const EstimateOptions& options) {
  std::unique_ptr<std::istream> input_file = OpenInput(options.io.input);
  std::istream& in = input_file ? *input_file : std::cin;

  zanon::AccessLog log;
  log.window = options.delta_t;
  uint64_t malformed = 0;
  bool seen_record_or_header = false;
  std::string line;
  std::string parse_error;
  while (std::getline(in, line)) {
    if (zanon::csv::IsIgnorableLine(line)) {
      continue;
    }
    if (!seen_record_or_header && zanon::csv::IsObservationHeader(line)) {
      seen_record_or_header = true;
      continue;
    }
    seen_record_or_header = true;
    std::optional<zanon::Observation> record =
        zanon::csv::ParseObservationLine(line, &parse_error);
    if (!record) {
      ++malformed;
      if (options.strict) {
        std::cerr << "zanon: malformed line: " << parse_error << "\n";
        return kExitInputError;
      }
      continue;
    }
    log.records.push_back(std::move(*record));
  }
  if (in.bad()) {
    throw InputError("error while reading input");
  }
  if (log.records.empty()) {
    throw InputError("log contains no usable records");
  }

  if (options.period > 0.0) {
    log.period_length = options.period;
  } else {
    double lo = log.records.front().time;
    double hi = lo;
    for (const zanon::Observation& record : log.records) {
      lo = std::min(lo, record.time);
      hi = std::max(hi, record.time);
    }
    // Cover the whole observed span with whole windows.
    const double span = hi - lo;
    log.period_length =
        std::max(1.0, std::ceil(span / options.delta_t)) * options.delta_t;
  }

  const zanon::RatePopularity estimated = zanon::EstimateExposureProbs(log);

  std::unique_ptr<std::ostream> output_file = OpenOutput(options.io.output);
  std::ostream& out = output_file ? *output_file : std::cout;
  std::ostringstream comment;
  comment << "zanon estimate delta_t=" << options.delta_t
          << " period=" << log.period_length
          << " windows=" << static_cast<int64_t>(std::floor(
                 log.period_length / options.delta_t))
          << " records=" << log.records.size()
          << " malformed=" << malformed
          << " attributes=" << estimated.size();
  zanon::csv::WritePopularityCsv(out, estimated, comment.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);

  CLI::App app{"zanon: z-anonymity stream toolkit"};
  app.require_subcommand(1);

  AnonymizeOptions anonymize;
  CLI::App* anonymize_cmd = app.add_subcommand(
      "anonymize", "Filter a t,u,a CSV stream with the z-anonymity rule");
  anonymize_cmd->add_option("input", anonymize.io.input,
                            "Input file ('-' for stdin)");
  anonymize_cmd->add_option("--z", anonymize.z, "Distinct users required");
  anonymize_cmd->add_option("--delta-t", anonymize.delta_t,
                            "Window length, seconds");
  anonymize_cmd->add_option("--mode", anonymize.mode,
                            "drop suppressed records, or blur them to '*'");
  anonymize_cmd->add_option("--slack", anonymize.slack,
                            "Tolerated timestamp regression, seconds");
  anonymize_cmd->add_flag("--strict", anonymize.strict,
                          "Abort on malformed or out-of-order lines");
  anonymize_cmd->add_option("--out", anonymize.io.output, "Output file");

  ModelOptions model;
  model.params = zanon::ModelParams{.users = 50000,
                                    .attributes = 5000,
                                    .delta_t = 1.0,
                                    .horizon = 24,
                                    .z = 20,
                                    .k = 2};
  CLI::App* model_cmd = app.add_subcommand(
      "model", "Evaluate the closed-form k-anonymity probability chain");
  CLI::Option* users_opt =
      model_cmd->add_option("--users", model.params.users, "User count U");
  CLI::Option* attributes_opt = model_cmd->add_option(
      "--attributes", model.params.attributes, "Attribute count A");
  model_cmd->add_option("--delta-t", model.params.delta_t,
                        "Window length, seconds");
  CLI::Option* horizon_opt = model_cmd->add_option(
      "--horizon", model.params.horizon, "Attacker horizon N, windows");
  CLI::Option* z_opt =
      model_cmd->add_option("--z", model.params.z, "Release threshold");
  CLI::Option* k_opt =
      model_cmd->add_option("--k", model.params.k, "Anonymity set size");
  model_cmd->add_option("--popularity", model.popularity,
                        "powerlaw[:A[:lambda1]] or file:<path> of p_x");
  model_cmd->add_option("--sweep", model.sweep,
                        "<param>=<start>:<stop>:<step> or <param>=v1,v2,...");
  model_cmd->add_option("--dump-rank-probs", model.rank_dump,
                        "Also write per-rank probabilities to this file");
  model_cmd->add_option("--out", model.output, "Output file");

  SimulateOptions simulate;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Run a synthetic stream through the engine and compare "
                  "with the model");
  simulate_cmd->add_option("--users", simulate.users, "User count U");
  simulate_cmd->add_option("--attributes", simulate.attributes,
                           "Attribute count A");
  simulate_cmd->add_option("--delta-t", simulate.delta_t,
                           "Window length, seconds");
  simulate_cmd->add_option("--horizon", simulate.horizon,
                           "Horizon N, windows");
  simulate_cmd->add_option("--z", simulate.z, "Release threshold");
  simulate_cmd->add_option("--seed", simulate.seed, "RNG seed");
  simulate_cmd
      ->add_option("--k", simulate.k_values,
                   "k values for the anonymity fractions")
      ->delimiter(',');
  simulate_cmd->add_option("--popularity", simulate.popularity,
                           "powerlaw[:A[:lambda1]] or file:<path> of p_x");
  simulate_cmd->add_option("--out", simulate.output, "Output file");

  EstimateOptions estimate;
  CLI::App* estimate_cmd = app.add_subcommand(
      "estimate", "Estimate per-attribute exposure probabilities from a log");
  estimate_cmd->add_option("input", estimate.io.input,
                           "Input file ('-' for stdin)");
  estimate_cmd->add_option("--delta-t", estimate.delta_t,
                           "Estimation window, seconds");
  estimate_cmd->add_option("--period", estimate.period,
                           "Measurement period, seconds (default: observed "
                           "span rounded up to whole windows)");
  estimate_cmd->add_flag("--strict", estimate.strict,
                         "Abort on malformed lines");
  estimate_cmd->add_option("--out", estimate.io.output, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (anonymize_cmd->parsed()) {
      return RunAnonymize(anonymize);
    }
    if (model_cmd->parsed()) {
      model.z_set = z_opt->count() > 0;
      model.k_set = k_opt->count() > 0;
      model.users_set = users_opt->count() > 0;
      model.attributes_set = attributes_opt->count() > 0;
      model.horizon_set = horizon_opt->count() > 0;
      return RunModel(model);
    }
    if (simulate_cmd->parsed()) {
      return RunSimulate(simulate);
    }
    if (estimate_cmd->parsed()) {
      return RunEstimate(estimate);
    }
  } catch (const std::logic_error& e) {
    std::cerr << "zanon: invalid configuration: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "zanon: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitConfigError;
}
