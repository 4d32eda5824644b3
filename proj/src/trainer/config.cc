// Copyright 2026 The DouDizhu Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ddz/trainer.h"

namespace ddz {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Bad(std::string_view key, std::string_view value,
                      std::string_view want) {
  throw ConfigError("config key '" + std::string(key) + "': cannot use '" +
                    std::string(value) + "' (" + std::string(want) + ")");
}

template <typename T>
T Number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    Bad(key, value, "expected a number");
  }
  return out;
}

bool Flag(std::string_view key, std::string_view value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  Bad(key, value, "expected on/off");
}

// Shortest text that parses back to the same double.
std::string Real(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void Require(bool ok, std::string_view key, std::string_view what) {
  if (!ok) {
    throw ConfigError("config key '" + std::string(key) + "' " +
                      std::string(what));
  }
}

}  // namespace

BetaSchedule TrainerConfig::Beta() const {
  BetaSchedule s;
  s.beta_max = beta_max;
  s.ramp_frames = ramp_frames > 0
                      ? ramp_frames
                      : static_cast<std::uint64_t>(std::llround(
                            ramp_fraction * static_cast<double>(total_frames)));
  return s;
}

void TrainerConfig::Set(std::string_view key, std::string_view value) {
  value = Trim(value);
  if (key == "epsilon") {
    epsilon = Number<double>(key, value);
  } else if (key == "batch_size") {
    batch_size = Number<int>(key, value);
  } else if (key == "unroll_length") {
    unroll_length = Number<int>(key, value);
  } else if (key == "sync_interval") {
    sync_interval = Number<int>(key, value);
  } else if (key == "total_frames") {
    total_frames = Number<std::uint64_t>(key, value);
  } else if (key == "objective") {
    try {
      objective = ParseMetric(value);
    } catch (const std::invalid_argument&) {
      Bad(key, value, "expected wp or adp");
    }
  } else if (key == "coach") {
    coach_enabled = Flag(key, value);
  } else if (key == "opponent_model") {
    opponent_model_enabled = Flag(key, value);
  } else if (key == "seed") {
    seed = Number<std::uint64_t>(key, value);
  } else if (key == "num_actors") {
    num_actors = Number<int>(key, value);
  } else if (key == "buffer_capacity") {
    buffer_capacity = Number<int>(key, value);
  } else if (key == "lstm_hidden") {
    shape.lstm_hidden = Number<int>(key, value);
  } else if (key == "width") {
    shape.width = Number<int>(key, value);
  } else if (key == "decision_layers") {
    shape.decision_layers = Number<int>(key, value);
  } else if (key == "prediction_layers") {
    shape.prediction_layers = Number<int>(key, value);
  } else if (key == "coach_embed") {
    coach_shape.embed = Number<int>(key, value);
  } else if (key == "coach_width") {
    coach_shape.width = Number<int>(key, value);
  } else if (key == "coach_layers") {
    coach_shape.layers = Number<int>(key, value);
  } else if (key == "learning_rate") {
    learning_rate = Number<double>(key, value);
  } else if (key == "prediction_learning_rate") {
    prediction_learning_rate = Number<double>(key, value);
  } else if (key == "coach_learning_rate") {
    coach_learning_rate = Number<double>(key, value);
  } else if (key == "beta_max") {
    beta_max = Number<double>(key, value);
  } else if (key == "ramp_fraction") {
    ramp_fraction = Number<double>(key, value);
  } else if (key == "ramp_frames") {
    ramp_frames = Number<std::uint64_t>(key, value);
  } else if (key == "coach_batch_size") {
    coach_batch_size = Number<int>(key, value);
  } else if (key == "acceptance_alarm") {
    acceptance_alarm = Number<double>(key, value);
  } else if (key == "max_draws") {
    max_draws = Number<std::uint64_t>(key, value);
  } else if (key == "checkpoint_interval") {
    checkpoint_interval = Number<std::uint64_t>(key, value);
  } else if (key == "log_interval") {
    log_interval = Number<int>(key, value);
  } else if (key == "eval_interval") {
    eval_interval = Number<std::uint64_t>(key, value);
  } else if (key == "eval_games") {
    eval_games = Number<int>(key, value);
  } else if (key == "target_landlord_wp") {
    target_landlord_wp = Number<double>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void TrainerConfig::Validate() const {
  Require(epsilon >= 0 && epsilon <= 1, "epsilon", "must lie in [0, 1]");
  Require(batch_size > 0, "batch_size", "must be positive");
  Require(unroll_length > 0, "unroll_length", "must be positive");
  Require(sync_interval > 0, "sync_interval", "must be positive");
  Require(num_actors >= 0, "num_actors", "must be non-negative");
  Require(buffer_capacity >= LearnerBatch(), "buffer_capacity",
          "must hold at least batch_size * unroll_length samples");
  Require(shape.lstm_hidden > 0, "lstm_hidden", "must be positive");
  Require(shape.width > 0, "width", "must be positive");
  Require(shape.decision_layers >= 1, "decision_layers", "must be >= 1");
  Require(shape.prediction_layers >= 1, "prediction_layers", "must be >= 1");
  Require(coach_shape.embed > 0, "coach_embed", "must be positive");
  Require(coach_shape.width > 0, "coach_width", "must be positive");
  Require(coach_shape.layers >= 1, "coach_layers", "must be >= 1");
  Require(learning_rate > 0, "learning_rate", "must be positive");
  Require(prediction_learning_rate > 0, "prediction_learning_rate",
          "must be positive");
  Require(coach_learning_rate > 0, "coach_learning_rate", "must be positive");
  Require(beta_max >= 0 && beta_max <= 0.5, "beta_max", "must lie in [0, 0.5]");
  Require(ramp_fraction >= 0 && ramp_fraction <= 1, "ramp_fraction",
          "must lie in [0, 1]");
  Require(coach_batch_size > 0, "coach_batch_size", "must be positive");
  Require(acceptance_alarm >= 0 && acceptance_alarm <= 1, "acceptance_alarm",
          "must lie in [0, 1]");
  Require(max_draws > 0, "max_draws", "must be positive");
  Require(log_interval > 0, "log_interval", "must be positive");
  Require(eval_games > 0, "eval_games", "must be positive");
  Require(target_landlord_wp >= 0 && target_landlord_wp <= 1,
          "target_landlord_wp", "must lie in [0, 1]");
  Require(target_landlord_wp == 0 || eval_interval > 0, "target_landlord_wp",
          "needs eval_interval > 0");
}

TrainerConfig TrainerConfig::Parse(std::string_view text) {
  TrainerConfig config;
  std::istringstream is{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    }
    config.Set(Trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  config.Validate();
  return config;
}

TrainerConfig TrainerConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::filesystem::filesystem_error(
        "cannot read config", path,
        std::make_error_code(std::errc::no_such_file_or_directory));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::string TrainerConfig::ToText() const {
  std::ostringstream os;
  auto put = [&](std::string_view k, const std::string& v) {
    os << k << '=' << v << '\n';
  };
  auto on = [](bool b) { return std::string(b ? "on" : "off"); };
  put("epsilon", Real(epsilon));
  put("batch_size", std::to_string(batch_size));
  put("unroll_length", std::to_string(unroll_length));
  put("sync_interval", std::to_string(sync_interval));
  put("total_frames", std::to_string(total_frames));
  put("objective", std::string(MetricName(objective)));
  put("coach", on(coach_enabled));
  put("opponent_model", on(opponent_model_enabled));
  put("seed", std::to_string(seed));
  put("num_actors", std::to_string(num_actors));
  put("buffer_capacity", std::to_string(buffer_capacity));
  put("lstm_hidden", std::to_string(shape.lstm_hidden));
  put("width", std::to_string(shape.width));
  put("decision_layers", std::to_string(shape.decision_layers));
  put("prediction_layers", std::to_string(shape.prediction_layers));
  put("coach_embed", std::to_string(coach_shape.embed));
  put("coach_width", std::to_string(coach_shape.width));
  put("coach_layers", std::to_string(coach_shape.layers));
  put("learning_rate", Real(learning_rate));
  put("prediction_learning_rate", Real(prediction_learning_rate));
  put("coach_learning_rate", Real(coach_learning_rate));
  put("beta_max", Real(beta_max));
  put("ramp_fraction", Real(ramp_fraction));
  put("ramp_frames", std::to_string(ramp_frames));
  put("coach_batch_size", std::to_string(coach_batch_size));
  put("acceptance_alarm", Real(acceptance_alarm));
  put("max_draws", std::to_string(max_draws));
  put("checkpoint_interval", std::to_string(checkpoint_interval));
  put("log_interval", std::to_string(log_interval));
  put("eval_interval", std::to_string(eval_interval));
  put("eval_games", std::to_string(eval_games));
  put("target_landlord_wp", Real(target_landlord_wp));
  return os.str();
}

}  // namespace ddz
