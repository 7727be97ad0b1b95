// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/json_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "tailscore/error.hpp"

namespace tailscore {

namespace {

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

}  // namespace

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& section) {
  if (!j.is_object()) throw SchemaError("'" + section + "' must be a JSON object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw SchemaError("unknown key '" + item.key() + "' in '" + section + "'");
  }
}

void to_json(nlohmann::json& j, const DriftSpec& d) {
  j = {{"family", to_string(d.family)},
       {"smooth_b", d.smooth_b},
       {"smooth_c", d.smooth_c},
       {"location", d.location},
       {"scale", d.scale}};
}

void from_json(const nlohmann::json& j, DriftSpec& d) {
  reject_unknown_keys(j, {"family", "smooth_b", "smooth_c", "location", "scale"}, "drift");
  d = DriftSpec{};
  d.family = parse_drift_family(j.at("family").get<std::string>());
  switch (d.family) {
    case DriftFamily::laplace_smoothed:
      d = DriftSpec::laplace();
      break;
    case DriftFamily::gumbel_smoothed:
      d = DriftSpec::gumbel();
      break;
    case DriftFamily::gaussian:
      break;
  }
  read_optional(j, "smooth_b", d.smooth_b);
  read_optional(j, "smooth_c", d.smooth_c);
  read_optional(j, "location", d.location);
  read_optional(j, "scale", d.scale);
  d.validate();
}

void to_json(nlohmann::json& j, const DiffusionSchedule& s) {
  j = {{"eta", s.eta}, {"num_steps", s.num_steps}, {"taylor_horizon", s.taylor_k}, {"lambda", to_string(s.lambda)},
       {"reverse_init", to_string(s.reverse_init)}};
}

void from_json(const nlohmann::json& j, DiffusionSchedule& s) {
  reject_unknown_keys(j, {"eta", "num_steps", "taylor_horizon", "lambda", "reverse_init"}, "schedule");
  s = DiffusionSchedule{};
  read_optional(j, "eta", s.eta);
  read_optional(j, "num_steps", s.num_steps);
  read_optional(j, "taylor_horizon", s.taylor_k);
  if (j.contains("lambda")) s.lambda = parse_lambda_weighting(j.at("lambda").get<std::string>());
  if (j.contains("reverse_init")) s.reverse_init = parse_reverse_init(j.at("reverse_init").get<std::string>());
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"learning_rate", c.learning_rate},
       {"final_lr_fraction", c.final_lr_fraction},
       {"use_taylor", c.use_taylor},
       {"hidden", c.hidden},
       {"fourier_frequencies", c.frequencies}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  reject_unknown_keys(j, {"epochs", "batch_size", "learning_rate", "final_lr_fraction", "use_taylor", "hidden", "fourier_frequencies"},
                      "train");
  c = TrainConfig{};
  read_optional(j, "epochs", c.epochs);
  read_optional(j, "batch_size", c.batch_size);
  read_optional(j, "learning_rate", c.learning_rate);
  read_optional(j, "final_lr_fraction", c.final_lr_fraction);
  read_optional(j, "use_taylor", c.use_taylor);
  read_optional(j, "hidden", c.hidden);
  read_optional(j, "fourier_frequencies", c.frequencies);
  c.validate();
}

void to_json(nlohmann::json& j, const CevtParams& p) {
  j = {{"a", p.a},
       {"b", p.b},
       {"mu_z", p.mu_z},
       {"sigma_z", p.sigma_z},
       {"threshold_q", p.threshold_q},
       {"threshold_x", p.threshold_x},
       {"negative_log_likelihood", p.nll},
       {"tail_count", p.tail_count}};
}

void from_json(const nlohmann::json& j, CevtParams& p) {
  p.a = j.at("a").get<double>();
  p.b = j.at("b").get<double>();
  p.mu_z = j.at("mu_z").get<double>();
  p.sigma_z = j.at("sigma_z").get<double>();
  p.threshold_q = j.at("threshold_q").get<double>();
  p.threshold_x = j.at("threshold_x").get<double>();
  p.nll = j.at("negative_log_likelihood").get<double>();
  p.tail_count = j.at("tail_count").get<std::size_t>();
  if (!(p.a >= -1.0 && p.a <= 1.0) || !(p.b <= kMaxTailExponent) || !(p.sigma_z > 0.0) ||
      !(p.threshold_q > 0.0 && p.threshold_q < 1.0)) {
    throw SchemaError("tail parameters violate their constraints");
  }
}

void to_json(nlohmann::json& j, const CevtFitOptions& o) {
  j = {{"threshold_q", o.threshold_q},
       {"fix_standard_normal", o.fix_standard_normal},
       {"fit_drift_to_tail", o.fit_drift_to_tail}};
}

void from_json(const nlohmann::json& j, CevtFitOptions& o) {
  reject_unknown_keys(j, {"threshold_q", "fix_standard_normal", "fit_drift_to_tail"}, "cevt");
  o = CevtFitOptions{};
  read_optional(j, "threshold_q", o.threshold_q);
  read_optional(j, "fix_standard_normal", o.fix_standard_normal);
  read_optional(j, "fit_drift_to_tail", o.fit_drift_to_tail);
  if (!(o.threshold_q > 0.0 && o.threshold_q < 1.0)) throw ConfigError("threshold_q must lie in (0, 1)");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace tailscore
