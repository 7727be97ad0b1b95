// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <initializer_list>

#include "tailscore/cevt.hpp"
#include "tailscore/drift.hpp"
#include "tailscore/sde.hpp"
#include "tailscore/training.hpp"

namespace tailscore {

void to_json(nlohmann::json& j, const DriftSpec& d);
void from_json(const nlohmann::json& j, DriftSpec& d);
void to_json(nlohmann::json& j, const DiffusionSchedule& s);
void from_json(const nlohmann::json& j, DiffusionSchedule& s);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const CevtParams& p);
void from_json(const nlohmann::json& j, CevtParams& p);
void to_json(nlohmann::json& j, const CevtFitOptions& o);
void from_json(const nlohmann::json& j, CevtFitOptions& o);

/// Throws SchemaError naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& section);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace tailscore
