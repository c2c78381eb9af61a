// Copyright 2026 The vrdeval Authors.
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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vrdeval/core.hpp"

namespace vrdeval {

enum class Task { kSer, kEl };

inline const char* task_name(Task t) { return t == Task::kSer ? "ser" : "el"; }

/// Model output for one document. SER output is carried either as spans or
/// as one BIO tag per word; EL output is triplets over the gold entity list.
/// Absent and empty lists are distinct so files round-trip exactly.
struct PredictionRecord {
  std::string id;
  std::optional<std::vector<Entity>> entities;
  std::optional<std::vector<std::string>> tags;
  std::optional<std::vector<RelationTriplet>> relations;
  bool operator==(const PredictionRecord&) const = default;
};

struct PredictionSet {
  Task task = Task::kSer;
  std::vector<PredictionRecord> documents;
  bool operator==(const PredictionSet&) const = default;
};

}  // namespace vrdeval
