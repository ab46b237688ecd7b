// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "cothink/model/transformer.hpp"

namespace cothink::model {

// Parameter checkpoint layout:
//
//   u64 little-endian   byte length of the JSON header
//   JSON header         {"format":"cothink-params","version":1,
//                        "config":{...},
//                        "tensors":[{"name":..., "shape":[...]}, ...]}
//   float32 LE data     every tensor, flattened row-major, in header order
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace cothink::model
