// Copyright 2026 The voxtend Authors
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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "voxtend/embedding.hpp"
#include "voxtend/estimators.hpp"
#include "voxtend/feature_map.hpp"

namespace voxtend {

// "voxtend-fbank v1": header, "frames=<F> bins=<M>", then F lines of M values.
std::string serialize_feature_map(const FeatureMap& x);
FeatureMap parse_feature_map(std::string_view text);

// "voxtend-net v1": header, then blocks "tensor <name> <rows> <cols>"
// followed by rows*cols whitespace-separated values (row-major), printed with
// 17 significant digits.
struct NamedTensor {
  std::string name;
  Eigen::MatrixXd value;
};

std::string serialize_tensors(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> parse_tensors(std::string_view text);

std::string serialize_net(const SmallNetEstimator& net);
SmallNetEstimator parse_net(std::string_view text);

std::string serialize_embedder(const ToyEmbedder& embedder);
ToyEmbedder parse_embedder(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest form that round-trips; used for human-facing decimals.
std::string format_decimal(double value);

}  // namespace voxtend
