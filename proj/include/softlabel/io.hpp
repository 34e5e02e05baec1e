// Copyright 2026 The softlabel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>

#include "softlabel/types.hpp"

namespace softlabel {

enum class FileFormat { Jsonl, Csv };

/// Picks the format from the file extension (.jsonl/.json vs .csv).
FileFormat format_from_path(const std::string& path);

/// Loads a soft-label dataset.
///
/// JSONL: one object per line with fields "id", "y", "d"; an optional first
/// line {"c": <int>} pins the class count. CSV: header `id,y,d0,...,d(c-1)`.
/// With `normalize` set, each row is rescaled by its sum before validation
/// (for unnormalized score vectors); off by default.
SoftDataset load_dataset(const std::string& path, FileFormat format, bool normalize = false);
SoftDataset load_dataset(std::istream& in, FileFormat format, bool normalize = false);

/// Writes a dataset; values are rendered as shortest round-trip decimals, so
/// save-then-load reproduces an equal dataset.
void save_dataset(const SoftDataset& ds, const std::string& path, FileFormat format);
void save_dataset(const SoftDataset& ds, std::ostream& out, FileFormat format);

}  // namespace softlabel
