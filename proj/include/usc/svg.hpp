// Copyright 2026 The usc-lindblad Authors
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

// Minimal standalone SVG line plots.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace usc::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a polyline
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // non-positive values are dropped
  std::vector<Series> series;
  std::vector<double> vlines;  // dashed vertical guides
};

std::string render(const Plot& p);

/// Writes the plot; returns false instead of throwing on any failure.
bool write(const std::filesystem::path& path, const Plot& p) noexcept;

}  // namespace usc::svg
