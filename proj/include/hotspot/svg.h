/*
 * Copyright 2026 The Hotspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Minimal deterministic SVG charts. Every chart embeds its data as a CSV
// table inside an XML comment; because "--" may not appear in a comment,
// runs of two or more hyphens in the table are written as dots.

#ifndef HOTSPOT_SVG_H_
#define HOTSPOT_SVG_H_

#include <string>
#include <vector>

#include "hotspot/common.h"
#include "hotspot/dynamics.h"

namespace hotspot::svg {

struct Series {
  std::string name;
  std::vector<double> y;
  std::vector<double> lower;  // optional error band, same length as y
  std::vector<double> upper;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
};

std::string bar_chart(const Axes& axes, const std::vector<std::string>& categories,
                      const std::vector<double>& values);
std::string line_chart(const Axes& axes, const std::vector<double>& x,
                       const std::vector<Series>& series);
std::string box_chart(const Axes& axes, const std::vector<std::string>& labels,
                      const std::vector<dynamics::BoxStats>& boxes);
std::string heatmap(const Axes& axes, const Matrix<double>& values,
                    const std::vector<std::string>& column_labels);

// The comment-safe form used for embedded tables.
std::string comment_safe(const std::string& text);

}  // namespace hotspot::svg

#endif  // HOTSPOT_SVG_H_
