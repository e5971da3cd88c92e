/*
 * Copyright 2026 The biasaudit Authors.
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

#ifndef BIASAUDIT_SVG_H_
#define BIASAUDIT_SVG_H_

#include <string>
#include <string_view>

#include "biasaudit/attribution.h"

namespace biasaudit {

// Horizontal bar chart of phi per unit: units top to bottom on the y axis,
// positive bars right of zero, negative bars left.
std::string AttributionSvg(const Attribution& attribution, std::string_view title);

std::string XmlEscape(std::string_view text);

}  // namespace biasaudit

#endif  // BIASAUDIT_SVG_H_
