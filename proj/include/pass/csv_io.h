// Copyright 2026 The PASS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "pass/dataset.h"

namespace pass {

// Reads a comma-delimited file with a header row. Columns named "f_<i>"
// become features in header order; columns named after schema attributes
// become labels. Other columns are ignored.
//
// Throws SchemaError for a missing attribute column, and ValidationError
// naming the 1-based line number for malformed, missing, or out-of-range
// values.
Dataset LoadCsv(const std::string& path, const std::vector<AttributeSchema>& schema);

// Writes features as f_0..f_{d-1} (17 significant digits) followed by one
// column per attribute.
void WriteCsv(const std::string& path, const Dataset& data);

}  // namespace pass
