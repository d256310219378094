// Copyright 2026 The genebench Authors.
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

#ifndef GENEBENCH_STOPWORDS_HPP_
#define GENEBENCH_STOPWORDS_HPP_

#include <string>
#include <string_view>
#include <unordered_set>

namespace genebench {

inline constexpr std::string_view kStopwordsVersion = "en-v1";

const std::unordered_set<std::string>& english_stopwords();
bool is_stopword(std::string_view token);

}  // namespace genebench

#endif  // GENEBENCH_STOPWORDS_HPP_
