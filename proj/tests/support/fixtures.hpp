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

#ifndef GENEBENCH_TESTS_SUPPORT_FIXTURES_HPP_
#define GENEBENCH_TESTS_SUPPORT_FIXTURES_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace genebench::testing {

// <repo>/data/<relative>.
std::filesystem::path data_path(std::string_view relative);
std::filesystem::path fixture_path(std::string_view name);
std::string cli_path();

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view body);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with the given arguments from `cwd` (shell-quoted).
CommandResult run_cli(const std::vector<std::string>& args,
                      const std::filesystem::path& cwd = {});

}  // namespace genebench::testing

#endif  // GENEBENCH_TESTS_SUPPORT_FIXTURES_HPP_
