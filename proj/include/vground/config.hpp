// Copyright 2026 The vground Authors.
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

// Flat key=value config files. '#' starts a comment; blank lines are
// ignored; keys may not repeat.

#include <filesystem>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace vground {

using KeyValues = std::map<std::string, std::string>;

// Throws ValidationError naming the line for malformed or duplicate keys.
KeyValues parse_kv(std::string_view text, std::string_view source = "config");
KeyValues read_kv_file(const std::filesystem::path& path);

double kv_double(const KeyValues& kv, const std::string& key, double fallback);
int kv_int(const KeyValues& kv, const std::string& key, int fallback);
std::uint64_t kv_uint64(const KeyValues& kv, const std::string& key, std::uint64_t fallback);
bool kv_bool(const KeyValues& kv, const std::string& key, bool fallback);

}  // namespace vground
