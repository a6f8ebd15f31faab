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

#include "vground/config.hpp"

#include <charconv>
#include <cstdint>
#include <sstream>

#include "vground/digest.hpp"
#include "vground/errors.hpp"

namespace vground {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const KeyValues& kv, const std::string& key, T fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  T v{};
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("config key '" + key + "': cannot parse '" + s + "'");
  }
  return v;
}

}  // namespace

KeyValues parse_kv(std::string_view text, std::string_view source) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ValidationError(where + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ValidationError(where + ": empty key");
    if (!kv.emplace(key, value).second) throw ValidationError(where + ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues read_kv_file(const std::filesystem::path& path) {
  return parse_kv(read_file(path), path.string());
}

double kv_double(const KeyValues& kv, const std::string& key, double fallback) {
  return parse_number<double>(kv, key, fallback);
}

int kv_int(const KeyValues& kv, const std::string& key, int fallback) {
  return parse_number<int>(kv, key, fallback);
}

std::uint64_t kv_uint64(const KeyValues& kv, const std::string& key, std::uint64_t fallback) {
  return parse_number<std::uint64_t>(kv, key, fallback);
}

bool kv_bool(const KeyValues& kv, const std::string& key, bool fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ValidationError("config key '" + key + "': expected true or false");
}

}  // namespace vground
