// Copyright 2026 The diffauction Authors
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

#include <charconv>
#include <cmath>
#include <sstream>

#include "diffauction/errors.hpp"
#include "diffauction/mechanisms.hpp"
#include "json.hpp"

namespace diffauction {
namespace {

double parse_real(std::string_view text, std::string_view what) {
  double x = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(x)) {
    throw ParseError("bad number '" + std::string(text) + "'", 0, std::string(what));
  }
  return x;
}

int parse_distance(std::string_view text) {
  int d = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ec != std::errc{} || ptr != text.data() + text.size() || d < 1) {
    throw ParseError("distance must be a positive integer, got '" + std::string(text) + "'", 0,
                     "sigma");
  }
  return d;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  for (std::size_t start = 0;;) {
    const auto at = text.find(sep, start);
    out.push_back(text.substr(start, at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

}  // namespace

ShiftingFunction::ShiftingFunction(std::map<int, double> increments, double fallback)
    : increments_(std::move(increments)), fallback_(fallback) {
  for (const auto& [d, v] : increments_) {
    if (d < 1) throw PreconditionError("shift distances start at 1");
    if (!std::isfinite(v)) throw PreconditionError("shift must be finite");
  }
}

ShiftingFunction ShiftingFunction::indicator(double amount, int max_distance) {
  std::map<int, double> table;
  for (int d = 1; d <= max_distance; ++d) table[d] = amount;
  return ShiftingFunction(std::move(table), 0.0);
}

ShiftingFunction ShiftingFunction::parse(std::string_view text) {
  if (text == "zero") return {};
  if (text == "sigma1") return indicator(0.1, 1);
  if (text == "sigma2") return ShiftingFunction({{1, 0.2}, {2, 0.1}}, 0.0);
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  if (kind == "indicator") {
    const auto parts = split(body, ':');
    if (parts.size() != 2) throw ParseError("expected indicator:<amount>:<max_d>", 0, "sigma");
    return indicator(parse_real(parts[0], "sigma"), parse_distance(parts[1]));
  }
  if (kind == "table") {
    std::map<int, double> table;
    double fallback = 0.0;
    for (std::string_view item : split(body, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected d=value in table", 0, "sigma");
      const std::string_view key = item.substr(0, eq);
      const double value = parse_real(item.substr(eq + 1), "sigma");
      if (key == "default") {
        fallback = value;
      } else if (!table.emplace(parse_distance(key), value).second) {
        throw ParseError("distance listed twice in table", 0, "sigma");
      }
    }
    return ShiftingFunction(std::move(table), fallback);
  }
  throw ParseError("unknown shifting function '" + std::string(text) + "'", 0, "sigma");
}

double ShiftingFunction::operator()(int distance) const {
  const auto it = increments_.find(distance);
  return it == increments_.end() ? fallback_ : it->second;
}

bool ShiftingFunction::is_monotone() const {
  const int last = increments_.empty() ? 1 : increments_.rbegin()->first + 1;
  for (int d = 1; d < last; ++d) {
    if ((*this)(d + 1) > (*this)(d)) return false;
  }
  return true;
}

void ShiftingFunction::check_range(double width) const {
  for (double v : values()) {
    if (v < 0 || v > width) {
      throw DomainError("shift " + nlohmann::json(v).dump() + " outside [0, " +
                        nlohmann::json(width).dump() + "]");
    }
  }
}

std::vector<double> ShiftingFunction::values() const {
  std::vector<double> out{fallback_};
  for (const auto& [d, v] : increments_) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string ShiftingFunction::to_string() const {
  std::ostringstream os;
  os << "table:";
  for (const auto& [d, v] : increments_) os << d << '=' << nlohmann::json(v).dump() << ',';
  os << "default=" << nlohmann::json(fallback_).dump();
  return os.str();
}

}  // namespace diffauction
