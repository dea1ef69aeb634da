#pragma once

// Argument parsing helpers shared by the command-line tool and its tests.
//   ranges:  "a..b" (inclusive), "a,b,c", or a single integer
//   probes:  "gaussian:mu=6.28,sigma=1", "hermite_gaussian:mu=0,sigma=2,degree=3"
//   fields:  "const", "const:2", "cosx:0.3"

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "magtrace/error.hpp"
#include "magtrace/lattice.hpp"
#include "magtrace/probe.hpp"
#include "magtrace/spectra.hpp"

namespace magtrace::cli {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  require(used == s.size(), "not a number: '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  require(used == s.size(), "not an integer: '" + s + "'");
  return v;
}

inline std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long long a = parse_int(trim(text.substr(0, dots)));
    const long long b = parse_int(trim(text.substr(dots + 2)));
    require(a <= b, "range '" + text + "' is empty");
    require(b - a < 10000000, "range '" + text + "' is too long");
    for (long long v = a; v <= b; ++v) out.push_back(static_cast<int>(v));
    return out;
  }
  for (const auto& part : split(text, ',')) out.push_back(static_cast<int>(parse_int(part)));
  return out;
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part));
  return out;
}

inline TestFunction parse_probe(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = trim(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    for (const auto& item : split(text.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      require(eq != std::string::npos, "probe parameter '" + item + "' is not key=value");
      kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
  }
  auto take = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  require(kind == "gaussian" || kind == "hermite_gaussian", "unknown probe kind '" + kind + "'");
  const double mu = parse_double(take("mu", "0"));
  const double sigma = parse_double(take("sigma", "1"));
  const int degree = kind == "hermite_gaussian" ? static_cast<int>(parse_int(take("degree", "0"))) : 0;
  require(kv.empty(), "unknown probe parameter '" + (kv.empty() ? "" : kv.begin()->first) + "'");
  if (kind == "gaussian") return TestFunction::gaussian(mu, sigma);
  return TestFunction::hermite_gaussian(mu, sigma, degree);
}

inline ModelSystem parse_model(const std::string& name, double radius, int genus) {
  if (name == "torus2") return ModelSystem::torus2();
  if (name == "torus3") return ModelSystem::torus3();
  if (name == "sphere") return ModelSystem::sphere(radius);
  if (name == "hyperbolic") return ModelSystem::hyperbolic(radius, genus);
  throw std::invalid_argument("unknown model '" + name + "'");
}

inline ScalarField parse_field(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = trim(text.substr(0, colon));
  const std::string arg = colon == std::string::npos ? "" : trim(text.substr(colon + 1));
  if (kind == "const") return constant_field(arg.empty() ? 1.0 : parse_double(arg));
  if (kind == "cosx") return cosine_field(arg.empty() ? 0.3 : parse_double(arg));
  throw std::invalid_argument("unknown field profile '" + text + "'");
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace magtrace::cli
