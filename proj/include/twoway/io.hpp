#pragma once

// Config files, power coupling rules, and number formatting for the CLI.
//
// Config format: UTF-8 `key = value` lines, '#' starts a comment. Keys are
// p1 p2 p3 n1 n2 n3 omega1 omega2 kappa3t kappa3r and optional
// kappa3r_assumed. Values are linear (watts / dimensionless).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "twoway/model.hpp"

namespace twoway::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Locale-independent strict parse of a whole string as a double.
inline std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

/// 17 significant digits, '.' separator, independent of the C locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

inline SystemConfig parse_config(std::istream& in, const std::string& source = "config") {
  static const std::vector<std::string> required = {"p1", "p2", "p3", "n1", "n2",
                                                    "n3", "omega1", "omega2", "kappa3t", "kappa3r"};
  std::map<std::string, double> values;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (line_no == 1 && body.starts_with("\xEF\xBB\xBF")) body.remove_prefix(3);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const auto value = parse_double(body.substr(eq + 1));
    const bool known = key == "kappa3r_assumed" ||
                       std::find(required.begin(), required.end(), key) != required.end();
    if (!known) fail("unknown key '" + key + "'");
    if (!value) fail("value for '" + key + "' is not a finite number");
    if (values.contains(key)) fail("duplicate key '" + key + "'");
    values[key] = *value;
  }
  for (const auto& key : required) {
    if (!values.contains(key)) {
      throw ConfigError(source + ": missing required key '" + key + "'");
    }
  }
  SystemConfig cfg;
  cfg.p1 = values["p1"];
  cfg.p2 = values["p2"];
  cfg.p3 = values["p3"];
  cfg.n1 = values["n1"];
  cfg.n2 = values["n2"];
  cfg.n3 = values["n3"];
  cfg.omega1 = values["omega1"];
  cfg.omega2 = values["omega2"];
  cfg.relay = {values["kappa3t"], values["kappa3r"]};
  if (values.contains("kappa3r_assumed")) cfg.assumed_kappa_r = values["kappa3r_assumed"];
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

inline SystemConfig parse_config(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse_config(in, source);
}

/// P2 and P3 as multiples of P1.
struct PowerCoupling {
  double p2_over_p1 = 1.0;
  double p3_over_p1 = 0.5;
};

/// Parses rules like "p2=p1, p3=p1/2", "p3=0.5*p1", "p2 = p1*2".
inline PowerCoupling parse_coupling(std::string_view rule) {
  PowerCoupling out;
  while (!rule.empty()) {
    const auto comma = rule.find(',');
    const auto item = trim(rule.substr(0, comma));
    rule = comma == std::string_view::npos ? std::string_view{} : rule.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("coupling: expected 'pK=<expr in p1>'");
    const auto lhs = trim(item.substr(0, eq));
    std::string rhs;
    for (char ch : item.substr(eq + 1)) {
      if (ch != ' ' && ch != '\t') rhs += ch;
    }
    double multiplier = 0.0;
    const auto number = [&](std::string_view s) {
      const auto v = parse_double(s);
      if (!v) throw ConfigError("coupling: bad number '" + std::string(s) + "'");
      return *v;
    };
    const std::string_view r = rhs;
    if (r == "p1") {
      multiplier = 1.0;
    } else if (r.starts_with("p1/")) {
      multiplier = 1.0 / number(r.substr(3));
    } else if (r.starts_with("p1*")) {
      multiplier = number(r.substr(3));
    } else if (r.ends_with("*p1")) {
      multiplier = number(r.substr(0, r.size() - 3));
    } else {
      throw ConfigError("coupling: unsupported expression '" + rhs + "'");
    }
    if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
      throw ConfigError("coupling: multipliers must be positive");
    }
    if (lhs == "p2") {
      out.p2_over_p1 = multiplier;
    } else if (lhs == "p3") {
      out.p3_over_p1 = multiplier;
    } else {
      throw ConfigError("coupling: left side must be p2 or p3");
    }
  }
  return out;
}

inline double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

/// Transmit power grid in dBW. A single point is allowed when start == stop.
struct SweepSpec {
  double p1_dbw_start = 0.0;
  double p1_dbw_stop = 0.0;
  std::size_t n_points = 1;
  PowerCoupling coupling;

  void validate() const {
    if (n_points == 1) {
      if (p1_dbw_start != p1_dbw_stop) throw ConfigError("a single point needs start == stop");
      return;
    }
    if (n_points < 2 || !(p1_dbw_start < p1_dbw_stop)) {
      throw ConfigError("sweep needs start < stop and at least 2 points");
    }
  }

  std::vector<double> grid() const {
    validate();
    std::vector<double> out(n_points);
    for (std::size_t k = 0; k < n_points; ++k) {
      out[k] = n_points == 1 ? p1_dbw_start
                             : p1_dbw_start + (p1_dbw_stop - p1_dbw_start) *
                                                  static_cast<double>(k) /
                                                  static_cast<double>(n_points - 1);
    }
    return out;
  }

  SystemConfig apply(const SystemConfig& base, double p1_dbw) const {
    const double p1 = dbw_to_watts(p1_dbw);
    return base.with_powers(p1, p1 * coupling.p2_over_p1, p1 * coupling.p3_over_p1);
  }
};

/// Parses "start:stop" or a single value.
inline std::pair<double, double> parse_range(std::string_view text) {
  const auto colon = text.find(':');
  const auto first = parse_double(text.substr(0, colon));
  if (!first) throw ConfigError("bad power range '" + std::string(text) + "'");
  if (colon == std::string_view::npos) return {*first, *first};
  const auto second = parse_double(text.substr(colon + 1));
  if (!second) throw ConfigError("bad power range '" + std::string(text) + "'");
  return {*first, *second};
}

}  // namespace twoway::io
