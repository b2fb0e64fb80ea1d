#include "cfie/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "cfie/errors.hpp"

namespace cfie {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in number '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw std::invalid_argument("expected a boolean, got '" + s + "'");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentKind to_kind(const std::string& s) {
  for (ExperimentKind k : {ExperimentKind::solve, ExperimentKind::refine, ExperimentKind::freq,
                           ExperimentKind::resonance}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown experiment '" + s + "' (expected solve, refine, freq or resonance)");
}

std::vector<SchemeDescriptor> to_schemes(const std::string& s) {
  std::vector<SchemeDescriptor> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_scheme(item));
  return out;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::solve: return "solve";
    case ExperimentKind::refine: return "refine";
    case ExperimentKind::freq: return "freq";
    case ExperimentKind::resonance: return "resonance";
  }
  return "?";
}

SchemeOptions ExperimentConfig::scheme_options() const {
  SchemeOptions o;
  o.dphi = dphi;
  o.compose_dyadic = compose_dyadic;
  o.inner_tol = inner_tol;
  o.power_tol = power_tol;
  o.seed = seed;
  o.branching = branching;
  return o;
}

std::vector<double> parse_frequency_list(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() < 3 || parts.size() > 4) throw std::invalid_argument("range must be lo:hi:count[:log]");
    const double lo = to_double(parts[0]), hi = to_double(parts[1]);
    const long count = to_long(parts[2]);
    const bool log = parts.size() == 4;
    if (log && parts[3] != "log") throw std::invalid_argument("range suffix must be 'log'");
    if (count < 1) throw std::invalid_argument("range count must be positive");
    if (log && !(lo > 0.0 && hi > 0.0)) throw std::invalid_argument("log range needs positive bounds");
    std::vector<double> out;
    for (long i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      out.push_back(log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item));
  return out;
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ParseError("config: " + msg); };
  if (c.geometry.empty()) fail("missing geometry");
  if (c.geometry != "cube" && c.geometry != "off") fail("geometry must be cube or off");
  if (c.geometry == "off" && c.off.empty()) fail("geometry = off needs an off path");
  if (!(c.side > 0.0)) fail("side must be positive");
  if (c.n < 1) fail("n must be at least 1");
  if (c.levels.empty()) fail("levels must not be empty");
  for (int l : c.levels) {
    if (l < 0 || l > 6) fail("levels must lie in [0, 6]");
  }
  if (c.f.empty()) fail("at least one frequency is required");
  for (double f : c.f) {
    if (!(f > 0.0) || !std::isfinite(f)) fail("frequencies must be positive");
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (c.schemes.empty()) fail("at least one scheme is required");
  for (const auto& [name, v] : {std::pair{"tol", c.tol}, {"inner_tol", c.inner_tol}, {"power_tol", c.power_tol}}) {
    if (!(v > 0.0 && v < 1.0)) fail(std::string(name) + " must lie in (0, 1)");
  }
  if (c.restart < 0) fail("restart must be non-negative");
  if (c.max_iter < 1) fail("max_iter must be at least 1");
  if (c.branching < 2) fail("branching must be at least 2");
  if (c.refine_peak < 0) fail("refine_peak must be non-negative");
  if (c.out.empty()) fail("out must not be empty");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"geometry", [&](const std::string& v) { c.geometry = v; }},
      {"side", [&](const std::string& v) { c.side = to_double(v); }},
      {"n", [&](const std::string& v) { c.n = static_cast<int>(to_long(v)); }},
      {"levels",
       [&](const std::string& v) {
         c.levels.clear();
         for (const auto& item : split(v, ',')) c.levels.push_back(static_cast<int>(to_long(item)));
       }},
      {"off", [&](const std::string& v) { c.off = v; }},
      {"f", [&](const std::string& v) { c.f = parse_frequency_list(v); }},
      {"alpha", [&](const std::string& v) { c.alpha = to_double(v); }},
      {"schemes", [&](const std::string& v) { c.schemes = to_schemes(v); }},
      {"precond", [&](const std::string& v) { c.schemes = to_schemes(v); }},
      {"dphi",
       [&](const std::string& v) {
         if (v == "jacobi") {
           c.dphi = DPhiMode::jacobi;
           c.compose_dyadic = false;
         } else if (v == "dyadic") {
           c.dphi = DPhiMode::dyadic;
           c.compose_dyadic = false;
         } else if (v == "jacobi+dyadic") {
           c.dphi = DPhiMode::jacobi;
           c.compose_dyadic = true;
         } else {
           throw std::invalid_argument("dphi must be jacobi, dyadic or jacobi+dyadic");
         }
       }},
      {"inner_tol", [&](const std::string& v) { c.inner_tol = to_double(v); }},
      {"power_tol", [&](const std::string& v) { c.power_tol = to_double(v); }},
      {"tol", [&](const std::string& v) { c.tol = to_double(v); }},
      {"seed", [&](const std::string& v) { c.seed = static_cast<std::uint64_t>(to_long(v)); }},
      {"restart", [&](const std::string& v) { c.restart = static_cast<int>(to_long(v)); }},
      {"max_iter", [&](const std::string& v) { c.max_iter = static_cast<int>(to_long(v)); }},
      {"branching", [&](const std::string& v) { c.branching = static_cast<int>(to_long(v)); }},
      {"experiment", [&](const std::string& v) { c.experiment = to_kind(v); }},
      {"refine_peak", [&](const std::string& v) { c.refine_peak = static_cast<int>(to_long(v)); }},
      {"timing", [&](const std::string& v) { c.timing = to_bool(v); }},
      {"cond", [&](const std::string& v) { c.cond = to_bool(v); }},
      {"out", [&](const std::string& v) { c.out = v; }},
  };
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    try {
      it->second(value);
    } catch (const std::exception& e) {
      throw ParseError("config line " + std::to_string(lineno) + ": bad value for '" + key + "': " + e.what());
    }
  }
  validate_config(c);
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto list = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& item : items) {
      if (!s.empty()) s += ", ";
      s += fmt(item);
    }
    return s;
  };
  out << "geometry = " << c.geometry << '\n';
  out << "side = " << num(c.side) << '\n';
  out << "n = " << c.n << '\n';
  out << "levels = " << list(c.levels, [](int l) { return std::to_string(l); }) << '\n';
  if (!c.off.empty()) out << "off = " << c.off << '\n';
  out << "f = " << list(c.f, num) << '\n';
  out << "alpha = " << num(c.alpha) << '\n';
  out << "schemes = " << list(c.schemes, [](const SchemeDescriptor& s) { return s.name(); }) << '\n';
  out << "dphi = " << (c.dphi == DPhiMode::dyadic ? "dyadic" : c.compose_dyadic ? "jacobi+dyadic" : "jacobi") << '\n';
  out << "inner_tol = " << num(c.inner_tol) << '\n';
  out << "power_tol = " << num(c.power_tol) << '\n';
  out << "tol = " << num(c.tol) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "restart = " << c.restart << '\n';
  out << "max_iter = " << c.max_iter << '\n';
  out << "branching = " << c.branching << '\n';
  out << "experiment = " << to_string(c.experiment) << '\n';
  out << "refine_peak = " << c.refine_peak << '\n';
  out << "timing = " << (c.timing ? "true" : "false") << '\n';
  out << "cond = " << (c.cond ? "true" : "false") << '\n';
  out << "out = " << c.out << '\n';
  return out.str();
}

}  // namespace cfie
