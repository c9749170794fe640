// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bspd/estimators.hpp"

namespace bspd::harness {

enum class ExperimentKind { snr_sweep, pilot_sweep, bandwidth_sweep, direction_prob, capture_ratio, validate };

inline constexpr ExperimentKind kAllKinds[] = {ExperimentKind::snr_sweep,      ExperimentKind::pilot_sweep,
                                               ExperimentKind::bandwidth_sweep, ExperimentKind::direction_prob,
                                               ExperimentKind::capture_ratio,  ExperimentKind::validate};

inline std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::snr_sweep: return "snr-sweep";
    case ExperimentKind::pilot_sweep: return "pilot-sweep";
    case ExperimentKind::bandwidth_sweep: return "bandwidth-sweep";
    case ExperimentKind::direction_prob: return "direction-prob";
    case ExperimentKind::capture_ratio: return "capture-ratio";
    case ExperimentKind::validate: return "validate";
  }
  return "?";
}

// Also accepts the CLI subcommand spelling (sweep-snr etc.).
inline std::optional<ExperimentKind> parse_kind(std::string_view s) {
  for (auto k : kAllKinds)
    if (to_string(k) == s) return k;
  if (s == "sweep-snr") return ExperimentKind::snr_sweep;
  if (s == "sweep-pilots") return ExperimentKind::pilot_sweep;
  if (s == "sweep-bandwidth") return ExperimentKind::bandwidth_sweep;
  return std::nullopt;
}

// Name of the swept quantity as written to the CSV `sweep_name` column.
inline std::string_view sweep_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::snr_sweep:
    case ExperimentKind::direction_prob: return "snr_db";
    case ExperimentKind::pilot_sweep: return "pilot_slots";
    case ExperimentKind::bandwidth_sweep: return "bandwidth_ghz";
    case ExperimentKind::capture_ratio: return "window_halfwidth";
    case ExperimentKind::validate: return "none";
  }
  return "?";
}

inline std::vector<double> default_sweep(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::snr_sweep: return {-10, -5, 0, 5, 10, 15, 20};
    case ExperimentKind::pilot_sweep: return {4, 8, 12, 16, 20};
    case ExperimentKind::bandwidth_sweep: {
      std::vector<double> v;
      for (int b = 1; b <= 15; ++b) v.push_back(b);
      return v;
    }
    case ExperimentKind::direction_prob: return {-35, -30, -25, -20, -15, -10, -5, 0};
    case ExperimentKind::capture_ratio: return {0, 1, 2, 3, 4, 5, 6, 7, 8};
    case ExperimentKind::validate: return {};
  }
  return {};
}

inline std::size_t default_trials(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::direction_prob: return 200;
    case ExperimentKind::capture_ratio:
    case ExperimentKind::validate: return 1;
    default: return 100;
  }
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::snr_sweep;
  std::vector<double> sweep_values;  // empty: the kind's default
  std::size_t trials = 0;            // 0: the kind's default
  std::uint64_t base_seed = 1;
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  SystemConfig config;
  std::string output;

  double tau_max = kDefaultMaxDelay;
  double snr_db = 20.0;       // fixed SNR of the pilot and bandwidth sweeps
  std::size_t sparsity = 27;  // SOMP / OMP iterations
  std::size_t omp_block = 16;
  BlockRepresentative omp_representative = BlockRepresentative::first;
  GridEdge grid_edge = GridEdge::periodic;
  bool on_grid = false;  // snap sampled path directions onto the grid
  std::vector<GridIndex> directions{192, 16, 89};  // zero-based; direction-prob channel
  unsigned threads = 1;

  std::vector<double> effective_sweep() const { return sweep_values.empty() ? default_sweep(kind) : sweep_values; }
  std::size_t effective_trials() const { return trials == 0 ? default_trials(kind) : trials; }

  // Throws InvalidParameter naming the first violated field.
  void validate() const {
    config.validate();
    const auto sweep = effective_sweep();
    if (kind != ExperimentKind::validate && sweep.empty())
      throw InvalidParameter("sweep_values: must not be empty");
    if (!std::is_sorted(sweep.begin(), sweep.end()))
      throw InvalidParameter("sweep_values: must be sorted ascending");
    if (schemes.empty()) throw InvalidParameter("schemes: must not be empty");
    if (!(tau_max > 0.0)) throw InvalidParameter("tau_max_s: must be positive");
    if (omp_block < 1) throw InvalidParameter("omp_block: must be >= 1");
    for (double v : sweep) {
      if (!std::isfinite(v)) throw InvalidParameter("sweep_values: must be finite");
      if (kind == ExperimentKind::pilot_sweep && (v < 1 || v != std::floor(v)))
        throw InvalidParameter("sweep_values: pilot counts must be positive integers");
      if (kind == ExperimentKind::capture_ratio && (v < 0 || v != std::floor(v)))
        throw InvalidParameter("sweep_values: window halfwidths must be non-negative integers");
      if (kind == ExperimentKind::bandwidth_sweep && !(v >= 0.0 && v * 1e9 < config.carrier_hz))
        throw InvalidParameter("sweep_values: bandwidths must satisfy 0 <= B < f_c");
    }
    if (kind == ExperimentKind::direction_prob) {
      if (directions.empty()) throw InvalidParameter("directions: must not be empty");
      for (auto d : directions)
        if (d >= config.n_antennas) throw InvalidParameter("directions: grid index out of range");
    }
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto c = s.find(',');
    const auto item = trim(s.substr(0, c));
    if (!item.empty()) out.push_back(item);
    if (c == std::string_view::npos) break;
    s = s.substr(c + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view s) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc{} || r.ptr != end) throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::size_t parse_count(std::string_view s) { return parse_number<std::size_t>(s); }

}  // namespace detail

inline std::vector<Scheme> parse_scheme_list(std::string_view s) {
  std::vector<Scheme> out;
  for (auto item : detail::split_list(s)) {
    const auto k = parse_scheme(item);
    if (!k) throw std::invalid_argument("unknown scheme '" + std::string(item) + "'");
    if (std::find(out.begin(), out.end(), *k) == out.end()) out.push_back(*k);
  }
  if (out.empty()) throw std::invalid_argument("empty scheme list");
  return out;
}

// Flat `key = value` text; `#` starts a comment. Unknown keys, duplicate keys
// and malformed values are rejected with the line number and key. A `kind`
// from the caller must agree with any `experiment` line in the text.
inline ExperimentSpec parse_config(std::string_view text, std::optional<ExperimentKind> kind = std::nullopt) {
  using Setter = std::function<void(ExperimentSpec&, std::string_view)>;
  using detail::parse_count;
  using detail::parse_number;
  static const std::map<std::string, Setter, std::less<>> setters = {
      {"experiment",
       [](ExperimentSpec& s, std::string_view v) {
         const auto k = parse_kind(v);
         if (!k) throw std::invalid_argument("unknown experiment '" + std::string(v) + "'");
         s.kind = *k;
       }},
      {"sweep_values",
       [](ExperimentSpec& s, std::string_view v) {
         s.sweep_values.clear();
         for (auto item : detail::split_list(v)) s.sweep_values.push_back(parse_number<double>(item));
       }},
      {"trials", [](ExperimentSpec& s, std::string_view v) { s.trials = parse_count(v); }},
      {"seed", [](ExperimentSpec& s, std::string_view v) { s.base_seed = parse_number<std::uint64_t>(v); }},
      {"schemes", [](ExperimentSpec& s, std::string_view v) { s.schemes = parse_scheme_list(v); }},
      {"output", [](ExperimentSpec& s, std::string_view v) { s.output = std::string(v); }},
      {"n_antennas", [](ExperimentSpec& s, std::string_view v) { s.config.n_antennas = parse_count(v); }},
      {"n_rf", [](ExperimentSpec& s, std::string_view v) { s.config.n_rf = parse_count(v); }},
      {"n_subcarriers", [](ExperimentSpec& s, std::string_view v) { s.config.n_subcarriers = parse_count(v); }},
      {"n_users", [](ExperimentSpec& s, std::string_view v) { s.config.n_users = parse_count(v); }},
      {"pilot_slots", [](ExperimentSpec& s, std::string_view v) { s.config.pilot_slots = parse_count(v); }},
      {"carrier_hz", [](ExperimentSpec& s, std::string_view v) { s.config.carrier_hz = parse_number<double>(v); }},
      {"bandwidth_hz", [](ExperimentSpec& s, std::string_view v) { s.config.bandwidth_hz = parse_number<double>(v); }},
      {"n_paths", [](ExperimentSpec& s, std::string_view v) { s.config.n_paths = parse_count(v); }},
      {"window_halfwidth", [](ExperimentSpec& s, std::string_view v) { s.config.window_halfwidth = parse_count(v); }},
      {"tau_max_s", [](ExperimentSpec& s, std::string_view v) { s.tau_max = parse_number<double>(v); }},
      {"snr_db", [](ExperimentSpec& s, std::string_view v) { s.snr_db = parse_number<double>(v); }},
      {"sparsity", [](ExperimentSpec& s, std::string_view v) { s.sparsity = parse_count(v); }},
      {"omp_block", [](ExperimentSpec& s, std::string_view v) { s.omp_block = parse_count(v); }},
      {"omp_representative",
       [](ExperimentSpec& s, std::string_view v) {
         if (v == "first") s.omp_representative = BlockRepresentative::first;
         else if (v == "center") s.omp_representative = BlockRepresentative::center;
         else throw std::invalid_argument("expected 'first' or 'center'");
       }},
      {"grid_edge",
       [](ExperimentSpec& s, std::string_view v) {
         if (v == "periodic") s.grid_edge = GridEdge::periodic;
         else if (v == "clamp") s.grid_edge = GridEdge::clamp;
         else throw std::invalid_argument("expected 'periodic' or 'clamp'");
       }},
      {"on_grid",
       [](ExperimentSpec& s, std::string_view v) {
         if (v == "true") s.on_grid = true;
         else if (v == "false") s.on_grid = false;
         else throw std::invalid_argument("expected 'true' or 'false'");
       }},
      {"directions",
       [](ExperimentSpec& s, std::string_view v) {
         s.directions.clear();
         for (auto item : detail::split_list(v)) {
           const auto one_based = parse_count(item);
           if (one_based < 1) throw std::invalid_argument("grid indices are 1-based");
           s.directions.push_back(one_based - 1);
         }
       }},
      {"threads", [](ExperimentSpec& s, std::string_view v) { s.threads = static_cast<unsigned>(parse_count(v)); }},
  };

  ExperimentSpec spec;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  std::string_view rest = text;
  while (!rest.empty()) {
    ++line_no;
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "missing key");
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(line_no, std::string(key), "unknown key");
    if (auto prev = seen.find(key); prev != seen.end())
      throw ConfigError(line_no, std::string(key), "duplicate key (first set on line " + std::to_string(prev->second) + ")");
    seen.emplace(std::string(key), line_no);
    if (value.empty()) throw ConfigError(line_no, std::string(key), "missing value");
    try {
      it->second(spec, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, std::string(key), e.what());
    }
  }
  if (kind) {
    if (auto e = seen.find("experiment"); e != seen.end() && spec.kind != *kind)
      throw ConfigError(e->second, "experiment",
                        "config sets '" + std::string(to_string(spec.kind)) + "' but '" +
                            std::string(to_string(*kind)) + "' was requested");
    spec.kind = *kind;
  }
  try {
    spec.validate();
  } catch (const InvalidParameter& e) {
    std::string msg = e.what();
    std::string field = msg.substr(0, msg.find(':'));
    if (field.rfind("SystemConfig.", 0) == 0) field = field.substr(13);
    const auto where = seen.find(field);
    throw ConfigError(where == seen.end() ? 0 : where->second, field, msg);
  }
  return spec;
}

inline ExperimentSpec load_config(const std::string& path, std::optional<ExperimentKind> kind = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "", "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), kind);
}

}  // namespace bspd::harness
