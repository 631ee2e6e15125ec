#pragma once

// Run configuration. One JSON document per run; every key is optional.
//
//   {
//     "mass": 1, "charge": 1, "amplitude": 1,
//     "k": 1,                          gauge wavenumber (lattice runs: must be 2 pi j / L)
//     "lattice": {"ring_length": 6.283185307179586, "n_max": 1,
//                 "spins": "both" | "1" | "2", "harmonic": j},
//     "band": {"edge_index": n} | {"depth": dE},
//     "margin": lattice steps between band edge and n_max (>= j),
//     "cutoff": continuum momentum cutoff r (default 50 |k|),
//     "scan": {"cutoffs": [...], "ring_lengths": [...], "momentum_cutoff": P,
//              "band_edges": [...], "band_depths": [...],
//              "expected_slope": s, "slope_tolerance": t}
//   }

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dirac_lab/common.hpp"
#include "dirac_lab/continuum.hpp"
#include "dirac_lab/fock_space.hpp"
#include "dirac_lab/mode_basis.hpp"
#include "dirac_lab/spectral.hpp"

namespace dirac_lab {

using Json = nlohmann::ordered_json;

struct ScanRanges {
  std::vector<double> cutoffs;
  std::vector<double> ring_lengths;
  std::optional<double> momentum_cutoff;
  std::vector<int> band_edges;
  std::vector<double> band_depths;
  std::optional<double> expected_slope;
  double slope_tolerance = 0.05;

  bool empty() const {
    return cutoffs.empty() && ring_lengths.empty() && band_edges.empty() && band_depths.empty();
  }
};

struct RunConfig {
  double mass = 1.0;
  double charge = 1.0;
  double amplitude = 1.0;
  std::optional<double> k;

  bool has_lattice = false;
  double ring_length = 2.0 * kPi;
  int n_max = 1;
  SpinFilter spins = SpinFilter::kBoth;
  std::optional<int> harmonic;

  std::optional<int> band_edge;
  std::optional<double> band_depth;
  std::optional<int> margin;
  std::optional<double> cutoff;

  ScanRanges scan;

  ModeParams mode_params() const { return {mass, ring_length, n_max, charge}; }

  /// Gauge profile on the lattice. A configured k must be a lattice wavenumber.
  GaugeProfile gauge() const { return gauge_for(ring_length); }

  GaugeProfile gauge_for(double length) const {
    if (k) {
      auto g = GaugeProfile::lattice(amplitude, *k, length);
      if (harmonic && *harmonic != g.harmonic && length == ring_length) {
        throw ConfigError("k and lattice.harmonic disagree: k corresponds to harmonic " +
                          std::to_string(g.harmonic));
      }
      return g;
    }
    const int j = harmonic.value_or(1);
    if (j < 1) throw ConfigError("lattice.harmonic must be >= 1");
    return {amplitude, j, length};
  }

  /// Physical wavenumber: configured k, else the lattice harmonic, else 1.
  double wavenumber() const {
    if (k) return *k;
    if (has_lattice || harmonic) return gauge().k();
    return 1.0;
  }

  int required_margin() const {
    const int j = gauge().harmonic;
    const int m = margin.value_or(j);
    if (m < j) {
      throw ConfigError("margin " + std::to_string(m) + " is below the gauge harmonic " +
                        std::to_string(j) + "; the band sums need at least j lattice steps");
    }
    return m;
  }

  /// Band from "band"; without one, the band whose edge leaves exactly the
  /// required margin. Nothing when no such band fits the lattice.
  std::optional<BandSpec> band() const {
    const auto params = mode_params();
    if (band_depth) {
      BandSpec b{*band_depth};
      b.validate();
      return b;
    }
    if (band_edge) {
      if (*band_edge < 0) throw ConfigError("band.edge_index must be >= 0");
      return BandSpec::from_edge_index(params, *band_edge);
    }
    const int edge = n_max - required_margin();
    if (edge < 0) return std::nullopt;
    return BandSpec::from_edge_index(params, edge);
  }

  ContinuumParams continuum() const {
    ContinuumParams c;
    c.mass = mass;
    c.k = wavenumber();
    c.amplitude = amplitude;
    c.charge = charge;
    c.cutoff = cutoff.value_or(50.0 * std::abs(c.k));
    return c;
  }

  ModeSumConfig mode_sum(const VacuumSpec& vac, unsigned workers = 1) const {
    ModeSumConfig cfg{mode_params(), vac, gauge(), spins, required_margin(), workers};
    return cfg;
  }

  void validate() const {
    mode_params().validate();
    if (band_depth && band_edge) throw ConfigError("band: give either depth or edge_index");
    // Continuum-only runs may use a k that does not fit the default ring.
    if (has_lattice || harmonic || band_depth || band_edge || margin) {
      gauge();
      required_margin();
      band();
    }
    if (cutoff && !(*cutoff > 0.0)) throw ConfigError("cutoff must be > 0");
    if (scan.momentum_cutoff && !(*scan.momentum_cutoff > 0.0)) {
      throw ConfigError("scan.momentum_cutoff must be > 0");
    }
    if (!(scan.slope_tolerance > 0.0)) throw ConfigError("scan.slope_tolerance must be > 0");
  }
};

inline std::string spin_filter_name(SpinFilter f) {
  switch (f) {
    case SpinFilter::kSpin1: return "1";
    case SpinFilter::kSpin2: return "2";
    default: return "both";
  }
}

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& known,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + where + key + "'");
  }
}

template <typename T>
T get_as(const Json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("'" + where + key + "' has the wrong type");
  }
}

template <typename T>
void read_opt(const Json& obj, const std::string& key, std::optional<T>& out,
              const std::string& where = "") {
  if (obj.contains(key)) out = get_as<T>(obj, key, where);
}

template <typename T>
void read_val(const Json& obj, const std::string& key, T& out, const std::string& where = "") {
  if (obj.contains(key)) out = get_as<T>(obj, key, where);
}

}  // namespace detail

inline RunConfig parse_config(const Json& j) {
  using detail::read_opt;
  using detail::read_val;
  RunConfig c;
  if (j.is_null()) return c;
  detail::reject_unknown(
      j, {"mass", "charge", "amplitude", "k", "lattice", "band", "margin", "cutoff", "scan"}, "");
  read_val(j, "mass", c.mass);
  read_val(j, "charge", c.charge);
  read_val(j, "amplitude", c.amplitude);
  read_opt(j, "k", c.k);
  read_opt(j, "margin", c.margin);
  read_opt(j, "cutoff", c.cutoff);
  if (j.contains("lattice")) {
    const auto& l = j.at("lattice");
    detail::reject_unknown(l, {"ring_length", "n_max", "spins", "harmonic"}, "lattice.");
    c.has_lattice = true;
    read_val(l, "ring_length", c.ring_length, "lattice.");
    read_val(l, "n_max", c.n_max, "lattice.");
    read_opt(l, "harmonic", c.harmonic, "lattice.");
    if (l.contains("spins")) {
      const auto s = detail::get_as<std::string>(l, "spins", "lattice.");
      if (s == "both") c.spins = SpinFilter::kBoth;
      else if (s == "1") c.spins = SpinFilter::kSpin1;
      else if (s == "2") c.spins = SpinFilter::kSpin2;
      else throw ConfigError("lattice.spins must be \"both\", \"1\" or \"2\"");
    }
  }
  if (j.contains("band")) {
    const auto& b = j.at("band");
    detail::reject_unknown(b, {"edge_index", "depth"}, "band.");
    read_opt(b, "edge_index", c.band_edge, "band.");
    read_opt(b, "depth", c.band_depth, "band.");
  }
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    detail::reject_unknown(s,
                           {"cutoffs", "ring_lengths", "momentum_cutoff", "band_edges",
                            "band_depths", "expected_slope", "slope_tolerance"},
                           "scan.");
    read_val(s, "cutoffs", c.scan.cutoffs, "scan.");
    read_val(s, "ring_lengths", c.scan.ring_lengths, "scan.");
    read_opt(s, "momentum_cutoff", c.scan.momentum_cutoff, "scan.");
    read_val(s, "band_edges", c.scan.band_edges, "scan.");
    read_val(s, "band_depths", c.scan.band_depths, "scan.");
    read_opt(s, "expected_slope", c.scan.expected_slope, "scan.");
    read_val(s, "slope_tolerance", c.scan.slope_tolerance, "scan.");
  }
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

/// Fully resolved echo of a configuration (defaults filled in).
inline Json config_echo(const RunConfig& c) {
  Json j;
  j["mass"] = c.mass;
  j["charge"] = c.charge;
  j["amplitude"] = c.amplitude;
  j["k"] = c.wavenumber();
  if (c.has_lattice || c.harmonic) {
    j["lattice"] = {{"ring_length", c.ring_length},
                    {"n_max", c.n_max},
                    {"spins", spin_filter_name(c.spins)},
                    {"harmonic", c.gauge().harmonic}};
  }
  if (c.band_edge) j["band"] = {{"edge_index", *c.band_edge}};
  if (c.band_depth) j["band"] = {{"depth", *c.band_depth}};
  if (c.margin) j["margin"] = *c.margin;
  if (c.cutoff) j["cutoff"] = *c.cutoff;
  if (!c.scan.empty()) {
    Json s;
    if (!c.scan.cutoffs.empty()) s["cutoffs"] = c.scan.cutoffs;
    if (!c.scan.ring_lengths.empty()) s["ring_lengths"] = c.scan.ring_lengths;
    if (c.scan.momentum_cutoff) s["momentum_cutoff"] = *c.scan.momentum_cutoff;
    if (!c.scan.band_edges.empty()) s["band_edges"] = c.scan.band_edges;
    if (!c.scan.band_depths.empty()) s["band_depths"] = c.scan.band_depths;
    if (c.scan.expected_slope) s["expected_slope"] = *c.scan.expected_slope;
    s["slope_tolerance"] = c.scan.slope_tolerance;
    j["scan"] = s;
  }
  return j;
}

}  // namespace dirac_lab
