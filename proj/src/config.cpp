#include "mutualhold/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mutualhold {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* last = value.data() + value.size();
  const auto res = std::from_chars(value.data(), last, out);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument("config key '" + key + "': bad number '" +
                                value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* last = value.data() + value.size();
  const auto res = std::from_chars(value.data(), last, out);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument("config key '" + key + "': bad integer '" +
                                value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on")
    return true;
  if (value == "false" || value == "0" || value == "no" || value == "off")
    return false;
  throw std::invalid_argument("config key '" + key + "': bad flag '" + value +
                              "'");
}

// Locale-independent shortest round-trip rendering.
std::string render(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "horizon") horizon = parse_double(key, value);
  else if (key == "steps") steps = parse_u64(key, value);
  else if (key == "paths") paths = parse_u64(key, value);
  else if (key == "particles") particles = parse_u64(key, value);
  else if (key == "drift") drift = value;
  else if (key == "ou_level") ou_level = parse_double(key, value);
  else if (key == "drift_value") drift_value = parse_double(key, value);
  else if (key == "drift_slope") drift_slope = parse_double(key, value);
  else if (key == "drift_intercept") drift_intercept = parse_double(key, value);
  else if (key == "regime") regime = value;
  else if (key == "vol") vol = value;
  else if (key == "sigma") sigma = parse_double(key, value);
  else if (key == "vol_slope") vol_slope = parse_double(key, value);
  else if (key == "vol_intercept") vol_intercept = parse_double(key, value);
  else if (key == "vol_floor") vol_floor = parse_double(key, value);
  else if (key == "law") law = value;
  else if (key == "rate") rate = parse_double(key, value);
  else if (key == "x0") x0 = parse_double(key, value);
  else if (key == "q") q = parse_double(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "absorption") absorption = value;
  else if (key == "crn") crn = parse_bool(key, value);
  else if (key == "projection") projection = parse_bool(key, value);
  else if (key == "iterates") iterates = parse_u64(key, value);
  else if (key == "stop_tol") stop_tol = parse_double(key, value);
  else if (key == "threads") threads = parse_u64(key, value);
  else if (key == "store_paths") store_paths = parse_bool(key, value);
  else if (key == "out") out = value;
  else
    throw std::invalid_argument("unknown config key '" + key + "'");
}

void ExperimentConfig::apply_full_scale() {
  paths = 10000;
  particles = 10000;
  steps = 200;
  iterates = 200;
}

// Execution details that cannot change any numeric output (out, threads,
// store_paths) are excluded: equal hashes must mean equal results.
std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os << "absorption=" << absorption << '\n'
     << "crn=" << (crn ? "true" : "false") << '\n'
     << "drift=" << drift << '\n'
     << "drift_intercept=" << render(drift_intercept) << '\n'
     << "drift_slope=" << render(drift_slope) << '\n'
     << "drift_value=" << render(drift_value) << '\n'
     << "horizon=" << render(horizon) << '\n'
     << "iterates=" << iterates << '\n'
     << "law=" << law << '\n'
     << "ou_level=" << render(ou_level) << '\n'
     << "particles=" << particles << '\n'
     << "paths=" << paths << '\n'
     << "projection=" << (projection ? "true" : "false") << '\n'
     << "q=" << render(q) << '\n'
     << "rate=" << render(rate) << '\n'
     << "regime=" << regime << '\n'
     << "seed=" << seed << '\n'
     << "sigma=" << render(sigma) << '\n'
     << "steps=" << steps << '\n'
     << "stop_tol=" << render(stop_tol) << '\n'
     << "vol=" << vol << '\n'
     << "vol_floor=" << render(vol_floor) << '\n'
     << "vol_intercept=" << render(vol_intercept) << '\n'
     << "vol_slope=" << render(vol_slope) << '\n'
     << "x0=" << render(x0) << '\n';
  return os.str();
}

std::string ExperimentConfig::hash_hex() const {
  // FNV-1a, 64-bit.
  const std::string text = canonical_text();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

DriftVolSpec ExperimentConfig::drift_vol_spec() const {
  DriftSpec d;
  if (drift == "ou") d = DriftSpec::ornstein_uhlenbeck(ou_level);
  else if (drift == "constant") d = DriftSpec::constant(drift_value);
  else if (drift == "affine") d = DriftSpec::affine(drift_slope, drift_intercept);
  else
    throw std::invalid_argument("unknown drift family '" + drift + "'");

  VolSpec v;
  if (vol == "constant") v = VolSpec::constant(sigma);
  else if (vol == "affine") v = VolSpec::affine(vol_slope, vol_intercept, vol_floor);
  else
    throw std::invalid_argument("unknown vol family '" + vol + "'");

  SignRegime r;
  if (regime == "nonpositive") r = SignRegime::NonPositive;
  else if (regime == "positive") r = SignRegime::Positive;
  else if (regime == "signchanging") r = SignRegime::SignChanging;
  else
    throw std::invalid_argument("unknown sign regime '" + regime + "'");
  return DriftVolSpec(d, v, r);
}

InitialLaw ExperimentConfig::initial_law() const {
  if (law == "exponential") return InitialLaw::exponential(rate);
  if (law == "pointmass") return InitialLaw::point_mass(x0);
  throw std::invalid_argument("unknown initial law '" + law + "'");
}

AbsorptionScheme ExperimentConfig::absorption_scheme() const {
  if (absorption == "bridge") return AbsorptionScheme::BrownianBridge;
  if (absorption == "discrete") return AbsorptionScheme::Discrete;
  throw std::invalid_argument("unknown absorption scheme '" + absorption +
                              "'");
}

SimulateOptions ExperimentConfig::simulate_options() const {
  SimulateOptions o;
  o.horizon = horizon;
  o.steps = steps;
  o.particles = particles;
  o.law = initial_law();
  o.scheme = absorption_scheme();
  o.seed = seed;
  o.store_paths = store_paths;
  return o;
}

FixedPointOptions ExperimentConfig::fixed_point_options() const {
  FixedPointOptions o;
  o.draws = paths;
  o.seed = seed;
  o.crn = crn;
  o.monotone_projection = projection;
  o.threads = threads;
  return o;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " +
                                  e.what());
    }
  }
  return cfg;
}

}  // namespace mutualhold
