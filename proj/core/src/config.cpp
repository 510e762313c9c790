#include "blochspec/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace blochspec {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config line " << lineno << ": expected key = value";
      throw ConfigError(os.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key");
    kv[key] = val;
  }
  return kv;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ','))
    out.push_back(to_double(key, trim(item)));
  return out;
}

Vec3 to_vec3(const std::string& key, const std::string& v) {
  const std::vector<double> xs = to_list(key, v);
  if (xs.size() != 3)
    throw ConfigError("config: " + key + " needs 3 comma-separated values");
  return Vec3(xs[0], xs[1], xs[2]);
}

std::string list_str(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_g17(xs[i]);
  }
  return out;
}

std::string vec3_str(const Vec3& v) {
  return format_g17(v[0]) + "," + format_g17(v[1]) + "," + format_g17(v[2]);
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return from_string(os.str());
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig c;
  auto kv = parse_kv(text);
  auto take = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    return &it->second;
  };
  if (auto* v = take("density.kind")) c.density.kind = *v;
  if (auto* v = take("density.e")) c.density.e = to_double("density.e", *v);
  if (auto* v = take("density.Z")) c.density.Z = to_double("density.Z", *v);
  if (auto* v = take("density.M_ion"))
    c.density.M_ion = to_double("density.M_ion", *v);
  if (auto* v = take("density.gauss_width"))
    c.density.gauss_width = to_double("density.gauss_width", *v);
  if (auto* v = take("density.scale"))
    c.density.scale = to_double("density.scale", *v);
  if (auto* v = take("density.amplitude"))
    c.density.amplitude = to_double("density.amplitude", *v);
  if (auto* v = take("density.decay_rate"))
    c.density.decay_rate = to_double("density.decay_rate", *v);
  if (auto* v = take("density.table_file")) c.density.table_file = *v;
  if (auto* v = take("model.zero_coupling"))
    c.zero_coupling = to_bool("model.zero_coupling", *v);
  if (auto* v = take("model.jellium")) c.jellium = to_bool("model.jellium", *v);
  if (auto* v = take("basis.N")) c.N = static_cast<int>(to_long("basis.N", *v));
  if (auto* v = take("grid.L")) c.L = static_cast<int>(to_long("grid.L", *v));
  if (auto* v = take("lattice.radius"))
    c.radius = static_cast<int>(to_long("lattice.radius", *v));
  if (auto* v = take("check.jellium_radius"))
    c.jellium_radius = static_cast<int>(to_long("check.jellium_radius", *v));
  if (auto* v = take("tol.delta_min"))
    c.tol.delta_min = to_double("tol.delta_min", *v);
  if (auto* v = take("tol.flat_tol"))
    c.tol.flat_tol = to_double("tol.flat_tol", *v);
  if (auto* v = take("tol.grad_tol"))
    c.tol.grad_tol = to_double("tol.grad_tol", *v);
  if (auto* v = take("tol.hess_tol"))
    c.tol.hess_tol = to_double("tol.hess_tol", *v);
  if (auto* v = take("tol.tol_psd")) c.tol.tol_psd = to_double("tol.tol_psd", *v);
  if (auto* v = take("tol.jellium"))
    c.tol.jellium_tol = to_double("tol.jellium", *v);
  if (auto* v = take("tol.wiener")) c.tol.wiener_tol = to_double("tol.wiener", *v);
  if (auto* v = take("tol.last_shell"))
    c.tol.last_shell = to_double("tol.last_shell", *v);
  if (auto* v = take("dynamics.band"))
    c.dynamics.band = static_cast<int>(to_long("dynamics.band", *v));
  if (auto* v = take("dynamics.branch")) c.dynamics.branch = *v;
  if (auto* v = take("dynamics.window_center"))
    c.dynamics.window_center = to_vec3("dynamics.window_center", *v);
  if (auto* v = take("dynamics.window_width"))
    c.dynamics.window_width = to_double("dynamics.window_width", *v);
  if (auto* v = take("dynamics.amplitude"))
    c.dynamics.amplitude = to_double("dynamics.amplitude", *v);
  if (auto* v = take("dynamics.times"))
    c.dynamics.times = to_list("dynamics.times", *v);
  if (auto* v = take("dynamics.alpha"))
    c.dynamics.alpha = to_double("dynamics.alpha", *v);
  if (auto* v = take("dynamics.R"))
    c.dynamics.R = static_cast<int>(to_long("dynamics.R", *v));
  if (auto* v = take("resolvent.band"))
    c.resolvent.band = static_cast<int>(to_long("resolvent.band", *v));
  if (auto* v = take("resolvent.branch")) c.resolvent.branch = *v;
  if (auto* v = take("resolvent.window_center"))
    c.resolvent.window_center = to_vec3("resolvent.window_center", *v);
  if (auto* v = take("resolvent.window_width"))
    c.resolvent.window_width = to_double("resolvent.window_width", *v);
  if (auto* v = take("resolvent.amplitude"))
    c.resolvent.amplitude = to_double("resolvent.amplitude", *v);
  if (auto* v = take("resolvent.omega_lo"))
    c.resolvent.omega_lo = to_double("resolvent.omega_lo", *v);
  if (auto* v = take("resolvent.omega_hi"))
    c.resolvent.omega_hi = to_double("resolvent.omega_hi", *v);
  if (auto* v = take("resolvent.epsilons"))
    c.resolvent.epsilons = to_list("resolvent.epsilons", *v);
  if (auto* v = take("resolvent.alpha"))
    c.resolvent.alpha = to_double("resolvent.alpha", *v);
  if (auto* v = take("resolvent.R"))
    c.resolvent.R = static_cast<int>(to_long("resolvent.R", *v));
  if (auto* v = take("resolvent.omega_samples"))
    c.resolvent.omega_samples =
        static_cast<int>(to_long("resolvent.omega_samples", *v));
  if (auto* v = take("workers"))
    c.workers = static_cast<unsigned>(to_long("workers", *v));
  if (auto* v = take("seed"))
    c.seed = static_cast<std::uint64_t>(to_long("seed", *v));

  static const char* known[] = {
      "density.kind", "density.e", "density.Z", "density.M_ion",
      "density.gauss_width", "density.scale", "density.amplitude",
      "density.decay_rate", "density.table_file", "model.zero_coupling",
      "model.jellium", "basis.N", "grid.L", "lattice.radius",
      "check.jellium_radius", "tol.delta_min", "tol.flat_tol", "tol.grad_tol",
      "tol.hess_tol", "tol.tol_psd", "tol.jellium", "tol.wiener",
      "tol.last_shell", "dynamics.band", "dynamics.branch",
      "dynamics.window_center",
      "dynamics.window_width", "dynamics.amplitude", "dynamics.times",
      "dynamics.alpha", "dynamics.R", "resolvent.band", "resolvent.branch",
      "resolvent.window_center", "resolvent.window_width",
      "resolvent.amplitude", "resolvent.omega_lo", "resolvent.omega_hi",
      "resolvent.epsilons", "resolvent.alpha", "resolvent.R",
      "resolvent.omega_samples", "workers", "seed"};
  for (const auto& [key, val] : kv) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (density.kind != "sinc_gauss" && density.kind != "gaussian" &&
      density.kind != "tabulated")
    throw ConfigError("config: density.kind must be sinc_gauss, gaussian or tabulated");
  if (density.kind == "tabulated" && density.table_file.empty())
    throw ConfigError("config: tabulated density needs density.table_file");
  if (N < 1 || N > 6) throw ConfigError("config: basis.N must be in 1..6");
  if (L < 2) throw ConfigError("config: grid.L must be >= 2");
  if (radius < 1) throw ConfigError("config: lattice.radius must be >= 1");
  if (!(dynamics.alpha < 0))
    throw ConfigError("config: dynamics.alpha must be negative");
  if (!(resolvent.alpha < 0))
    throw ConfigError("config: resolvent.alpha must be negative");
  for (const std::string* b : {&dynamics.branch, &resolvent.branch})
    if (*b != "qp_longitudinal" && *b != "psi_lowest")
      throw ConfigError("config: branch must be qp_longitudinal or psi_lowest");
  // R <= L/4 is enforced by the aliasing guard when a box is actually used
  if (dynamics.R < 0) throw ConfigError("config: dynamics.R must be >= 0");
  if (resolvent.R < 0) throw ConfigError("config: resolvent.R must be >= 0");
}

IonDensity RunConfig::make_density() const {
  if (density.kind == "sinc_gauss")
    return IonDensity::separable_sinc_gauss(density.e, density.Z,
                                            density.M_ion, density.gauss_width,
                                            density.scale, density.decay_rate);
  if (density.kind == "gaussian")
    return IonDensity::isotropic_gaussian(density.e, density.Z, density.M_ion,
                                          density.gauss_width,
                                          density.amplitude,
                                          density.decay_rate);
  // tabulated: text file "xi_max n" then (2n+1)^3 lines "re im"
  std::ifstream f(density.table_file);
  if (!f) throw ConfigError("config: cannot open " + density.table_file);
  TabulatedSamples t;
  f >> t.xi_max >> t.n;
  const std::size_t count = static_cast<std::size_t>(2 * t.n + 1) *
                            (2 * t.n + 1) * (2 * t.n + 1);
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    double re, im;
    f >> re >> im;
    t.values[i] = Complex(re, im);
  }
  if (!f) throw ConfigError("config: truncated table " + density.table_file);
  return IonDensity::tabulated(density.e, density.Z, density.M_ion,
                               std::move(t), density.decay_rate);
}

std::string RunConfig::canonical_string() const {
  std::map<std::string, std::string> kv;
  kv["density.kind"] = density.kind;
  kv["density.e"] = format_g17(density.e);
  kv["density.Z"] = format_g17(density.Z);
  kv["density.M_ion"] = format_g17(density.M_ion);
  kv["density.gauss_width"] = format_g17(density.gauss_width);
  kv["density.scale"] = format_g17(density.scale);
  kv["density.amplitude"] = format_g17(density.amplitude);
  kv["density.decay_rate"] = format_g17(density.decay_rate);
  kv["density.table_file"] = density.table_file;
  kv["model.zero_coupling"] = zero_coupling ? "true" : "false";
  kv["model.jellium"] = jellium ? "true" : "false";
  kv["basis.N"] = std::to_string(N);
  kv["grid.L"] = std::to_string(L);
  kv["lattice.radius"] = std::to_string(radius);
  kv["check.jellium_radius"] = std::to_string(jellium_radius);
  kv["tol.delta_min"] = format_g17(tol.delta_min);
  kv["tol.flat_tol"] = format_g17(tol.flat_tol);
  kv["tol.grad_tol"] = format_g17(tol.grad_tol);
  kv["tol.hess_tol"] = format_g17(tol.hess_tol);
  kv["tol.tol_psd"] = format_g17(tol.tol_psd);
  kv["tol.jellium"] = format_g17(tol.jellium_tol);
  kv["tol.wiener"] = format_g17(tol.wiener_tol);
  kv["tol.last_shell"] = format_g17(tol.last_shell);
  kv["dynamics.band"] = std::to_string(dynamics.band);
  kv["dynamics.branch"] = dynamics.branch;
  kv["dynamics.window_center"] = vec3_str(dynamics.window_center);
  kv["dynamics.window_width"] = format_g17(dynamics.window_width);
  kv["dynamics.amplitude"] = format_g17(dynamics.amplitude);
  kv["dynamics.times"] = list_str(dynamics.times);
  kv["dynamics.alpha"] = format_g17(dynamics.alpha);
  kv["dynamics.R"] = std::to_string(dynamics.R);
  kv["resolvent.band"] = std::to_string(resolvent.band);
  kv["resolvent.branch"] = resolvent.branch;
  kv["resolvent.window_center"] = vec3_str(resolvent.window_center);
  kv["resolvent.window_width"] = format_g17(resolvent.window_width);
  kv["resolvent.amplitude"] = format_g17(resolvent.amplitude);
  kv["resolvent.omega_lo"] = format_g17(resolvent.omega_lo);
  kv["resolvent.omega_hi"] = format_g17(resolvent.omega_hi);
  kv["resolvent.epsilons"] = list_str(resolvent.epsilons);
  kv["resolvent.alpha"] = format_g17(resolvent.alpha);
  kv["resolvent.R"] = std::to_string(resolvent.R);
  kv["resolvent.omega_samples"] = std::to_string(resolvent.omega_samples);
  kv["workers"] = std::to_string(workers);
  kv["seed"] = std::to_string(seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash64() const {
  const std::string s = canonical_string();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace blochspec
