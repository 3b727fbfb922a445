#pragma once

// JSON run configuration and CSV helpers.
//
// {
//   "regime": "subcritical" | "critical" | "smooth",
//   "params": {"mu", "mu_eff", "K", "k", "b"},
//   "profile": {"type": "constant", "height"}
//            | {"type": "sinusoidal", "mean", "amp1", "amp2", "amp12", "k1", "k2"}
//            | {"type": "sampled", "nx", "ny", "heights": [...]} or {"type": "sampled", "path"},
//   "cell_grid": {"n1", "n2", "n3"},
//   "macro_grid": {"x0", "x1", "y0", "y1", "m1", "m2"},
//   "forcing": {"type": "constant", "value": [f1, f2]}
//            | {"type": "gradient_cosine" | "rotational", "amplitude"}
//            | {"type": "sampled", "path"},
//   "solver": {"cell_tol", "macro_tol", "critical_tol", "inner_tol", "heat_tol", "max_iter"},
//   "quad_n", "output_dir", "use_h_min",
//   "slices": [{"x": [x1, x2], "z": [z1, z2], "points"}]
// }
//
// Relative paths are resolved against the directory of the config file.
// Sampled profile CSV: nx*ny heights, one per line or comma separated, i fastest;
// the first line may be a header "nx,ny" followed by the two integers.
// Sampled forcing CSV: header x1,x2,f1,f2 then one row per macro cell center in
// row-major order (x1 fastest).

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "grid.hpp"
#include "macro_reynolds.hpp"
#include "params.hpp"
#include "roughness.hpp"
#include "tensor.hpp"

namespace roughfilm {

using json = nlohmann::ordered_json;

struct ParamsConfig {
  double mu = 1.0, mu_eff = 1.0, K = 1.0, k = 1.0, b = 0.0;
  PhysicalParams build() const { return make_params(mu, mu_eff, K, k, b); }
};

struct ProfileConfig {
  RoughnessProfile::Kind kind = RoughnessProfile::Kind::constant;
  double height = 1.0;
  SinusoidalParams sinusoidal{};
  SampledGrid sampled{};
  std::string path;  // sampled profiles read from CSV keep their path
  RoughnessProfile build() const {
    switch (kind) {
      case RoughnessProfile::Kind::constant: return RoughnessProfile::constant(height);
      case RoughnessProfile::Kind::sinusoidal: return RoughnessProfile::sinusoidal(sinusoidal);
      case RoughnessProfile::Kind::sampled: return RoughnessProfile::sampled(sampled);
    }
    return RoughnessProfile::constant(height);
  }
};

struct CellGridConfig {
  int n1 = 32, n2 = 32, n3 = 32;
};

struct MacroGridConfig {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  int m1 = 32, m2 = 32;
  MacroGrid build() const { return MacroGrid(x0, x1, y0, y1, m1, m2); }
};

struct ForcingConfig {
  enum class Kind { constant, gradient_cosine, rotational, sampled };
  Kind kind = Kind::constant;
  Vec2 value{0.0, 0.0};
  double amplitude = 0.0;
  std::string path;
  MacroForcing sampled_values;  // filled when kind == sampled

  MacroForcing build(const MacroGrid& g) const {
    switch (kind) {
      case Kind::constant: return MacroForcing::constant(g, value);
      case Kind::gradient_cosine: return MacroForcing::gradient_cosine(g, amplitude);
      case Kind::rotational: return MacroForcing::rotational(g, amplitude);
      case Kind::sampled: return sampled_values;
    }
    return MacroForcing::constant(g, value);
  }
};

struct SolverConfig {
  double cell_tol = 1e-10;      // subcritical corrector, relative to the rhs
  double macro_tol = 1e-12;     // Reynolds solve, relative to the rhs
  double critical_tol = 1e-8;   // max divergence of the 3D correctors
  double inner_tol = 1e-12;     // momentum solves inside the pressure iteration
  double heat_tol = 1e-12;      // cell temperature solves
  int max_iter = 100000;
};

struct SliceConfig {
  Point2 x{0.0, 0.0};  // macroscopic point
  Point2 z{0.0, 0.0};  // cell point
  int points = 65;
};

struct RunConfig {
  Regime regime = Regime::subcritical;
  ParamsConfig params;
  ProfileConfig profile;
  CellGridConfig cell_grid;
  MacroGridConfig macro_grid;
  ForcingConfig forcing;
  SolverConfig solver;
  int quad_n = 256;
  std::string output_dir = "out";
  bool use_h_min = false;
  std::vector<SliceConfig> slices;
};

namespace detail {

inline std::string to_string(ForcingConfig::Kind k) {
  switch (k) {
    case ForcingConfig::Kind::constant: return "constant";
    case ForcingConfig::Kind::gradient_cosine: return "gradient_cosine";
    case ForcingConfig::Kind::rotational: return "rotational";
    case ForcingConfig::Kind::sampled: return "sampled";
  }
  return "constant";
}

inline std::string to_string(RoughnessProfile::Kind k) {
  switch (k) {
    case RoughnessProfile::Kind::constant: return "constant";
    case RoughnessProfile::Kind::sinusoidal: return "sinusoidal";
    case RoughnessProfile::Kind::sampled: return "sampled";
  }
  return "constant";
}

/// Reads fields of one JSON object, recording problems under their dotted path.
class FieldReader {
public:
  FieldReader(const json& j, std::string path, std::vector<std::string>& problems)
      : j_(j), path_(std::move(path)), problems_(problems) {
    if (!j_.is_object()) fail("", "must be an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  void fail(const std::string& key, const std::string& msg) const {
    problems_.push_back((key.empty() ? (path_.empty() ? std::string("<root>") : path_) : at(key)) + ": " + msg);
  }

  void number(const std::string& key, double& out, bool required = false) const {
    if (!has(key)) {
      if (required) fail(key, "is required");
      return;
    }
    const json& v = j_.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(key, "must be a finite number");
      return;
    }
    out = v.get<double>();
  }

  void positive(const std::string& key, double& out, bool required = false) const {
    number(key, out, required);
    if (has(key) && j_.at(key).is_number() && !(out > 0.0)) fail(key, "must be positive");
  }

  void integer(const std::string& key, int& out, int min_value, bool required = false) const {
    if (!has(key)) {
      if (required) fail(key, "is required");
      return;
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer()) {
      fail(key, "must be an integer");
      return;
    }
    out = v.get<int>();
    if (out < min_value) fail(key, "must be >= " + std::to_string(min_value));
  }

  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_boolean()) {
      fail(key, "must be true or false");
      return;
    }
    out = j_.at(key).get<bool>();
  }

  void string(const std::string& key, std::string& out, bool required = false) const {
    if (!has(key)) {
      if (required) fail(key, "is required");
      return;
    }
    if (!j_.at(key).is_string()) {
      fail(key, "must be a string");
      return;
    }
    out = j_.at(key).get<std::string>();
  }

  void pair(const std::string& key, std::array<double, 2>& out, bool required = false) const {
    if (!has(key)) {
      if (required) fail(key, "is required");
      return;
    }
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(key, "must be an array of two numbers");
      return;
    }
    out = {v[0].get<double>(), v[1].get<double>()};
    if (!std::isfinite(out[0]) || !std::isfinite(out[1])) fail(key, "must be finite");
  }

  void only(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) fail(it.key(), "unknown field");
    }
  }

private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& problems_;
};

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
  }
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Reads a sampled profile CSV; nx, ny from the config take precedence over a header.
inline SampledGrid read_profile_csv(const std::filesystem::path& file, int nx, int ny) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open profile file " + file.string());
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (first && cells.size() >= 2 && (cells[0] == "nx" || !detail::parse_double(cells[0]))) {
      first = false;
      if (std::getline(in, line)) {
        const auto dims = detail::split_csv_line(line);
        if (dims.size() != 2) throw std::runtime_error(file.string() + ": expected nx,ny after header");
        if (nx == 0) nx = std::stoi(dims[0]);
        if (ny == 0) ny = std::stoi(dims[1]);
      }
      continue;
    }
    first = false;
    for (const auto& c : cells) {
      const auto v = detail::parse_double(c);
      if (!v) throw std::runtime_error(file.string() + ": not a number: '" + c + "'");
      values.push_back(*v);
    }
  }
  if (nx <= 0 || ny <= 0) throw std::runtime_error(file.string() + ": grid size unknown (set nx and ny)");
  if (values.size() != static_cast<std::size_t>(nx) * ny)
    throw std::runtime_error(file.string() + ": expected " + std::to_string(nx * ny) + " heights, found " +
                             std::to_string(values.size()));
  return {nx, ny, std::move(values)};
}

/// Reads forcing samples at the macro cell centers (columns x1,x2,f1,f2).
inline MacroForcing read_forcing_csv(const std::filesystem::path& file, const MacroGrid& g) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open forcing file " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(file.string() + ": empty file");
  const auto header = detail::split_csv_line(line);
  if (header != std::vector<std::string>{"x1", "x2", "f1", "f2"})
    throw std::runtime_error(file.string() + ": header must be x1,x2,f1,f2");
  MacroForcing f{Vec(g.size()), Vec(g.size())};
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 4) throw std::runtime_error(file.string() + ": row " + std::to_string(row + 1) + " needs 4 columns");
    std::array<double, 4> v{};
    for (int c = 0; c < 4; ++c) {
      const auto d = detail::parse_double(cells[c]);
      if (!d) throw std::runtime_error(file.string() + ": not a number: '" + cells[c] + "'");
      v[c] = *d;
    }
    if (row >= g.size()) throw std::runtime_error(file.string() + ": more rows than macro cells");
    const int i = static_cast<int>(row % g.m1()), j = static_cast<int>(row / g.m1());
    const double tol = 1e-9 * std::max(g.dx(), g.dy());
    if (std::abs(v[0] - g.xc(i)) > tol || std::abs(v[1] - g.yc(j)) > tol)
      throw std::runtime_error(file.string() + ": row " + std::to_string(row + 1) +
                               " is not at the expected cell center (row-major, x1 fastest)");
    f.f1[row] = v[2];
    f.f2[row] = v[3];
    ++row;
  }
  if (row != g.size())
    throw std::runtime_error(file.string() + ": expected " + std::to_string(g.size()) + " rows, found " +
                             std::to_string(row));
  return f;
}

/// Parses and validates a configuration. Every problem is collected before
/// throwing ConfigError, each prefixed by its field path.
inline RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = {}) {
  std::vector<std::string> problems;
  RunConfig c;
  detail::FieldReader root(j, "", problems);
  if (!j.is_object()) throw ConfigError(problems);
  root.only({"regime", "params", "profile", "cell_grid", "macro_grid", "forcing", "solver", "quad_n", "output_dir",
             "use_h_min", "slices"});

  std::string regime;
  root.string("regime", regime, true);
  if (!regime.empty()) {
    if (auto r = parse_regime(regime))
      c.regime = *r;
    else
      root.fail("regime", "must be one of subcritical, critical, smooth");
  }

  if (!root.has("params")) {
    root.fail("params", "is required");
  } else {
    detail::FieldReader p(root.raw("params"), "params", problems);
    p.only({"mu", "mu_eff", "K", "k", "b"});
    p.positive("mu", c.params.mu, true);
    p.positive("mu_eff", c.params.mu_eff, true);
    p.positive("K", c.params.K, true);
    p.positive("k", c.params.k, true);
    p.number("b", c.params.b);
  }

  if (!root.has("profile")) {
    root.fail("profile", "is required");
  } else {
    detail::FieldReader p(root.raw("profile"), "profile", problems);
    std::string type;
    p.string("type", type, true);
    if (type == "constant") {
      c.profile.kind = RoughnessProfile::Kind::constant;
      p.only({"type", "height"});
      p.positive("height", c.profile.height, true);
    } else if (type == "sinusoidal") {
      c.profile.kind = RoughnessProfile::Kind::sinusoidal;
      p.only({"type", "mean", "amp1", "amp2", "amp12", "k1", "k2"});
      auto& s = c.profile.sinusoidal;
      p.positive("mean", s.mean, true);
      p.number("amp1", s.amp1);
      p.number("amp2", s.amp2);
      p.number("amp12", s.amp12);
      p.integer("k1", s.k1, 1);
      p.integer("k2", s.k2, 1);
      if (s.mean - std::abs(s.amp1) - std::abs(s.amp2) - std::abs(s.amp12) <= 0.0)
        p.fail("", "height must stay positive (mean > |amp1| + |amp2| + |amp12|)");
    } else if (type == "sampled") {
      c.profile.kind = RoughnessProfile::Kind::sampled;
      p.only({"type", "nx", "ny", "heights", "path"});
      auto& g = c.profile.sampled;
      p.integer("nx", g.nx, 1);
      p.integer("ny", g.ny, 1);
      p.string("path", c.profile.path);
      if (p.has("heights") == !c.profile.path.empty()) {
        p.fail("", "give exactly one of heights or path");
      } else if (p.has("heights")) {
        const json& h = p.raw("heights");
        if (!h.is_array()) {
          p.fail("heights", "must be an array of numbers");
        } else {
          for (std::size_t m = 0; m < h.size(); ++m) {
            if (!h[m].is_number() || !std::isfinite(h[m].get<double>())) {
              p.fail("heights[" + std::to_string(m) + "]", "must be a finite number");
              break;
            }
            g.heights.push_back(h[m].get<double>());
          }
          if (g.nx <= 0 || g.ny <= 0) p.fail("", "nx and ny are required with inline heights");
          else if (g.heights.size() != static_cast<std::size_t>(g.nx) * g.ny)
            p.fail("heights", "must hold nx*ny = " + std::to_string(g.nx * g.ny) + " values");
        }
      } else {
        try {
          g = read_profile_csv(detail::resolve(base_dir, c.profile.path), g.nx, g.ny);
        } catch (const std::exception& e) {
          p.fail("path", e.what());
        }
      }
      for (double v : g.heights)
        if (!(v > 0.0)) {
          p.fail("heights", "must be strictly positive");
          break;
        }
    } else if (!type.empty()) {
      p.fail("type", "must be one of constant, sinusoidal, sampled");
    }
  }

  if (root.has("cell_grid")) {
    detail::FieldReader g(root.raw("cell_grid"), "cell_grid", problems);
    g.only({"n1", "n2", "n3"});
    g.integer("n1", c.cell_grid.n1, 4);
    g.integer("n2", c.cell_grid.n2, 4);
    g.integer("n3", c.cell_grid.n3, 0);
    if (c.cell_grid.n1 % 2 != 0) g.fail("n1", "must be even");
    if (c.cell_grid.n2 % 2 != 0) g.fail("n2", "must be even");
    if (c.regime == Regime::critical) {
      if (c.cell_grid.n1 < 8) g.fail("n1", "must be >= 8 for the critical regime");
      if (c.cell_grid.n2 < 8) g.fail("n2", "must be >= 8 for the critical regime");
      if (c.cell_grid.n3 < 8) g.fail("n3", "must be >= 8 for the critical regime");
    }
  }

  if (!root.has("macro_grid")) {
    root.fail("macro_grid", "is required");
  } else {
    detail::FieldReader g(root.raw("macro_grid"), "macro_grid", problems);
    g.only({"x0", "x1", "y0", "y1", "m1", "m2"});
    auto& m = c.macro_grid;
    g.number("x0", m.x0);
    g.number("x1", m.x1);
    g.number("y0", m.y0);
    g.number("y1", m.y1);
    g.integer("m1", m.m1, 3, true);
    g.integer("m2", m.m2, 3, true);
    if (!(m.x1 > m.x0)) g.fail("x1", "must exceed x0");
    if (!(m.y1 > m.y0)) g.fail("y1", "must exceed y0");
  }

  if (!root.has("forcing")) {
    root.fail("forcing", "is required");
  } else {
    detail::FieldReader f(root.raw("forcing"), "forcing", problems);
    std::string type;
    f.string("type", type, true);
    auto& fc = c.forcing;
    if (type == "constant") {
      fc.kind = ForcingConfig::Kind::constant;
      f.only({"type", "value"});
      f.pair("value", fc.value, true);
    } else if (type == "gradient_cosine" || type == "rotational") {
      fc.kind = type == "rotational" ? ForcingConfig::Kind::rotational : ForcingConfig::Kind::gradient_cosine;
      f.only({"type", "amplitude"});
      f.number("amplitude", fc.amplitude, true);
    } else if (type == "sampled") {
      fc.kind = ForcingConfig::Kind::sampled;
      f.only({"type", "path"});
      f.string("path", fc.path, true);
    } else if (!type.empty()) {
      f.fail("type", "must be one of constant, gradient_cosine, rotational, sampled");
    }
  }

  if (root.has("solver")) {
    detail::FieldReader s(root.raw("solver"), "solver", problems);
    s.only({"cell_tol", "macro_tol", "critical_tol", "inner_tol", "heat_tol", "max_iter"});
    s.positive("cell_tol", c.solver.cell_tol);
    s.positive("macro_tol", c.solver.macro_tol);
    s.positive("critical_tol", c.solver.critical_tol);
    s.positive("inner_tol", c.solver.inner_tol);
    s.positive("heat_tol", c.solver.heat_tol);
    s.integer("max_iter", c.solver.max_iter, 1);
  }

  root.integer("quad_n", c.quad_n, 64);
  if (c.quad_n % 2 != 0) root.fail("quad_n", "must be even");
  root.string("output_dir", c.output_dir);
  if (root.has("output_dir") && c.output_dir.empty()) root.fail("output_dir", "must not be empty");
  root.boolean("use_h_min", c.use_h_min);
  if (c.use_h_min && c.regime != Regime::smooth) root.fail("use_h_min", "only applies to the smooth regime");

  if (root.has("slices")) {
    const json& s = root.raw("slices");
    if (!s.is_array()) {
      root.fail("slices", "must be an array");
    } else {
      for (std::size_t m = 0; m < s.size(); ++m) {
        detail::FieldReader r(s[m], "slices[" + std::to_string(m) + "]", problems);
        if (!s[m].is_object()) continue;
        r.only({"x", "z", "points"});
        SliceConfig sc;
        r.pair("x", sc.x, true);
        r.pair("z", sc.z);
        r.integer("points", sc.points, 2);
        const auto& mg = c.macro_grid;
        if (sc.x[0] < mg.x0 || sc.x[0] > mg.x1 || sc.x[1] < mg.y0 || sc.x[1] > mg.y1) r.fail("x", "must lie in omega");
        c.slices.push_back(sc);
      }
    }
  }

  if (problems.empty() && c.forcing.kind == ForcingConfig::Kind::sampled) {
    try {
      c.forcing.sampled_values = read_forcing_csv(detail::resolve(base_dir, c.forcing.path), c.macro_grid.build());
    } catch (const std::exception& e) {
      problems.push_back(std::string("forcing.path: ") + e.what());
    }
  }
  if (problems.empty()) {
    try {
      (void)c.profile.build();
    } catch (const std::exception& e) {
      problems.push_back(std::string("profile: ") + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

inline RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError({"<file>: cannot open " + file.string()});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"<file>: " + std::string(e.what())});
  }
  return parse_config(j, file.parent_path());
}

/// Canonical form: every field written, defaults included, fixed key order.
inline json to_json(const RunConfig& c) {
  json j;
  j["regime"] = std::string(to_string(c.regime));
  j["params"] = {{"mu", c.params.mu}, {"mu_eff", c.params.mu_eff}, {"K", c.params.K}, {"k", c.params.k},
                 {"b", c.params.b}};
  json p;
  p["type"] = detail::to_string(c.profile.kind);
  switch (c.profile.kind) {
    case RoughnessProfile::Kind::constant:
      p["height"] = c.profile.height;
      break;
    case RoughnessProfile::Kind::sinusoidal: {
      const auto& s = c.profile.sinusoidal;
      p["mean"] = s.mean;
      p["amp1"] = s.amp1;
      p["amp2"] = s.amp2;
      p["amp12"] = s.amp12;
      p["k1"] = s.k1;
      p["k2"] = s.k2;
      break;
    }
    case RoughnessProfile::Kind::sampled:
      p["nx"] = c.profile.sampled.nx;
      p["ny"] = c.profile.sampled.ny;
      if (c.profile.path.empty())
        p["heights"] = c.profile.sampled.heights;
      else
        p["path"] = c.profile.path;
      break;
  }
  j["profile"] = p;
  j["cell_grid"] = {{"n1", c.cell_grid.n1}, {"n2", c.cell_grid.n2}, {"n3", c.cell_grid.n3}};
  const auto& m = c.macro_grid;
  j["macro_grid"] = {{"x0", m.x0}, {"x1", m.x1}, {"y0", m.y0}, {"y1", m.y1}, {"m1", m.m1}, {"m2", m.m2}};
  json f;
  f["type"] = detail::to_string(c.forcing.kind);
  switch (c.forcing.kind) {
    case ForcingConfig::Kind::constant: f["value"] = {c.forcing.value[0], c.forcing.value[1]}; break;
    case ForcingConfig::Kind::gradient_cosine:
    case ForcingConfig::Kind::rotational: f["amplitude"] = c.forcing.amplitude; break;
    case ForcingConfig::Kind::sampled: f["path"] = c.forcing.path; break;
  }
  j["forcing"] = f;
  const auto& s = c.solver;
  j["solver"] = {{"cell_tol", s.cell_tol},   {"macro_tol", s.macro_tol}, {"critical_tol", s.critical_tol},
                 {"inner_tol", s.inner_tol}, {"heat_tol", s.heat_tol},   {"max_iter", s.max_iter}};
  j["quad_n"] = c.quad_n;
  j["output_dir"] = c.output_dir;
  j["use_h_min"] = c.use_h_min;
  json sl = json::array();
  for (const auto& x : c.slices)
    sl.push_back({{"x", {x.x[0], x.x[1]}}, {"z", {x.z[0], x.z[1]}}, {"points", x.points}});
  j["slices"] = sl;
  return j;
}

// ---------------------------------------------------------------------------
// Output helpers. Every floating-point value is printed with 17 significant digits.

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& columns) : out_(file), width_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot write " + file.string());
    for (std::size_t c = 0; c < columns.size(); ++c) out_ << (c ? "," : "") << columns[c];
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    if (values.size() != width_) throw std::logic_error("csv row width mismatch");
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << fmt17(v);
      first = false;
    }
    out_ << '\n';
  }

private:
  std::ofstream out_;
  std::size_t width_;
};

/// JSON text with doubles at 17 significant digits, two-space indent, trailing newline.
inline std::string dump_json(const json& j) {
  std::string out;
  auto rec = [&](auto&& self, const json& v, int indent) -> void {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
    if (v.is_object()) {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        self(self, it.value(), indent + 2);
      }
      out += "\n" + pad + "}";
    } else if (v.is_array()) {
      if (v.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : v) scalars = scalars && e.is_primitive();
      out += "[";
      bool first = true;
      for (const auto& e : v) {
        out += first ? (scalars ? "" : "\n" + inner) : (scalars ? ", " : ",\n" + inner);
        first = false;
        self(self, e, indent + 2);
      }
      out += scalars ? "]" : "\n" + pad + "]";
    } else if (v.is_number_float()) {
      const double d = v.get<double>();
      out += std::isfinite(d) ? fmt17(d) : "null";
    } else {
      out += v.dump();
    }
  };
  rec(rec, j, 0);
  out += "\n";
  return out;
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

}  // namespace roughfilm
