// Acceptance suite: one PASS/FAIL line per criterion, details of failing checks below.
// Usage: acceptance --cli <path to roughfilm_cli>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "roughfilm/config.hpp"
#include "roughfilm/verify.hpp"

namespace fs = std::filesystem;
using roughfilm::verify::CheckRow;
using roughfilm::verify::Verdict;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;
};

Outcome from_rows(const std::vector<CheckRow>& rows, bool report_only = false) {
  Outcome o;
  int passed = 0;
  for (const auto& r : rows) {
    const bool finite = std::isfinite(r.measured);
    const bool ok = report_only ? finite : r.verdict == Verdict::pass;
    if (ok) {
      ++passed;
    } else {
      o.pass = false;
      o.details.push_back(r.check + ": measured " + roughfilm::fmt17(r.measured) + ", target " +
                          roughfilm::fmt17(r.target) + ", tolerance " + roughfilm::fmt17(r.tolerance));
    }
    if (report_only) o.details.push_back(r.check + " = " + roughfilm::fmt17(r.measured));
  }
  o.summary = std::to_string(passed) + "/" + std::to_string(rows.size()) + (report_only ? " evaluated" : " checks");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> directory_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

Outcome reproducibility(const std::string& cli) {
  Outcome o;
  const fs::path root = fs::temp_directory_path() /
                        ("roughfilm_acceptance_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(root);
  const std::vector<std::pair<std::string, std::string>> configs{
      {"subcritical", R"({
  "regime": "subcritical",
  "params": {"mu": 1.0, "mu_eff": 0.5, "K": 0.8, "k": 1.2, "b": 0.3},
  "profile": {"type": "sinusoidal", "mean": 1.0, "amp1": 0.2, "amp2": 0.1, "amp12": 0.05},
  "cell_grid": {"n1": 32, "n2": 32},
  "macro_grid": {"x0": 0, "x1": 2, "y0": 0, "y1": 1, "m1": 24, "m2": 12},
  "forcing": {"type": "rotational", "amplitude": 1.5},
  "quad_n": 128,
  "slices": [{"x": [0.5, 0.5], "z": [0.1, -0.2], "points": 17}]
})"},
      {"critical", R"({
  "regime": "critical",
  "params": {"mu": 1.0, "mu_eff": 1.0, "K": 1.0, "k": 1.0, "b": 0.5},
  "profile": {"type": "sinusoidal", "mean": 1.0, "amp1": 0.2},
  "cell_grid": {"n1": 16, "n2": 8, "n3": 32},
  "macro_grid": {"m1": 12, "m2": 12},
  "forcing": {"type": "gradient_cosine", "amplitude": 1.0},
  "slices": [{"x": [0.3, 0.6], "z": [0.0, 0.0]}]
})"}};
  int identical = 0;
  for (const auto& [name, text] : configs) {
    const fs::path cfg = root / (name + ".json");
    roughfilm::write_text(cfg, text);
    const fs::path a = root / (name + "_a"), b = root / (name + "_b");
    const std::string base = "\"" + cli + "\" run --config \"" + cfg.string() + "\" --out ";
    const int ra = std::system((base + "\"" + a.string() + "\" --threads 1 > /dev/null").c_str());
    const int rb = std::system((base + "\"" + b.string() + "\" --threads 4 > /dev/null").c_str());
    if (ra != 0 || rb != 0) {
      o.pass = false;
      o.details.push_back(name + ": run exited with status " + std::to_string(ra) + "/" + std::to_string(rb));
      continue;
    }
    const auto da = directory_contents(a), db = directory_contents(b);
    bool same = da == db && !da.empty();
    if (!same) {
      o.pass = false;
      for (const auto& [file, bytes] : da)
        if (!db.count(file) || db.at(file) != bytes) o.details.push_back(name + ": " + file + " differs");
      if (da.size() != db.size()) o.details.push_back(name + ": different file sets");
    } else {
      ++identical;
    }
  }
  fs::remove_all(root);
  o.summary = std::to_string(identical) + "/" + std::to_string(configs.size()) + " configs byte-identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string cli;
  app.add_option("--cli", cli, "path to roughfilm_cli")->required();
  CLI11_PARSE(app, argc, argv);

  namespace v = roughfilm::verify;
  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "flow factor vs quadrature", [] { return from_rows(v::flowfactor()); }},
      {2, "Poiseuille and Darcy limits", [] { return from_rows(v::limits()); }},
      {3, "subcritical cell", [] { return from_rows(v::subcritical()); }},
      {4, "macro Reynolds", [] { return from_rows(v::macro()); }},
      {5, "temperature reconstruction", [] { return from_rows(v::temperature()); }},
      {6, "critical cell (3D)", [] { return from_rows(v::critical()); }},
      {7, "regime consistency", [] { return from_rows(v::consistency()); }},
      {8, "alternative closed forms reported", [] { return from_rows(v::discrepancy(), true); }},
      {9, "reproducibility", [&] { return reproducibility(cli); }}};

  bool all = true;
  std::vector<std::pair<int, Outcome>> outcomes;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = "exception";
      o.details.push_back(e.what());
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << " (" << o.summary << ")"
              << std::endl;
    outcomes.emplace_back(c.id, std::move(o));
  }
  for (const auto& [id, o] : outcomes) {
    if (o.details.empty()) continue;
    std::cout << "\ncriterion " << id << (o.pass ? " values:" : " failures:") << '\n';
    for (const auto& d : o.details) std::cout << "  " << d << '\n';
  }
  return all ? 0 : 1;
}
