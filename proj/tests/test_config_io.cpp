#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wavebox/commands.hpp"
#include "wavebox/config.hpp"
#include "wavebox/io.hpp"
#include "wavebox/svg.hpp"
#include "wavebox/trace.hpp"

using namespace wavebox;
using Catch::Matchers::ContainsSubstring;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("wavebox_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }

  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) { return read_text_file(path); }

// Points of the first <polyline ...> element (the data curve).
std::vector<std::pair<double, double>> first_polyline(const std::string& svg) {
  std::size_t at = svg.find("<polyline");
  REQUIRE(at != std::string::npos);
  std::size_t p = svg.find("points=\"", at);
  REQUIRE(p != std::string::npos);
  p += 8;
  std::size_t end = svg.find('"', p);
  REQUIRE(end != std::string::npos);
  std::string body = svg.substr(p, end - p);
  std::vector<std::pair<double, double>> pts;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string::npos) break;
    std::size_t space = body.find(' ', comma);
    if (space == std::string::npos) space = body.size();
    pts.emplace_back(std::stod(body.substr(pos, comma - pos)),
                     std::stod(body.substr(comma + 1, space - comma - 1)));
    pos = space + 1;
  }
  return pts;
}

}  // namespace

TEST_CASE("empty config text yields documented defaults") {
  ExperimentConfig cfg = parse_config("");
  CHECK(cfg.domain.dim == 2);
  CHECK(cfg.domain.m1 == 1.0);
  CHECK(cfg.domain.m2 == 1.0);
  CHECK(cfg.domain.rho == 1.0);
  CHECK(cfg.domain.r_o == 0.25);
  CHECK(cfg.domain.collar == 0.25);  // unset collar resolves to r_o
  CHECK(cfg.damping.profile == "indicator");
  CHECK(cfg.damping.alpha_max == 1.0);
  CHECK(cfg.damping.support == "lateral_collar");
  CHECK(cfg.solver.kind == "galerkin");
  CHECK(cfg.solver.n_modes == 64);
  CHECK(cfg.seed == 1);
  CHECK_FALSE(cfg.analysis.has_fit_window);
}

TEST_CASE("collar resolution tracks an explicit r_o") {
  ExperimentConfig cfg = parse_config("[domain]\nr_o = 0.1\n");
  CHECK(cfg.domain.r_o == 0.1);
  CHECK(cfg.domain.collar == 0.1);

  cfg = parse_config("[domain]\nr_o = 0.2\ncollar = 0.05\n");
  CHECK(cfg.domain.collar == 0.05);
}

TEST_CASE("domain semantic errors carry the precise key path") {
  CHECK_THROWS_WITH(parse_config("[domain]\nr_o = 0.6\n"),
                    ContainsSubstring("domain.r_o"));
  CHECK_THROWS_WITH(parse_config("[domain]\nr_o = 0.6\n"),
                    ContainsSubstring("config invalid"));
  CHECK_THROWS_WITH(parse_config("[domain]\nr_o = 0.25\ncollar = 0.5\n"),
                    ContainsSubstring("domain.collar"));
  CHECK_THROWS_WITH(parse_config("[domain]\nm1 = -1\n"), ContainsSubstring("domain:"));
  CHECK_THROWS_WITH(parse_config("[domain]\ndim = 4\n"), ContainsSubstring("domain.dim"));
}

TEST_CASE("parse failures name the offending line or key") {
  CHECK_THROWS_WITH(parse_config("[bogus]\n"), ContainsSubstring("unknown section"));
  CHECK_THROWS_WITH(parse_config("n_modes = 3\n"),
                    ContainsSubstring("key outside any section"));
  CHECK_THROWS_WITH(parse_config("[domain\n"),
                    ContainsSubstring("line 1: malformed section header"));
  CHECK_THROWS_WITH(parse_config("\n\n[solver\n"),
                    ContainsSubstring("line 3: malformed section header"));
  CHECK_THROWS_WITH(parse_config("[solver]\nn_modes = abc\n"),
                    ContainsSubstring("solver.n_modes: expected an integer"));
  CHECK_THROWS_WITH(parse_config("[domain]\nrho = fast\n"),
                    ContainsSubstring("domain.rho: expected a number"));
  CHECK_THROWS_WITH(parse_config("[domain]\nwidth = 3\n"),
                    ContainsSubstring("domain.width: unknown key"));
  CHECK_THROWS_WITH(parse_config("[domain]\njust a phrase\n"),
                    ContainsSubstring("expected key = value"));
}

TEST_CASE("comments and blank lines are ignored") {
  ExperimentConfig cfg = parse_config(
      "# leading comment\n"
      "\n"
      "[solver]   # trailing comment\n"
      "n_modes = 12  # twelve\n"
      "\n");
  CHECK(cfg.solver.n_modes == 12);
}

TEST_CASE("fit window keys are accepted only as a valid pair") {
  CHECK_THROWS_WITH(parse_config("[analysis]\nfit_lo = 1\n"),
                    ContainsSubstring("fit_lo and fit_hi must be given together"));
  CHECK_THROWS_WITH(parse_config("[analysis]\nfit_hi = 10\n"),
                    ContainsSubstring("fit_lo and fit_hi must be given together"));
  CHECK_THROWS_WITH(parse_config("[analysis]\nfit_lo = 10\nfit_hi = 2\n"),
                    ContainsSubstring("must be < analysis.fit_hi"));

  ExperimentConfig cfg = parse_config("[analysis]\nfit_lo = 2\nfit_hi = 10\n");
  CHECK(cfg.analysis.has_fit_window);
  CHECK(cfg.analysis.fit_lo == 2.0);
  CHECK(cfg.analysis.fit_hi == 10.0);
}

TEST_CASE("serialize and reparse is a fixed point") {
  const char* text =
      "[domain]\n"
      "dim = 3\n"
      "m1 = 2\n"
      "m2 = 1.5\n"
      "rho = 1\n"
      "r_o = 0.3\n"
      "collar = 0.2\n"
      "[damping]\n"
      "profile = smooth_bump\n"
      "alpha_max = 2.5\n"
      "support = boundary_collar\n"
      "[solver]\n"
      "kind = fdtd\n"
      "resolution = 48\n"
      "t_final = 7.5\n"
      "[initial]\n"
      "preset = trapped_stack\n"
      "mode = 2 1 3\n"
      "count = 6\n"
      "[analysis]\n"
      "fit_lo = 2\n"
      "fit_hi = 30\n"
      "[rays]\n"
      "count = 500\n"
      "vertical_only = true\n"
      "[packets]\n"
      "h = 0.2\n"
      "xi_o3 = -3\n"
      "[lemma]\n"
      "c1 = 3\n"
      "source = synthetic\n"
      "[experiment]\n"
      "seed = 42\n";
  ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.domain.dim == 3);
  CHECK(cfg.damping.profile == "smooth_bump");
  CHECK(cfg.solver.kind == "fdtd");
  CHECK(cfg.initial.mode[0] == 2);
  CHECK(cfg.initial.mode[2] == 3);
  CHECK(cfg.rays.vertical_only);
  CHECK(cfg.packets.xi_o3 == -3);
  CHECK(cfg.seed == 42);

  std::string s1 = serialize_config(cfg);
  ExperimentConfig cfg2 = parse_config(s1);
  std::string s2 = serialize_config(cfg2);
  CHECK(s1 == s2);
  CHECK(config_hash(cfg) == config_hash(cfg2));
}

TEST_CASE("config hash is 16 hex chars and value sensitive") {
  ExperimentConfig a = parse_config("");
  std::string ha = config_hash(a);
  REQUIRE(ha.size() == 16);
  for (char c : ha) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  CHECK(config_hash(parse_config("")) == ha);

  ExperimentConfig b = parse_config("[experiment]\nseed = 2\n");
  CHECK(config_hash(b) != ha);
  ExperimentConfig c = parse_config("[solver]\nn_modes = 65\n");
  CHECK(config_hash(c) != ha);
}

TEST_CASE("fnv1a64 matches the reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
}

TEST_CASE("text file io creates parents and reports missing files") {
  TempDir dir("io");
  std::string nested = (dir.path / "a" / "b" / "note.txt").string();
  write_text_file(nested, "hello\nworld\n");
  CHECK(slurp(nested) == "hello\nworld\n");
  CHECK_THROWS_AS(read_text_file(dir.file("absent.txt")), validation_error);
  CHECK_THROWS_WITH(read_text_file(dir.file("absent.txt")),
                    ContainsSubstring("cannot open for reading"));
}

TEST_CASE("trace csv round trip preserves every sample") {
  EnergyTrace tr;
  tr.t = {0.0, 0.5, 1.25, 2.0};
  tr.energy = {4.0, 3.1, 2.25, 1.9};
  tr.dissipation = {0.0, 0.9, 1.75, 2.1};
  std::string csv = trace_to_csv(tr);
  CHECK(csv.rfind("t,energy,dissipation", 0) == 0);
  EnergyTrace back = trace_from_csv(csv);
  REQUIRE(back.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.t[i] == tr.t[i]);
    CHECK(back.energy[i] == tr.energy[i]);
    CHECK(back.dissipation[i] == tr.dissipation[i]);
  }

  EnergyTrace lean;
  lean.t = {0.0, 1.0};
  lean.energy = {2.0, 1.0};
  std::string csv2 = trace_to_csv(lean);
  CHECK(csv2.rfind("t,energy\n", 0) == 0);
  EnergyTrace back2 = trace_from_csv(csv2);
  CHECK(back2.dissipation.empty());
  CHECK(back2.energy[1] == 1.0);
}

TEST_CASE("trace validation rejects inconsistent columns") {
  EnergyTrace tr;
  tr.t = {0.0, 1.0};
  tr.energy = {1.0};
  CHECK_THROWS_AS(validate_trace(tr), validation_error);

  tr.energy = {1.0, 0.5};
  tr.dissipation = {0.0};
  CHECK_THROWS_AS(validate_trace(tr), validation_error);

  tr.dissipation.clear();
  tr.t = {1.0, 1.0};
  CHECK_THROWS_AS(validate_trace(tr), validation_error);
}

TEST_CASE("constant trace renders as a horizontal polyline") {
  EnergyTrace tr;
  for (int i = 0; i <= 8; ++i) {
    tr.t.push_back(1.0 + 0.5 * i);
    tr.energy.push_back(3.7);
  }
  PlotStyle style;
  std::string svg = plot_trace(tr, style);
  auto pts = first_polyline(svg);
  REQUIRE(pts.size() == tr.size());
  for (const auto& [x, y] : pts) {
    (void)x;
    CHECK(std::abs(y - pts.front().second) <= 0.02);
  }
  CHECK(pts.back().first > pts.front().first);
}

TEST_CASE("power law on log-log axes is straight to within one pixel") {
  EnergyTrace tr;
  for (int i = 0; i < 40; ++i) {
    double t = std::pow(10.0, 2.0 * i / 39.0);  // 1 .. 100
    tr.t.push_back(t);
    tr.energy.push_back(5.0 * std::pow(t, -1.7));
  }
  PlotStyle style;
  style.loglog = true;
  std::string svg = plot_trace(tr, style);
  auto pts = first_polyline(svg);
  REQUIRE(pts.size() == tr.size());
  double x0 = pts.front().first, y0 = pts.front().second;
  double x1 = pts.back().first, y1 = pts.back().second;
  REQUIRE(x1 > x0);
  for (const auto& [x, y] : pts) {
    double chord = y0 + (x - x0) * (y1 - y0) / (x1 - x0);
    CHECK(std::abs(y - chord) <= 1.0);
  }
}

TEST_CASE("fit overlay appears exactly when a fit is supplied") {
  EnergyTrace tr;
  for (int i = 0; i < 20; ++i) {
    double t = 1.0 + i;
    tr.t.push_back(t);
    tr.energy.push_back(5.0 * std::pow(t, -1.3));
  }
  PlotStyle style;
  style.loglog = true;
  std::string plain = plot_trace(tr, style);
  CHECK(plain.find("class=\"fit\"") == std::string::npos);

  DecayFit fit;
  fit.amplitude = 5.0;
  fit.delta = 1.3;
  fit.t_lo = 1.0;
  fit.t_hi = 20.0;
  std::string overlaid = plot_trace(tr, style, &fit);
  CHECK(overlaid.find("class=\"fit\"") != std::string::npos);
  CHECK(overlaid.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("loglog plot with no positive samples reports the filtering") {
  EnergyTrace tr;
  tr.t = {0.0};
  tr.energy = {0.0};
  PlotStyle style;
  style.loglog = true;
  CHECK_THROWS_WITH(plot_trace(tr, style),
                    ContainsSubstring("nothing to plot after axis filtering"));
}

TEST_CASE("validate command writes a stamped report") {
  TempDir dir("validate");
  ExperimentConfig cfg = parse_config("");
  CommandOutcome out = run_command("validate", cfg, dir.str());
  CHECK(out.exit_code == 0);
  std::string body = slurp(dir.file("validate.json"));
  auto j = nlohmann::json::parse(body);
  CHECK(j.at("version").get<std::string>() == std::string(kVersion));
  CHECK(j.at("config_hash").get<std::string>() == config_hash(cfg));
}

TEST_CASE("undamped simulate keeps the energy column constant") {
  TempDir dir("sim_undamped");
  ExperimentConfig cfg = parse_config(
      "[damping]\nalpha_max = 0\n"
      "[solver]\nn_modes = 4\nt_final = 2\nrecord_dt = 0.25\nsubsteps = 8\n"
      "[initial]\npreset = single_mode\nmode = 1 1\n");
  CommandOutcome out = run_command("simulate", cfg, dir.str());
  REQUIRE(out.exit_code == 0);
  EnergyTrace tr = trace_from_csv(slurp(dir.file("trace.csv")));
  REQUIRE(tr.size() == 9);
  double e0 = tr.energy.front();
  REQUIRE(e0 > 0.0);
  for (double e : tr.energy) CHECK(std::abs(e - e0) <= 1e-10 * e0);
  for (double d : tr.dissipation) CHECK(std::abs(d) <= 1e-12 * e0);
  auto j = nlohmann::json::parse(slurp(dir.file("summary.json")));
  CHECK(j.at("balance_residual_max").get<double>() <= 1e-10 * e0);
  CHECK(slurp(dir.file("trace.svg")).find("<svg") != std::string::npos);
}

TEST_CASE("simulate and rays are byte deterministic for a fixed config") {
  ExperimentConfig sim = parse_config(
      "[damping]\nalpha_max = 0.8\n"
      "[solver]\nn_modes = 6\nt_final = 1.5\nrecord_dt = 0.25\n"
      "[initial]\npreset = random_smooth\ncount = 6\n"
      "[experiment]\nseed = 7\n");
  TempDir a("det_a"), b("det_b");
  REQUIRE(run_command("simulate", sim, a.str()).exit_code == 0);
  REQUIRE(run_command("simulate", sim, b.str()).exit_code == 0);
  CHECK(slurp(a.file("trace.csv")) == slurp(b.file("trace.csv")));
  CHECK(slurp(a.file("summary.json")) == slurp(b.file("summary.json")));
  CHECK(slurp(a.file("trace.svg")) == slurp(b.file("trace.svg")));

  ExperimentConfig ray = parse_config("[rays]\ncount = 200\n[experiment]\nseed = 9\n");
  TempDir c("det_c"), d("det_d");
  REQUIRE(run_command("rays", ray, c.str()).exit_code == 0);
  REQUIRE(run_command("rays", ray, d.str()).exit_code == 0);
  std::string rays_csv = slurp(c.file("rays.csv"));
  CHECK(rays_csv == slurp(d.file("rays.csv")));
  CHECK(rays_csv.rfind("x0,x1,x2,v0,v1,v2,status,time,traced,reflections", 0) == 0);
  CHECK(slurp(c.file("rays_summary.json")) == slurp(d.file("rays_summary.json")));
}

TEST_CASE("unknown command exits 2 and records the error") {
  TempDir dir("unknown_cmd");
  ExperimentConfig cfg = parse_config("");
  CommandOutcome out = run_command("frobnicate", cfg, dir.str());
  CHECK(out.exit_code == 2);
  auto j = nlohmann::json::parse(slurp(dir.file("error.json")));
  CHECK(j.at("error").at("kind").get<std::string>() == "validation");
  CHECK(j.at("error").at("command").get<std::string>() == "frobnicate");
}

TEST_CASE("decay-fit on a missing trace exits 2") {
  TempDir dir("fit_missing");
  ExperimentConfig cfg = parse_config("");
  CommandOutcome out = run_command("decay-fit", cfg, dir.str());
  CHECK(out.exit_code == 2);
  CHECK(fs::exists(dir.path / "error.json"));
}

TEST_CASE("decay-fit recovers a planted power law end to end") {
  TempDir dir("fit_roundtrip");
  EnergyTrace tr;
  for (int i = 0; i < 200; ++i) {
    double t = 0.5 + 0.5 * i;
    tr.t.push_back(t);
    tr.energy.push_back(3.0 * std::pow(t, -2.0));
  }
  write_text_file(dir.file("trace.csv"), trace_to_csv(tr));
  ExperimentConfig cfg = parse_config("[analysis]\nfit_lo = 5\nfit_hi = 90\n");
  CommandOutcome out = run_command("decay-fit", cfg, dir.str());
  REQUIRE(out.exit_code == 0);
  auto j = nlohmann::json::parse(slurp(dir.file("fit.json")));
  CHECK(std::abs(j.at("delta").get<double>() - 2.0) <= 1e-9);
  CHECK(std::abs(j.at("amplitude").get<double>() - 3.0) <= 1e-8);
  CHECK(j.at("halving").at("kind").get<std::string>() == "power_law");
  std::string svg = slurp(dir.file("fit.svg"));
  CHECK(svg.find("class=\"fit\"") != std::string::npos);
}

TEST_CASE("lemma-check synthetic suite fails loudly when c1 is too tight") {
  TempDir dir("lemma_tight");
  ExperimentConfig cfg = parse_config("[lemma]\nc1 = 1.01\n");
  CommandOutcome out = run_command("lemma-check", cfg, dir.str());
  CHECK(out.exit_code == 4);
  auto j = nlohmann::json::parse(slurp(dir.file("lemma.json")));
  CHECK_FALSE(j.at("suite_pass").get<bool>());
}
