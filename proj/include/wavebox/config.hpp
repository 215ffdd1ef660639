#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wavebox/errors.hpp"
#include "wavebox/geometry.hpp"
#include "wavebox/io.hpp"

namespace wavebox {

struct DomainConfig {
  int dim = 2;
  double m1 = 1.0;
  double m2 = 1.0;
  double rho = 1.0;
  double r_o = 0.25;
  double collar = -1.0;  // negative means "same as r_o"
};

struct DampingConfig {
  std::string profile = "indicator";
  double alpha_max = 1.0;
  std::string support = "lateral_collar";
};

struct SolverConfig {
  std::string kind = "galerkin";
  int n_modes = 64;
  int resolution = 64;
  double dt = 0.0;  // 0 = automatic from the stability bound
  double t_final = 10.0;
  int record_every = 1;
  double record_dt = 0.25;
  int substeps = 8;
  int quadrature_order = 12;
};

struct InitialConfig {
  std::string preset = "single_mode";
  std::array<int, 3> mode{1, 1, 1};
  int count = 8;
  std::array<int, 2> lateral{1, 1};
  double amplitude = 1.0;
};

struct AnalysisConfig {
  bool has_fit_window = false;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  std::string region = "union";
  double t_obs = 0.0;  // 0 = automatic
  int family = 50;
  std::string trace = "trace.csv";
};

struct RaysConfig {
  int count = 10000;
  double horizon_factor = 4.0;
  bool vertical_only = false;
  std::string positions = "all";
};

struct PacketsConfig {
  double h = 0.1;
  double gamma = 1.5;
  int xi_o3 = 1;
  int samples = 1000;
};

struct LemmaConfig {
  double c1 = 2.0;
  double c2 = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  std::string source = "synthetic";
  std::string trace = "trace.csv";
};

struct ExperimentConfig {
  DomainConfig domain;
  DampingConfig damping;
  SolverConfig solver;
  InitialConfig initial;
  AnalysisConfig analysis;
  RaysConfig rays;
  PacketsConfig packets;
  LemmaConfig lemma;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct ConfigErrors {
  std::vector<std::string> items;

  void add(const std::string& path, const std::string& what) {
    items.push_back(path + ": " + what);
  }
  void raise_if_any() const {
    if (items.empty()) return;
    std::string msg = "config invalid:";
    for (const std::string& e : items) {
      msg += "\n  ";
      msg += e;
    }
    throw validation_error(msg);
  }
};

inline bool parse_double_value(std::string_view v, double& out) {
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

inline bool parse_int_value(std::string_view v, int& out) {
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

inline bool parse_u64_value(std::string_view v, std::uint64_t& out) {
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

inline bool parse_bool_value(std::string_view v, bool& out) {
  if (v == "true") {
    out = true;
    return true;
  }
  if (v == "false") {
    out = false;
    return true;
  }
  return false;
}

// Up to `n` whitespace-separated integers; fewer leave the tail untouched.
template <std::size_t N>
bool parse_ints_value(std::string_view v, std::array<int, N>& out) {
  std::size_t slot = 0;
  while (!v.empty() && slot < N) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front())))
      v.remove_prefix(1);
    if (v.empty()) break;
    std::size_t len = 0;
    while (len < v.size() && !std::isspace(static_cast<unsigned char>(v[len]))) ++len;
    int val = 0;
    if (!parse_int_value(v.substr(0, len), val)) return false;
    out[slot++] = val;
    v.remove_prefix(len);
  }
  return slot > 0 && trim(v).empty();
}

inline bool one_of(const std::string& v, std::initializer_list<const char*> opts) {
  for (const char* o : opts) {
    if (v == o) return true;
  }
  return false;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  detail::ConfigErrors errs;
  std::string section;
  bool saw_fit_lo = false;
  bool saw_fit_hi = false;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, (nl == std::string_view::npos) ? text.size() - pos
                                                                            : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        errs.add("line " + std::to_string(line_no), "malformed section header");
        continue;
      }
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (!detail::one_of(section, {"experiment", "domain", "damping", "solver", "initial",
                                    "analysis", "rays", "packets", "lemma"})) {
        errs.add(section, "unknown section");
        section.clear();
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      errs.add("line " + std::to_string(line_no), "expected key = value");
      continue;
    }
    std::string key(detail::trim(line.substr(0, eq)));
    std::string_view val = detail::trim(line.substr(eq + 1));
    std::string path = section.empty() ? key : section + "." + key;
    if (section.empty()) {
      errs.add(path, "key outside any section");
      continue;
    }

    auto want_double = [&](double& slot) {
      if (!detail::parse_double_value(val, slot)) errs.add(path, "expected a number");
    };
    auto want_int = [&](int& slot) {
      if (!detail::parse_int_value(val, slot)) errs.add(path, "expected an integer");
    };
    auto want_bool = [&](bool& slot) {
      if (!detail::parse_bool_value(val, slot)) errs.add(path, "expected true or false");
    };
    auto want_string = [&](std::string& slot) { slot = std::string(val); };

    bool known = true;
    if (section == "experiment") {
      if (key == "seed") {
        if (!detail::parse_u64_value(val, cfg.seed)) errs.add(path, "expected an unsigned integer");
      } else {
        known = false;
      }
    } else if (section == "domain") {
      if (key == "dim") want_int(cfg.domain.dim);
      else if (key == "m1") want_double(cfg.domain.m1);
      else if (key == "m2") want_double(cfg.domain.m2);
      else if (key == "rho") want_double(cfg.domain.rho);
      else if (key == "r_o") want_double(cfg.domain.r_o);
      else if (key == "collar") want_double(cfg.domain.collar);
      else known = false;
    } else if (section == "damping") {
      if (key == "profile") want_string(cfg.damping.profile);
      else if (key == "alpha_max") want_double(cfg.damping.alpha_max);
      else if (key == "support") want_string(cfg.damping.support);
      else known = false;
    } else if (section == "solver") {
      if (key == "kind") want_string(cfg.solver.kind);
      else if (key == "n_modes") want_int(cfg.solver.n_modes);
      else if (key == "resolution") want_int(cfg.solver.resolution);
      else if (key == "dt") want_double(cfg.solver.dt);
      else if (key == "t_final") want_double(cfg.solver.t_final);
      else if (key == "record_every") want_int(cfg.solver.record_every);
      else if (key == "record_dt") want_double(cfg.solver.record_dt);
      else if (key == "substeps") want_int(cfg.solver.substeps);
      else if (key == "quadrature_order") want_int(cfg.solver.quadrature_order);
      else known = false;
    } else if (section == "initial") {
      if (key == "preset") want_string(cfg.initial.preset);
      else if (key == "mode") {
        if (!detail::parse_ints_value(val, cfg.initial.mode))
          errs.add(path, "expected 1 to 3 integers");
      } else if (key == "count") want_int(cfg.initial.count);
      else if (key == "lateral") {
        if (!detail::parse_ints_value(val, cfg.initial.lateral))
          errs.add(path, "expected 1 or 2 integers");
      } else if (key == "amplitude") want_double(cfg.initial.amplitude);
      else known = false;
    } else if (section == "analysis") {
      if (key == "fit_lo") {
        saw_fit_lo = true;
        want_double(cfg.analysis.fit_lo);
      } else if (key == "fit_hi") {
        saw_fit_hi = true;
        want_double(cfg.analysis.fit_hi);
      } else if (key == "region") want_string(cfg.analysis.region);
      else if (key == "t_obs") want_double(cfg.analysis.t_obs);
      else if (key == "family") want_int(cfg.analysis.family);
      else if (key == "trace") want_string(cfg.analysis.trace);
      else known = false;
    } else if (section == "rays") {
      if (key == "count") want_int(cfg.rays.count);
      else if (key == "horizon_factor") want_double(cfg.rays.horizon_factor);
      else if (key == "vertical_only") want_bool(cfg.rays.vertical_only);
      else if (key == "positions") want_string(cfg.rays.positions);
      else known = false;
    } else if (section == "packets") {
      if (key == "h") want_double(cfg.packets.h);
      else if (key == "gamma") want_double(cfg.packets.gamma);
      else if (key == "xi_o3") want_int(cfg.packets.xi_o3);
      else if (key == "samples") want_int(cfg.packets.samples);
      else known = false;
    } else if (section == "lemma") {
      if (key == "c1") want_double(cfg.lemma.c1);
      else if (key == "c2") want_double(cfg.lemma.c2);
      else if (key == "beta") want_double(cfg.lemma.beta);
      else if (key == "gamma") want_double(cfg.lemma.gamma);
      else if (key == "source") want_string(cfg.lemma.source);
      else if (key == "trace") want_string(cfg.lemma.trace);
      else known = false;
    }
    if (!known) errs.add(path, "unknown key");
  }

  // semantic checks, each named by its key path
  if (cfg.domain.collar < 0.0) cfg.domain.collar = cfg.domain.r_o;
  bool dim_ok = cfg.domain.dim == 2 || cfg.domain.dim == 3;
  if (!dim_ok) errs.add("domain.dim", "must be 2 or 3");
  double min_half = std::min({cfg.domain.m1, cfg.domain.m2, cfg.domain.rho});
  bool sides_ok = cfg.domain.m1 > 0.0 && cfg.domain.m2 > 0.0 && cfg.domain.rho > 0.0;
  bool r_o_ok = sides_ok && cfg.domain.r_o > 0.0 && cfg.domain.r_o < min_half / 2.0;
  if (!dim_ok) {
    // reported above; the remaining domain checks assume a valid dimension
  } else if (sides_ok && !r_o_ok) {
    errs.add("domain.r_o", "must satisfy 0 < r_o < min(m1, m2, rho)/2");
  } else if (r_o_ok && !(cfg.domain.collar > 0.0 && cfg.domain.collar <= cfg.domain.r_o)) {
    errs.add("domain.collar", "must satisfy 0 < collar <= r_o");
  } else {
    try {
      make_domain(cfg.domain.dim, cfg.domain.m1, cfg.domain.m2, cfg.domain.rho,
                  cfg.domain.r_o, cfg.domain.collar);
    } catch (const validation_error& e) {
      errs.add("domain", e.what());
    }
  }
  if (!detail::one_of(cfg.damping.profile, {"indicator", "smooth_bump"}))
    errs.add("damping.profile", "must be indicator or smooth_bump");
  if (!detail::one_of(cfg.damping.support, {"lateral_collar", "boundary_collar", "full_box"}))
    errs.add("damping.support", "must be lateral_collar, boundary_collar or full_box");
  if (!(cfg.damping.alpha_max >= 0.0))
    errs.add("damping.alpha_max", "must be >= 0");
  if (!detail::one_of(cfg.solver.kind, {"galerkin", "fdtd"}))
    errs.add("solver.kind", "must be galerkin or fdtd");
  if (cfg.solver.n_modes < 1) errs.add("solver.n_modes", "must be >= 1");
  if (cfg.solver.resolution < 4) errs.add("solver.resolution", "must be >= 4");
  if (!(cfg.solver.dt >= 0.0)) errs.add("solver.dt", "must be >= 0");
  if (!(cfg.solver.t_final >= 0.0)) errs.add("solver.t_final", "must be >= 0");
  if (cfg.solver.record_every < 1) errs.add("solver.record_every", "must be >= 1");
  if (!(cfg.solver.record_dt > 0.0)) errs.add("solver.record_dt", "must be > 0");
  if (cfg.solver.substeps < 2 || cfg.solver.substeps % 2 != 0)
    errs.add("solver.substeps", "must be even and >= 2");
  if (cfg.solver.quadrature_order < 2) errs.add("solver.quadrature_order", "must be >= 2");
  if (!detail::one_of(cfg.initial.preset, {"single_mode", "trapped_stack", "random_smooth"}))
    errs.add("initial.preset", "must be single_mode, trapped_stack or random_smooth");
  for (int d = 0; d < cfg.domain.dim && d < 3; ++d) {
    if (cfg.initial.mode[static_cast<std::size_t>(d)] < 1) {
      errs.add("initial.mode", "indices must be >= 1");
      break;
    }
  }
  if (cfg.initial.count < 1) errs.add("initial.count", "must be >= 1");
  if (cfg.initial.lateral[0] < 1 || cfg.initial.lateral[1] < 1)
    errs.add("initial.lateral", "indices must be >= 1");
  if (saw_fit_lo != saw_fit_hi)
    errs.add("analysis.fit_lo", "fit_lo and fit_hi must be given together");
  if (saw_fit_lo && saw_fit_hi) {
    cfg.analysis.has_fit_window = true;
    if (!(cfg.analysis.fit_lo < cfg.analysis.fit_hi))
      errs.add("analysis.fit_lo", "must be < analysis.fit_hi");
  }
  if (!detail::one_of(cfg.analysis.region, {"omega", "omega0", "union", "all"}))
    errs.add("analysis.region", "must be omega, omega0, union or all");
  if (!(cfg.analysis.t_obs >= 0.0)) errs.add("analysis.t_obs", "must be >= 0");
  if (cfg.analysis.family < 1) errs.add("analysis.family", "must be >= 1");
  if (cfg.rays.count < 1) errs.add("rays.count", "must be >= 1");
  if (!(cfg.rays.horizon_factor > 0.0)) errs.add("rays.horizon_factor", "must be > 0");
  if (!detail::one_of(cfg.rays.positions, {"omega", "omega0", "union", "all"}))
    errs.add("rays.positions", "must be omega, omega0, union or all");
  if (!(cfg.packets.h > 0.0) || cfg.packets.h > 1.0)
    errs.add("packets.h", "must lie in (0, 1]");
  if (!(cfg.packets.gamma >= 1.0)) errs.add("packets.gamma", "must be >= 1");
  if (cfg.packets.xi_o3 % 2 == 0) errs.add("packets.xi_o3", "must be odd");
  if (cfg.packets.samples < 10) errs.add("packets.samples", "must be >= 10");
  if (!(cfg.lemma.c1 > 1.0)) errs.add("lemma.c1", "must be > 1");
  if (!(cfg.lemma.c2 > 0.0)) errs.add("lemma.c2", "must be > 0");
  if (!(cfg.lemma.beta > 0.0)) errs.add("lemma.beta", "must be > 0");
  if (!(cfg.lemma.gamma > 0.0)) errs.add("lemma.gamma", "must be > 0");
  if (!detail::one_of(cfg.lemma.source, {"synthetic", "trace"}))
    errs.add("lemma.source", "must be synthetic or trace");

  errs.raise_if_any();
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  auto kv = [&](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  out += "[experiment]\n";
  kv("seed", std::to_string(cfg.seed));
  out += "\n[domain]\n";
  kv("dim", std::to_string(cfg.domain.dim));
  kv("m1", fmt_double(cfg.domain.m1));
  kv("m2", fmt_double(cfg.domain.m2));
  kv("rho", fmt_double(cfg.domain.rho));
  kv("r_o", fmt_double(cfg.domain.r_o));
  kv("collar", fmt_double(cfg.domain.collar));
  out += "\n[damping]\n";
  kv("profile", cfg.damping.profile);
  kv("alpha_max", fmt_double(cfg.damping.alpha_max));
  kv("support", cfg.damping.support);
  out += "\n[solver]\n";
  kv("kind", cfg.solver.kind);
  kv("n_modes", std::to_string(cfg.solver.n_modes));
  kv("resolution", std::to_string(cfg.solver.resolution));
  kv("dt", fmt_double(cfg.solver.dt));
  kv("t_final", fmt_double(cfg.solver.t_final));
  kv("record_every", std::to_string(cfg.solver.record_every));
  kv("record_dt", fmt_double(cfg.solver.record_dt));
  kv("substeps", std::to_string(cfg.solver.substeps));
  kv("quadrature_order", std::to_string(cfg.solver.quadrature_order));
  out += "\n[initial]\n";
  kv("preset", cfg.initial.preset);
  kv("mode", std::to_string(cfg.initial.mode[0]) + " " + std::to_string(cfg.initial.mode[1]) +
                 " " + std::to_string(cfg.initial.mode[2]));
  kv("count", std::to_string(cfg.initial.count));
  kv("lateral",
     std::to_string(cfg.initial.lateral[0]) + " " + std::to_string(cfg.initial.lateral[1]));
  kv("amplitude", fmt_double(cfg.initial.amplitude));
  out += "\n[analysis]\n";
  if (cfg.analysis.has_fit_window) {
    kv("fit_lo", fmt_double(cfg.analysis.fit_lo));
    kv("fit_hi", fmt_double(cfg.analysis.fit_hi));
  }
  kv("region", cfg.analysis.region);
  kv("t_obs", fmt_double(cfg.analysis.t_obs));
  kv("family", std::to_string(cfg.analysis.family));
  kv("trace", cfg.analysis.trace);
  out += "\n[rays]\n";
  kv("count", std::to_string(cfg.rays.count));
  kv("horizon_factor", fmt_double(cfg.rays.horizon_factor));
  kv("vertical_only", cfg.rays.vertical_only ? "true" : "false");
  kv("positions", cfg.rays.positions);
  out += "\n[packets]\n";
  kv("h", fmt_double(cfg.packets.h));
  kv("gamma", fmt_double(cfg.packets.gamma));
  kv("xi_o3", std::to_string(cfg.packets.xi_o3));
  kv("samples", std::to_string(cfg.packets.samples));
  out += "\n[lemma]\n";
  kv("c1", fmt_double(cfg.lemma.c1));
  kv("c2", fmt_double(cfg.lemma.c2));
  kv("beta", fmt_double(cfg.lemma.beta));
  kv("gamma", fmt_double(cfg.lemma.gamma));
  kv("source", cfg.lemma.source);
  kv("trace", cfg.lemma.trace);
  return out;
}

inline std::string config_hash(const ExperimentConfig& cfg) {
  return hex64(fnv1a64(serialize_config(cfg)));
}

inline DomainSpec domain_from_config(const ExperimentConfig& cfg) {
  return make_domain(cfg.domain.dim, cfg.domain.m1, cfg.domain.m2, cfg.domain.rho,
                     cfg.domain.r_o, cfg.domain.collar);
}

inline DampingField damping_from_config(const ExperimentConfig& cfg) {
  DampingProfile prof = (cfg.damping.profile == "indicator") ? DampingProfile::indicator
                                                             : DampingProfile::smooth_bump;
  DampingSupport sup = DampingSupport::lateral_collar;
  if (cfg.damping.support == "boundary_collar") sup = DampingSupport::boundary_collar;
  if (cfg.damping.support == "full_box") sup = DampingSupport::full_box;
  return make_damping(prof, cfg.damping.alpha_max, sup);
}

inline Region region_from_name(const std::string& name) {
  if (name == "omega") return Region::omega;
  if (name == "omega0") return Region::omega0;
  if (name == "union") return Region::omega_union;
  if (name == "all") return Region::all;
  throw validation_error("unknown region name: " + name);
}

}  // namespace wavebox
