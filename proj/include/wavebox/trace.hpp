#pragma once

// Time-stamped energy records shared by the modal and grid solvers and the
// decay analyzer, with deterministic CSV round-tripping.

#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavebox/errors.hpp"
#include "wavebox/io.hpp"

namespace wavebox {

struct EnergyTrace {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<double> dissipation;  // empty when the producer tracks none

  std::size_t size() const { return t.size(); }
  bool has_dissipation() const { return !dissipation.empty(); }
};

inline void validate_trace(const EnergyTrace& tr) {
  if (tr.t.size() != tr.energy.size())
    throw validation_error("trace times and energies must have equal length");
  if (tr.has_dissipation() && tr.dissipation.size() != tr.t.size())
    throw validation_error("trace dissipation length mismatch");
  for (std::size_t i = 1; i < tr.t.size(); ++i) {
    if (!(tr.t[i] > tr.t[i - 1])) throw validation_error("trace times must be strictly increasing");
  }
}

inline std::string trace_to_csv(const EnergyTrace& tr) {
  validate_trace(tr);
  std::string out = tr.has_dissipation() ? "t,energy,dissipation\n" : "t,energy\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    out += fmt_double(tr.t[i]);
    out += ',';
    out += fmt_double(tr.energy[i]);
    if (tr.has_dissipation()) {
      out += ',';
      out += fmt_double(tr.dissipation[i]);
    }
    out += '\n';
  }
  return out;
}

inline EnergyTrace trace_from_csv(std::string_view text) {
  EnergyTrace tr;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  bool with_diss = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      with_diss = line.find("dissipation") != std::string::npos;
      header = false;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() < 2) throw validation_error("trace CSV row needs at least t,energy");
    tr.t.push_back(vals[0]);
    tr.energy.push_back(vals[1]);
    if (with_diss && vals.size() >= 3) tr.dissipation.push_back(vals[2]);
  }
  validate_trace(tr);
  return tr;
}

}  // namespace wavebox
