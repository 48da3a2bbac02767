#include "heatmass/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace heatmass::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_spectrum_csv(std::ostream& os, std::span<const spectrum::TableRow> table) {
  os << "n,kind,mu,lambda,norm_sq,b,gap_to_next,asymptotic_deviation\n";
  for (const auto& row : table) {
    const auto& p = row.pair;
    os << p.n << ',' << spectrum::to_string(p.kind) << ',' << format_double(p.frequency())
       << ',' << format_double(p.lambda) << ',' << format_double(p.norm_sq) << ','
       << format_double(p.b) << ',' << cell(row.gap_to_next) << ','
       << cell(row.asym_deviation) << '\n';
  }
}

std::string spectrum_json(std::span<const spectrum::TableRow> table) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : table) {
    const auto& p = row.pair;
    ordered_json r;
    r["n"] = p.n;
    r["kind"] = spectrum::to_string(p.kind);
    r["mu"] = p.frequency();
    r["lambda"] = p.lambda;
    r["norm_sq"] = p.norm_sq;
    r["b"] = p.b;
    if (!std::isnan(row.gap_to_next)) r["gap_to_next"] = row.gap_to_next;
    if (!std::isnan(row.asym_deviation)) r["asymptotic_deviation"] = row.asym_deviation;
    rows.push_back(std::move(r));
  }
  return rows.dump(2) + "\n";
}

void write_state_csv(std::ostream& os, const state::HybridState& y) {
  os << "x,value,region\n";
  const double h = y.dx();
  for (int i = 0; i <= y.mesh_n; ++i) {
    os << format_double(-1.0 + i * h) << ',' << format_double(y.u[i]) << ",u\n";
  }
  for (int i = 0; i <= y.mesh_n; ++i) {
    os << format_double(i * h) << ',' << format_double(y.v[i]) << ",v\n";
  }
  os << "0," << format_double(y.z) << ",z\n";
}

state::HybridState read_state_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::Io, "state csv: empty input");
  std::vector<double> u, v;
  double z = 0.0;
  bool have_z = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw Error(Errc::Io, "state csv: expected 3 columns: " + line);
    const double value = std::stod(cells[1]);
    if (cells[2] == "u") u.push_back(value);
    else if (cells[2] == "v") v.push_back(value);
    else if (cells[2] == "z") { z = value; have_z = true; }
    else throw Error(Errc::Io, "state csv: unknown region '" + cells[2] + "'");
  }
  if (u.size() < 5 || u.size() != v.size() || !have_z) {
    throw Error(Errc::Io, "state csv: need matching u/v sample columns and one z record");
  }
  state::HybridState y;
  y.mesh_n = static_cast<int>(u.size()) - 1;
  y.u = std::move(u);
  y.v = std::move(v);
  y.z = z;
  return y;
}

void write_control_csv(std::ostream& os, const ControlSignal& f) {
  os << "t,f\n";
  const int n = f.sample_n();
  if (n < 2) throw Error(Errc::Io, "control csv: signal has no samples");
  const double h = f.T / (n - 1);
  for (int i = 0; i < n; ++i) {
    os << format_double(i * h) << ',' << format_double(f.samples[i]) << '\n';
  }
}

std::string control_json(BoundaryCase bc, const moment::SynthesisResult& sol,
                         PrecisionMode mode) {
  const auto& f = sol.signal;
  ordered_json j;
  j["case"] = to_string(bc);
  j["T"] = f.T;
  j["N"] = static_cast<int>(f.coeffs.size());
  j["precision"] = to_string(mode);
  ordered_json lambdas = ordered_json::array();
  ordered_json coeffs = ordered_json::array();
  for (const auto& [lam, c] : f.coeffs) {
    lambdas.push_back(lam);
    coeffs.push_back(c);
  }
  j["lambdas"] = std::move(lambdas);
  j["coeffs"] = std::move(coeffs);
  if (f.ext) {
    ordered_json hi = ordered_json::array();
    for (int i = 0; i < f.ext->size(); ++i) hi.push_back(f.ext->coeff_string(i, 50));
    j["coeffs_hiprec"] = std::move(hi);
  }
  j["condition"] = sol.condition;
  j["degraded"] = sol.degraded;
  j["residuals"] = sol.residuals;
  j["l2_norm"] = f.l2_norm();
  j["sample_n"] = f.sample_n();
  return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& os, const pde::Trajectory& traj) {
  os << "t,norm_H,z,trace\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << format_double(traj.times[i]) << ',' << format_double(state::norm_h(traj.states[i]))
       << ',' << format_double(traj.states[i].z) << ','
       << format_double(traj.boundary_trace[i]) << '\n';
  }
}

std::string report_json(const verify::NullControlReport& rep) {
  ordered_json j;
  j["case"] = to_string(rep.bc);
  j["T"] = rep.T;
  j["N"] = rep.N;
  j["syn_n"] = rep.syn_n;
  j["mesh_n"] = rep.mesh_n;
  j["dt"] = rep.dt;
  j["scheme"] = to_string(rep.scheme);
  j["precision"] = to_string(rep.precision);
  j["seed"] = rep.seed;
  j["duhamel_sign"] = rep.duhamel_sign;
  j["initial_norm"] = rep.initial_norm;
  j["final_norm_fd"] = rep.final_norm_fd;
  j["final_modal"] = rep.final_modal;
  j["moment_residuals"] = rep.moment_residuals;
  j["gram_condition"] = rep.gram_condition;
  j["gram_degraded"] = rep.gram_degraded;
  j["control_norm"] = rep.control_norm;
  j["duality_gap"] = rep.duality_gap;
  j["tol_modal"] = rep.tol_modal;
  j["tol_fd"] = rep.tol_fd;
  // The Dirichlet end state lives naturally in a weaker dual space; the grid
  // figure reported here is the classical H-norm of the mesh function.
  j["norm_note"] = rep.bc == BoundaryCase::Dirichlet
                       ? "final_norm_fd is the grid H-norm; transposition solutions are "
                         "only H^{-}-valued in the Dirichlet case"
                       : "final_norm_fd is the grid H-norm";
  j["pass"] = rep.pass;
  return j.dump(2) + "\n";
}

}  // namespace heatmass::io
