#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "heatmass/common.hpp"
#include "heatmass/control_signal.hpp"
#include "heatmass/moment.hpp"
#include "heatmass/pde.hpp"
#include "heatmass/spectrum.hpp"
#include "heatmass/state.hpp"
#include "heatmass/verify.hpp"

namespace heatmass::io {

/// Full round-trip decimal formatting (17 significant digits).
std::string format_double(double v);

/// Columns: n, kind, mu, lambda, norm_sq, b, gap_to_next, asymptotic_deviation.
/// NaN cells are left empty; the mu column prints k*pi for the closed-form family.
void write_spectrum_csv(std::ostream& os, std::span<const spectrum::TableRow> rows);
std::string spectrum_json(std::span<const spectrum::TableRow> rows);

/// Columns: x, value, region with region in {u, v}, plus one z record.
void write_state_csv(std::ostream& os, const state::HybridState& y);
state::HybridState read_state_csv(std::istream& is);

/// Columns: t, f.
void write_control_csv(std::ostream& os, const ControlSignal& f);

/// Descriptor {case, T, N, lambdas, coeffs, condition, residuals, ...}.
std::string control_json(BoundaryCase bc, const moment::SynthesisResult& sol,
                         PrecisionMode mode);

/// Columns: t, norm_H, z, trace.
void write_trajectory_csv(std::ostream& os, const pde::Trajectory& traj);

std::string report_json(const verify::NullControlReport& rep);

}  // namespace heatmass::io
