// io.hpp — JSON parameter ingestion, CSV/JSON result emission, run manifests.
//
// Files carry GHz / fF / pH / Ohm and microseconds where noted by the field
// suffix; everything converts to SI exactly once here.

#pragma once

#include "ted/circuit.hpp"
#include "ted/model.hpp"
#include "ted/protocols.hpp"
#include "ted/slh.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ted::io {

// circuit parameters (Table-style JSON: E_Jd_GHz, C_d_fF, M_d_pH, R_load_Ohm)
CircuitParams circuit_params_from_json(const std::string& text);
std::string circuit_params_to_json(const CircuitParams& p);

// quantized/measured TED parameters (omega_d_GHz, nu_w_GHz, g_C_GHz,
// gamma_per_s, n_th); the same schema the quantize command emits
TedParams ted_params_from_json(const std::string& text);
std::string quantized_to_json(const QuantizedTed& q, const CircuitParams& p,
                              const FluxPoint& flux);

// network description: eta, phi_s_rad, phi_m_rad, sted/mted parameter blocks
struct NetworkFile {
    NetworkSpec spec;
    TedParams sted_params;
    TedParams mted_params;
};
NetworkFile network_from_json(const std::string& text);

// protocol file: segment list (reset | pi-pulse | half-pi-pulse | emission |
// detection-window | idle | readout) mapped onto a PitchProtocol. Commands
// without a detection window (emit) set need_window = false; the simulated
// span then ends after the emission plus any idle time.
PitchProtocol protocol_from_json(const std::string& text, bool need_window = true);

// optional flux-point fields (phi_bar_rad, A_phi, omega_p_GHz) in a circuit file
FluxPoint flux_from_json(const std::string& text);

// sweep file: up to two axes, values with unit-suffixed names
SweepSpec sweep_from_json(const std::string& text);

// CSV emission; floats formatted with %.12g so reruns are byte-identical
std::string result_table_to_csv(const ResultTable& table);
std::string trajectory_to_csv(const Trajectory& traj);
std::string dispersion_to_csv(const std::vector<DispersionRow>& rows);

// filesystem failures carry their own type so the CLI can map them to a
// dedicated exit code
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

// run manifest: resolved inputs, tolerances, truncations, versions, wall time
struct RunManifest {
    std::string command;
    std::string params_json;    // resolved file contents
    std::string protocol_json;  // empty when unused
    std::string sweep_json;
    std::string truncations;    // label=N list as given on the command line
    double tolerance = 1e-8;
    int jobs = 1;
    double wall_time_s = 0;
    std::vector<std::string> point_errors;  // per-point detail, empty = clean
    std::string version = "tedsim 1.0.0";
};
std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

// formatter shared by all emitters
std::string format_double(double v);

}  // namespace ted::io
