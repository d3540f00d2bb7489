// protocols.hpp — End-to-end experiment scripts: backscatter characterization,
// reset, shaped emission, windowed detection, and the two-TED pitch-detect
// demonstration, with sweep/result plumbing shared by the CLI.

#pragma once

#include "ted/fock.hpp"
#include "ted/lindblad.hpp"
#include "ted/model.hpp"
#include "ted/slh.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ted {

// ---------------------------------------------------------------- sweeps ---

struct SweepAxis {
    std::string name;            // canonical snake_case, SI units
    std::vector<double> values;  // nonempty
};

struct SweepSpec {
    std::vector<SweepAxis> axes;  // up to two axes; empty = single run
    void validate() const;
    std::size_t n_points() const;
    // axis values of the flattened grid point (row-major over axes)
    std::vector<double> point(std::size_t index) const;
};

struct ResultRow {
    std::vector<double> axis_values;
    std::vector<double> values;  // one per ResultTable::columns entry
    bool ok = true;
    std::string error;
};

struct ResultTable {
    std::vector<std::string> axis_names;
    std::vector<std::string> columns;
    std::vector<ResultRow> rows;
    std::map<std::string, std::string> metadata;

    const ResultRow* best_row(const std::string& column, bool maximize = true) const;
    double value(const ResultRow& row, const std::string& column) const;
};

// Evaluate `fn(index)` for every grid point on `jobs` worker threads; results
// land in grid order regardless of completion order.
ResultTable run_sweep(const SweepSpec& sweep, int jobs,
                      const std::function<ResultRow(std::size_t)>& fn,
                      std::vector<std::string> axis_names, std::vector<std::string> columns,
                      const std::function<void(std::size_t)>& progress = nullptr);

// ---------------------------------------------------- scattering sweep -----

struct ScatterOptions {
    int dim_w = 4;  // 2 reproduces the two-level limit
};

// Steady-state backscatter |r| of a coherent drive on Q_w over (n_bar, delta)
// grids. r = <a_out>/sqrt(gamma n_bar) with <a_out> = sqrt(gamma n_bar)
// + sqrt(gamma/2) <w>.
ResultTable scattering_sweep(const TedParams& ted, const std::vector<double>& n_bar_grid,
                             const std::vector<double>& detuning_grid,
                             const ScatterOptions& opts = {}, int jobs = 1);

// Single-point helper used by tests.
double scattering_r(double gamma, double nu_w, double n_th, double n_bar, double detuning,
                    int dim_w);

// ------------------------------------------------------------- reset -------

// Constant resonant g_p exchange against the thermal waveguide; returns the
// final <d†d>.
double simulate_reset(const EffectiveTed& eff, double duration, double initial_excited,
                      int dim_d = 2, int dim_w = 2, double rtol = 1e-8);

// ------------------------------------------------------------ emission -----

struct EmissionResult {
    Trajectory traj;          // records: "a_out", "n_d", "n_w"
    double residual_d = 0;    // <d†d> at the end
    double leakage_w = 0;     // <w†w> at the end
    double p_emitted = 0;     // integral of gamma <w†w> dt
};

// Shaped release of the state stored on Q_d. `initial` is the single-mode ket
// (c0, c1) on Q_d; the waveguide mode starts in vacuum.
EmissionResult simulate_emission(const EffectiveTed& sted, const DriveEnvelope& envelope,
                                 const Vector& initial, double t_end, int dim_d = 2,
                                 int dim_w = 2, double rtol = 1e-8, int n_samples = 2401);

// Fraction of the emitted waveform outside the detector's matched-absorber
// bandwidth (Lorentzian power response of half-width gamma_m about the
// carrier).
double emission_clipping_estimate(const EmissionResult& emission, double gamma_m);

// ------------------------------------------------------------ detection ----

struct DetectionInput {
    enum class Kind { None, Coherent };
    Kind kind = Kind::None;
    double n_bar = 0.0;  // coherent power, photons per 1/gamma
    static DetectionInput none() { return {}; }
    static DetectionInput coherent(double n_bar);
};

struct DetectionResult {
    double n_d_end = 0;       // <d†d> after the window
    double n_d_reference = 0; // companion no-input run
    double p_detect = 0;      // (reference - end)/reference
};

// Windowed detection on one TED prepared in |10>: parametric drive on the
// |11> <-> |02> transition while a coherent tone (or nothing) illuminates the
// waveguide. The EffectiveTed must already be configured on the detection
// carrier (delta_p = -nu_w at zero excursion).
DetectionResult simulate_detection(const EffectiveTed& mted, const DetectionInput& input,
                                   double window, double g_p, int dim_d = 2, int dim_w = 3,
                                   double rtol = 1e-8, std::optional<double> t1_d = std::nullopt);

// EffectiveTed preset on the |11> <-> |02> carrier for a measured TED.
EffectiveTed make_detection_effective(const TedParams& ted, double omega_frame_offset = 0.0);

// ------------------------------------------------------------ dark counts --

// 1 - exp(-(window + readout)/T1)
double dark_count_estimate(double t1, double window, double readout);

// ------------------------------------------------------------ pitch-detect -

struct PitchProtocol {
    // instantaneous ideal preparations before the window opens
    double initial_excited_s = 1.0;  // P(|1>) on Q_ds
    double initial_excited_m = 1.0;  // P(|1>) on Q_dm
    bool superposition_s = false;    // (|0>+|1>)/sqrt(2) on Q_ds
    bool superposition_m = false;
    // shaped emission inside the detection window
    double g_ps_peak = 0;     // rad/s
    double emission_T = 2e-6; // s
    double emission_mid = 1.5e-6;  // s, relative to window start
    // detection
    double g_pm = 0;          // rad/s, constant over the window
    double window = 6e-6;     // s
    double readout = 0.0;     // s, idle relaxation after the window
    // optional intrinsic data-qubit channels (0 disables)
    double t1_d = 0.0;        // s
    double t2_d = 0.0;        // s
    // integration
    double rtol = 1e-8;
    int n_samples = 601;

    void validate() const;
};

struct PitchPointResult {
    double n_dm_end = 0;
    double n_dm_reference = 0;
    double p_detect = 0;  // normalized: [dark-limited population, 1] -> [1, 0]
    Trajectory traj;      // photon run, records n_ds/n_dm/a_out/b_out
};

// One full pitch-detect run (photon + companion normalization run).
PitchPointResult run_pitch_point(const NetworkSpec& spec, const PitchProtocol& protocol,
                                 const ProductSpace& space, bool store_trajectory = false);

// Sweepable axes: delta_omega_wm, delta_omega_pm (rad/s), g_pm (rad/s),
// arrival_time (s), eta. Emits one row per grid point with columns
// p_detect, n_dm_end, n_dm_reference.
ResultTable pitch_detect(const NetworkSpec& spec, const PitchProtocol& protocol,
                         const SweepSpec& sweep, const ProductSpace& space, int jobs = 1,
                         const std::function<void(std::size_t)>& progress = nullptr);

// ------------------------------------------------------------ records ------

struct SpectralRecord {
    std::vector<double> freq_hz;
    std::vector<double> magnitude;
    double bin_hz = 0;
};

// Flat-top windowed FFT magnitude of a uniformly sampled complex record,
// zero-padded x4. Frequencies are two-sided and centered on the rotating
// frame.
SpectralRecord spectral_record(const std::vector<double>& times,
                               const std::vector<Complex>& record);
std::map<std::string, SpectralRecord> spectral_records(const Trajectory& traj);

// ------------------------------------------------------------ Fock check ---

struct FockCheckRow {
    int n_ds = 0;
    int n_dm = 0;
    double a_power_integral = 0;  // relative to the |0000> reference
    double b_power_integral = 0;
};

// Integrated output powers at the 0<->1 and 1<->2 emission frequencies for
// all four initial Fock configurations, referenced to |0000>.
std::vector<FockCheckRow> fock_check_table(const NetworkSpec& spec,
                                           const PitchProtocol& protocol,
                                           const ProductSpace& space, int jobs = 1);

}  // namespace ted
