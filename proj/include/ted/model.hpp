// model.hpp — Three-mode rotating-frame TED Hamiltonian, its two-mode
// reduction with time-dependent coupling g_p(t), and design-margin checks.
//
// Convention: an anharmonicity nu means the measured level spacing difference
// omega_12 - omega_01; Hamiltonians carry the quartic term (nu/2) a†²a², so a
// drive at |omega_w - omega_d| + nu_w sits exactly on the |11>..<->..|02>
// transition.

#pragma once

#include "ted/fock.hpp"
#include "ted/lindblad.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ted {

struct DriveEnvelope {
    enum class Kind { Constant, CosineSquared, Table };
    Kind kind = Kind::Constant;
    double amplitude = 0.0;  // rad/s
    double t0 = 0.0;         // center, s (CosineSquared)
    double T = 0.0;          // support width, s (CosineSquared)
    // piecewise-linear (t, value) samples, strictly increasing in t
    std::vector<std::pair<double, double>> table;

    static DriveEnvelope constant(double amplitude);
    // amplitude * cos^2(pi (t - t0)/T), zero outside (t0 - T/2, t0 + T/2)
    static DriveEnvelope cosine_squared(double amplitude, double t0, double T);
    static DriveEnvelope piecewise(std::vector<std::pair<double, double>> table);

    double value(double t) const;
    // rescaled copy with a new peak amplitude
    DriveEnvelope with_amplitude(double amplitude) const;
};

struct TedParams {
    double omega_d = 0, omega_c = 0, omega_w = 0;  // rad/s
    double nu_d = 0, nu_c = 0, nu_w = 0;           // rad/s
    double g_C = 0;                                // rad/s
    double gamma = 0;                              // waveguide decay of Q_w, 1/s
    double n_th = 0;                               // thermal occupation

    void validate() const;  // gamma > 0, omega_d != omega_w, n_th >= 0
};

struct DriveSpec {
    enum class Kind { Parametric, Coherent };
    Kind kind = Kind::Parametric;
    double omega = 0.0;  // carrier, rad/s
    DriveEnvelope envelope;
    double n_bar = 0.0;  // coherent drives: mean photons per 1/gamma

    static DriveSpec parametric(double omega_p, DriveEnvelope env);
    static DriveSpec coherent(double omega_alpha, DriveEnvelope env);
};

// Two-mode reduction of a parametrically driven TED.
struct EffectiveTed {
    double delta = 0.0;    // omega_w - omega_alpha (frame detuning of Q_w)
    double delta_p = 0.0;  // parametric detuning, magnitude-minimizing sign
    double nu_d = 0.0, nu_w = 0.0;
    DriveEnvelope g_p;        // effective coupling envelope, rad/s
    double stark_coeff = 0;   // d(omega_w) = stark_coeff * A(t)^2, 1/(rad/s)
    double a_per_gp = 0;      // A(t) = a_per_gp * g_p(t)
    double gamma = 0;
    double n_th = 0;
    bool stark_enabled = true;
    std::vector<std::string> warnings;
};

// Standard mode labels.
ProductSpace three_mode_space(int dim_d = 3, int dim_c = 3, int dim_w = 4);
ProductSpace two_mode_space(int dim_d = 3, int dim_w = 4);

// Doubly rotating frame Hamiltonian of the full three-mode TED. At most one
// parametric and one coherent drive.
TimeDependentOp rwa_hamiltonian(const TedParams& ted, const std::vector<DriveSpec>& drives,
                                const ProductSpace& space);
Op rwa_hamiltonian_at(const TedParams& ted, const std::vector<DriveSpec>& drives,
                      const ProductSpace& space, double t);

// Eliminate Q_c perturbatively. `omega_frame` fixes delta = omega_w -
// omega_frame (defaults to omega_w).
EffectiveTed schrieffer_wolff(const TedParams& ted, const DriveSpec& parametric,
                              std::optional<double> omega_frame = std::nullopt);

// (delta - delta_p) d†d + delta w†w + (nu/2) quartics - i g_p(t)(d†w - d w†)
// + Omega(t)(w + w†)/2, with the Stark-shifted w frequency when enabled.
TimeDependentOp effective_hamiltonian(const EffectiveTed& eff, const ProductSpace& space,
                                      const DriveEnvelope& coherent = DriveEnvelope::constant(0));
Op effective_hamiltonian_at(const EffectiveTed& eff, const ProductSpace& space, double t,
                            double omega_rabi = 0.0);

// Parametric carrier of the |11> <-> |02> transition: |omega_w - omega_d| + nu_w.
double detection_drive_frequency(const TedParams& ted);
double detection_drive_frequency(double omega_d, double omega_w, double nu_w);

struct DesignCheckItem {
    std::string name;
    double value = 0;
    double threshold = 0;
    std::string status;  // "pass" | "marginal" | "warn"
    std::string note;
};

struct DesignReport {
    std::vector<DesignCheckItem> items;
    bool all_pass() const;
};

// Margin checks: 0.005|omega_d - omega_c| vs gamma, dispersive-limit cap on
// g_C, drive-amplitude cap A <= g_C/2, and the coupling-junction energy cap
// when circuit parameters are supplied.
struct CircuitParams;  // fwd (circuit.hpp)
DesignReport design_check(const TedParams& ted, double drive_amp = 0.0,
                          const CircuitParams* circuit = nullptr);

}  // namespace ted
