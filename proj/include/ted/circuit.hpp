// circuit.hpp — Lumped-element circuit parameters to mode frequencies,
// impedances, flux-dependent couplings, and waveguide-induced relaxation.
//
// Unit convention: parameter files carry GHz / fF / pH / Ohm; everything in
// this header is SI (rad/s, F, H, Ohm, s). Conversion happens exactly once at
// ingestion (see io.hpp).

#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace ted {

namespace constants {
inline constexpr double h_planck = 6.62607015e-34;      // J s
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double e_charge = 1.602176634e-19;     // C
inline constexpr double phi0_reduced = hbar / (2 * e_charge);  // Wb
}  // namespace constants

struct CircuitParams {
    // junction energies, J (E/h in GHz at ingestion)
    double E_Jd = 0, E_Jc = 0, E_Jw = 0, E_Jcw = 0;
    // capacitances, F
    double C_d = 0, C_c = 0, C_w = 0, C_dc = 0, C_cw = 0, C_v = 0;
    // flux-line mutual inductances, H (carried through; drive amplitudes are
    // taken as dimensionless A_phi directly)
    double M_d = 0, M_p = 0;
    double R_load = 50.0;  // waveguide termination, Ohm

    void validate() const;  // throws on non-positive C or E_J
    // Appendix-style cap on the coupling junction; violation is a warning.
    bool coupling_junction_capped() const;
};

struct FluxPoint {
    double phi_bar = 0.0;   // dimensionless dc flux, radians (2pi-periodic)
    double amp = 0.0;       // dimensionless modulation amplitude A_phi
    double omega_p = 0.0;   // modulation angular frequency, rad/s

    void validate() const;  // amp >= 0; warns above 0.5 via return of quantize
};

struct QuantizedTed {
    double omega_d = 0, omega_c = 0, omega_w = 0;  // rad/s
    double nu_d = 0, nu_c = 0, nu_w = 0;           // anharmonicities, rad/s (negative)
    double Z_d = 0, Z_c = 0, Z_w = 0;              // Ohm
    double g_C = 0;                                // capacitive d-c coupling, rad/s
    double g_L0 = 0;                               // inductive coupling scale, rad/s
    double g_L_bar = 0;                            // g_L0 cos(phi_bar), rad/s
    double A_amp = 0;                              // g_L0 * A_phi * sin(phi_bar), rad/s
    std::vector<std::string> warnings;
};

// 3x3 capacitance matrix (F), ordered (d, c, w).
Eigen::Matrix3d capacitance_matrix(const CircuitParams& p);

// External-flux allocation across the three inductive branches (c, cw, w).
// Components sum to phi_p exactly.
std::array<double, 3> branch_fluxes(const CircuitParams& p, double phi_p);

// Effective inverse inductance matrix at a dc flux point (1/H). The flux is
// wrapped to its principal value first so the linearized model is exactly
// 2pi-periodic.
Eigen::Matrix3d inverse_inductance_matrix(const CircuitParams& p, double phi_bar);

QuantizedTed quantize(const CircuitParams& p, const FluxPoint& flux);

struct DispersionRow {
    double phi_bar = 0;
    double omega_d = 0, omega_c = 0, omega_w = 0;  // rad/s; NaN when invalid
    bool valid = true;
    std::string error;
};

// Normal-mode frequencies of the linearized circuit over a flux grid, labeled
// by maximal eigenvector overlap with the bare modes (ties broken by
// frequency order).
std::vector<DispersionRow> flux_dispersion(const CircuitParams& p,
                                           const std::vector<double>& phi_grid);

// Relaxation rate of the data mode from the real part of the node admittance,
// with the waveguide replaced by R_load. Gamma = Re(Y(omega)) / (C_d + C_dc).
double purcell_rate(const CircuitParams& p, double omega, const FluxPoint& flux);

}  // namespace ted
