#include "ted/circuit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace ted {

namespace {

double junction_inductance(double E_J) {
    using namespace constants;
    return phi0_reduced * phi0_reduced / E_J;
}

double wrap_principal(double phi) {
    // map to (-pi, pi]
    double x = std::remainder(phi, 2.0 * M_PI);
    if (x <= -M_PI) x += 2.0 * M_PI;
    return x;
}

}  // namespace

void CircuitParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0)) {
            throw std::invalid_argument(std::string("CircuitParams: ") + name +
                                        " must be positive");
        }
    };
    positive(E_Jd, "E_Jd");
    positive(E_Jc, "E_Jc");
    positive(E_Jw, "E_Jw");
    positive(E_Jcw, "E_Jcw");
    positive(C_d, "C_d");
    positive(C_c, "C_c");
    positive(C_w, "C_w");
    positive(C_dc, "C_dc");
    positive(C_cw, "C_cw");
    positive(C_v, "C_v");
    positive(R_load, "R_load");
}

bool CircuitParams::coupling_junction_capped() const {
    return E_Jcw <= 0.2 * std::min(E_Jc, E_Jw);
}

void FluxPoint::validate() const {
    if (amp < 0) throw std::invalid_argument("FluxPoint: modulation amplitude must be >= 0");
}

Eigen::Matrix3d capacitance_matrix(const CircuitParams& p) {
    p.validate();
    Eigen::Matrix3d c;
    c << p.C_d + p.C_dc, -p.C_dc, 0.0,
        -p.C_dc, p.C_c + p.C_dc + p.C_cw, -p.C_cw,
        0.0, -p.C_cw, p.C_w + p.C_cw + p.C_v;
    Eigen::LLT<Eigen::Matrix3d> llt(c);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("capacitance_matrix: not positive definite (unphysical)");
    }
    return c;
}

std::array<double, 3> branch_fluxes(const CircuitParams& p, double phi_p) {
    p.validate();
    // cofactor products for the charge-cancelling allocation, normalized so
    // the three components close to phi_p
    const double r_c = p.C_cw * p.C_w;
    const double r_cw = p.C_c * p.C_w;
    const double r_w = -p.C_cw * p.C_c;
    const double sum = r_c + r_cw + r_w;
    if (std::abs(sum) < 1e-60) {
        throw std::invalid_argument("branch_fluxes: singular capacitance network");
    }
    return {phi_p * r_c / sum, phi_p * r_cw / sum, phi_p * r_w / sum};
}

Eigen::Matrix3d inverse_inductance_matrix(const CircuitParams& p, double phi_bar) {
    const double L_d = junction_inductance(p.E_Jd);
    const double L_c = junction_inductance(p.E_Jc);
    const double L_w = junction_inductance(p.E_Jw);
    const double L_cw = junction_inductance(p.E_Jcw);
    const auto [phi_c, phi_cw, phi_w] = branch_fluxes(p, wrap_principal(phi_bar));
    Eigen::Matrix3d li = Eigen::Matrix3d::Zero();
    li(0, 0) = 1.0 / L_d;
    li(1, 1) = std::cos(phi_c) / L_c + std::cos(phi_cw) / L_cw;
    li(2, 2) = std::cos(phi_w) / L_w + std::cos(phi_cw) / L_cw;
    li(1, 2) = li(2, 1) = -std::cos(phi_cw) / L_cw;
    return li;
}

QuantizedTed quantize(const CircuitParams& p, const FluxPoint& flux) {
    using namespace constants;
    p.validate();
    flux.validate();

    QuantizedTed q;
    if (!p.coupling_junction_capped()) {
        q.warnings.push_back("E_Jcw exceeds 0.2*min(E_Jc, E_Jw)");
    }
    if (flux.amp > 0.5) {
        q.warnings.push_back("flux modulation amplitude above 0.5 rad; small-signal "
                             "expansion of cos(phi_p) degrades");
    }

    const Eigen::Matrix3d cmat = capacitance_matrix(p);
    const Eigen::Matrix3d cinv = cmat.inverse();
    const Eigen::Matrix3d linv = inverse_inductance_matrix(p, flux.phi_bar);
    for (int k = 0; k < 3; ++k) {
        if (!(linv(k, k) > 0)) {
            throw std::runtime_error("quantize: inverse-inductance diagonal <= 0 at phi_bar = " +
                                     std::to_string(flux.phi_bar) + " (mode " +
                                     std::to_string(k) + " unstable)");
        }
    }

    const double omega[3] = {std::sqrt(cinv(0, 0) * linv(0, 0)),
                             std::sqrt(cinv(1, 1) * linv(1, 1)),
                             std::sqrt(cinv(2, 2) * linv(2, 2))};
    const double z[3] = {std::sqrt(cinv(0, 0) / linv(0, 0)), std::sqrt(cinv(1, 1) / linv(1, 1)),
                         std::sqrt(cinv(2, 2) / linv(2, 2))};
    q.omega_d = omega[0];
    q.omega_c = omega[1];
    q.omega_w = omega[2];
    q.Z_d = z[0];
    q.Z_c = z[1];
    q.Z_w = z[2];

    // transmon quartic expansion of the cosine: nu = -E_C/hbar with
    // E_C = e^2/(2 C_eff), C_eff = 1/(C^-1)_qq
    for (int k = 0; k < 3; ++k) {
        const double e_c = e_charge * e_charge * cinv(k, k) / 2.0;
        const double nu = -e_c / hbar;
        if (k == 0) q.nu_d = nu;
        if (k == 1) q.nu_c = nu;
        if (k == 2) q.nu_w = nu;
    }

    q.g_C = cinv(0, 1) / (2.0 * std::sqrt(z[0] * z[1]));
    const double L_cw = junction_inductance(p.E_Jcw);
    q.g_L0 = std::sqrt(z[2] * z[1]) / (2.0 * L_cw);
    q.g_L_bar = q.g_L0 * std::cos(flux.phi_bar);
    q.A_amp = q.g_L0 * flux.amp * std::sin(flux.phi_bar);
    return q;
}

std::vector<DispersionRow> flux_dispersion(const CircuitParams& p,
                                           const std::vector<double>& phi_grid) {
    if (phi_grid.empty()) throw std::invalid_argument("flux_dispersion: empty grid");
    const Eigen::Matrix3d cinv = capacitance_matrix(p).inverse();
    // symmetrize the eigenproblem with the Cholesky factor of C^-1
    const Eigen::Matrix3d cs = Eigen::LLT<Eigen::Matrix3d>(cinv).matrixL();

    std::vector<DispersionRow> table;
    table.reserve(phi_grid.size());
    for (const double phi : phi_grid) {
        DispersionRow row;
        row.phi_bar = phi;
        try {
            const Eigen::Matrix3d linv = inverse_inductance_matrix(p, phi);
            const Eigen::Matrix3d k = cs.transpose() * linv * cs;
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(k);
            if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0) {
                throw std::runtime_error("unstable linearized mode at phi_bar = " +
                                         std::to_string(phi));
            }
            // back-transform eigenvectors to bare-mode coordinates for labeling
            const Eigen::Matrix3d vecs = cs.transpose().inverse() * es.eigenvectors();
            double freq[3] = {0, 0, 0};
            bool bare_taken[3] = {false, false, false};
            bool mode_taken[3] = {false, false, false};
            // one-to-one assignment by descending overlap; on ties the scan
            // order (ascending frequency, then bare index) decides
            for (int pass = 0; pass < 3; ++pass) {
                int best_mode = -1, best_bare = -1;
                double best = -1.0;
                for (int m = 0; m < 3; ++m) {
                    if (mode_taken[m]) continue;
                    for (int b = 0; b < 3; ++b) {
                        if (bare_taken[b]) continue;
                        const double w = std::abs(vecs(b, m));
                        if (w > best) {
                            best = w;
                            best_mode = m;
                            best_bare = b;
                        }
                    }
                }
                bare_taken[best_bare] = true;
                mode_taken[best_mode] = true;
                freq[best_bare] = std::sqrt(es.eigenvalues()(best_mode));
            }
            row.omega_d = freq[0];
            row.omega_c = freq[1];
            row.omega_w = freq[2];
        } catch (const std::exception& e) {
            row.valid = false;
            row.error = e.what();
            row.omega_d = row.omega_c = row.omega_w = std::numeric_limits<double>::quiet_NaN();
        }
        table.push_back(std::move(row));
    }
    return table;
}

double purcell_rate(const CircuitParams& p, double omega, const FluxPoint& flux) {
    using namespace std::complex_literals;
    p.validate();
    if (!(omega > 0)) throw std::invalid_argument("purcell_rate: omega must be positive");

    const double L_d = junction_inductance(p.E_Jd);
    const double L_c = junction_inductance(p.E_Jc);
    const double L_w = junction_inductance(p.E_Jw);
    const double L_cw = junction_inductance(p.E_Jcw);
    const auto [phi_c, phi_cw, phi_w] = branch_fluxes(p, wrap_principal(flux.phi_bar));

    auto series = [](std::complex<double> a, std::complex<double> b) {
        return 1.0 / (1.0 / a + 1.0 / b);
    };
    const std::complex<double> jw = 1i * omega;

    // waveguide load through the output coupler; open circuit when R -> inf
    std::complex<double> y_load = 0.0;
    if (std::isfinite(p.R_load)) {
        y_load = series(jw * p.C_v, std::complex<double>(1.0 / p.R_load));
    }
    const std::complex<double> y_w =
        jw * p.C_w + std::cos(phi_w) / (jw * L_w) + y_load;
    // c-w coupling branch: capacitor in parallel with the coupling junction
    const std::complex<double> y_cw = jw * p.C_cw + std::cos(phi_cw) / (jw * L_cw);
    const std::complex<double> y_c =
        jw * p.C_c + std::cos(phi_c) / (jw * L_c) + series(y_cw, y_w);
    const std::complex<double> y =
        jw * p.C_d + 1.0 / (jw * L_d) + series(jw * p.C_dc, y_c);

    return std::max(0.0, y.real() / (p.C_d + p.C_dc));
}

}  // namespace ted
