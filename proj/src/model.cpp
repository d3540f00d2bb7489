#include "ted/model.hpp"

#include "ted/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ted {

DriveEnvelope DriveEnvelope::constant(double amplitude) {
    DriveEnvelope e;
    e.kind = Kind::Constant;
    e.amplitude = amplitude;
    return e;
}

DriveEnvelope DriveEnvelope::cosine_squared(double amplitude, double t0, double T) {
    if (!(T > 0)) throw std::invalid_argument("DriveEnvelope: cosine window needs T > 0");
    DriveEnvelope e;
    e.kind = Kind::CosineSquared;
    e.amplitude = amplitude;
    e.t0 = t0;
    e.T = T;
    return e;
}

DriveEnvelope DriveEnvelope::piecewise(std::vector<std::pair<double, double>> table) {
    if (table.size() < 2) throw std::invalid_argument("DriveEnvelope: table needs >= 2 points");
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        if (!(table[i].first < table[i + 1].first)) {
            throw std::invalid_argument("DriveEnvelope: table times must increase");
        }
    }
    DriveEnvelope e;
    e.kind = Kind::Table;
    e.amplitude = 1.0;
    e.table = std::move(table);
    return e;
}

double DriveEnvelope::value(double t) const {
    switch (kind) {
        case Kind::Constant:
            return amplitude;
        case Kind::CosineSquared: {
            const double u = t - t0;
            if (std::abs(u) >= T / 2) return 0.0;
            const double c = std::cos(M_PI * u / T);
            return amplitude * c * c;
        }
        case Kind::Table: {
            if (t <= table.front().first || t >= table.back().first) {
                // exact endpoints included, outside is zero
                if (t == table.front().first) return amplitude * table.front().second;
                if (t == table.back().first) return amplitude * table.back().second;
                return 0.0;
            }
            auto it = std::upper_bound(table.begin(), table.end(), t,
                                       [](double v, const auto& p) { return v < p.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = (t - lo.first) / (hi.first - lo.first);
            return amplitude * ((1 - w) * lo.second + w * hi.second);
        }
    }
    return 0.0;
}

DriveEnvelope DriveEnvelope::with_amplitude(double new_amplitude) const {
    DriveEnvelope e = *this;
    e.amplitude = new_amplitude;
    return e;
}

void TedParams::validate() const {
    if (!(gamma > 0)) throw std::invalid_argument("TedParams: gamma must be positive");
    if (omega_d == omega_w) {
        throw std::invalid_argument("TedParams: omega_d == omega_w breaks the protection "
                                    "condition");
    }
    if (n_th < 0) throw std::invalid_argument("TedParams: n_th must be >= 0");
}

DriveSpec DriveSpec::parametric(double omega_p, DriveEnvelope env) {
    DriveSpec d;
    d.kind = Kind::Parametric;
    d.omega = omega_p;
    d.envelope = std::move(env);
    return d;
}

DriveSpec DriveSpec::coherent(double omega_alpha, DriveEnvelope env) {
    DriveSpec d;
    d.kind = Kind::Coherent;
    d.omega = omega_alpha;
    d.envelope = std::move(env);
    return d;
}

ProductSpace three_mode_space(int dim_d, int dim_c, int dim_w) {
    return ProductSpace({{"d", dim_d}, {"c", dim_c}, {"w", dim_w}});
}

ProductSpace two_mode_space(int dim_d, int dim_w) {
    return ProductSpace({{"d", dim_d}, {"w", dim_w}});
}

namespace {

// (nu/2) a†² a²  with nu = omega_12 - omega_01
Matrix quartic(const Op& a, double nu) {
    const Matrix ad = a.matrix.adjoint();
    return 0.5 * nu * (ad * ad * a.matrix * a.matrix);
}

}  // namespace

TimeDependentOp rwa_hamiltonian(const TedParams& ted, const std::vector<DriveSpec>& drives,
                                const ProductSpace& space) {
    ted.validate();
    const DriveSpec* parametric = nullptr;
    const DriveSpec* coherent = nullptr;
    for (const auto& d : drives) {
        if (d.kind == DriveSpec::Kind::Parametric) {
            if (parametric) {
                throw std::invalid_argument("rwa_hamiltonian: two parametric drives are an "
                                            "unsupported configuration");
            }
            parametric = &d;
        } else {
            if (coherent) {
                throw std::invalid_argument("rwa_hamiltonian: two coherent drives are an "
                                            "unsupported configuration");
            }
            coherent = &d;
        }
    }
    const double omega_p = parametric ? parametric->omega : 0.0;
    const double omega_alpha = coherent ? coherent->omega : 0.0;

    const Op d = lowering(space, "d");
    const Op c = lowering(space, "c");
    const Op w = lowering(space, "w");

    Matrix h = (ted.omega_d + omega_p - omega_alpha) * number_op(space, "d").matrix +
               (ted.omega_c + omega_p - omega_alpha) * number_op(space, "c").matrix +
               (ted.omega_w - omega_alpha) * number_op(space, "w").matrix;
    h += quartic(d, ted.nu_d) + quartic(c, ted.nu_c) + quartic(w, ted.nu_w);
    h += ted.g_C * (c.matrix * d.matrix.adjoint() + c.matrix.adjoint() * d.matrix);

    TimeDependentOp out(Op(space, std::move(h)));
    if (parametric) {
        // A(t) (c†w - c w†)/2i
        Matrix m = Complex(0, -0.5) * (c.matrix.adjoint() * w.matrix -
                                       c.matrix * w.matrix.adjoint());
        const DriveEnvelope env = parametric->envelope;
        out.add_term([env](double t) { return env.value(t); }, Op(space, std::move(m)));
    }
    if (coherent) {
        Matrix m = 0.5 * (w.matrix + Matrix(w.matrix.adjoint()));
        const DriveEnvelope env = coherent->envelope;
        out.add_term([env](double t) { return env.value(t); }, Op(space, std::move(m)));
    }
    return out;
}

Op rwa_hamiltonian_at(const TedParams& ted, const std::vector<DriveSpec>& drives,
                      const ProductSpace& space, double t) {
    return rwa_hamiltonian(ted, drives, space).at(t);
}

EffectiveTed schrieffer_wolff(const TedParams& ted, const DriveSpec& parametric,
                              std::optional<double> omega_frame) {
    ted.validate();
    if (parametric.kind != DriveSpec::Kind::Parametric) {
        throw std::invalid_argument("schrieffer_wolff: drive must be parametric");
    }
    const double delta_dc = ted.omega_d - ted.omega_c;
    if (delta_dc == 0.0) {
        throw std::invalid_argument("schrieffer_wolff: omega_d == omega_c (degenerate modes)");
    }
    EffectiveTed eff;
    if (ted.g_C / std::abs(delta_dc) >= 0.1) {
        eff.warnings.push_back("g_C/|omega_d - omega_c| >= 0.1: outside the dispersive regime, "
                               "the perturbative reduction degrades");
    }
    const double omega_p = parametric.omega;
    const double delta_wc = ted.omega_w - (ted.omega_c + omega_p);
    if (delta_wc == 0.0) {
        throw std::invalid_argument("schrieffer_wolff: omega_w == omega_c + omega_p "
                                    "(degenerate dressed modes)");
    }

    const double a_peak = parametric.envelope.amplitude;
    const double g_p_peak = ted.g_C * a_peak / 4.0 * (1.0 / delta_dc + 1.0 / delta_wc);
    eff.g_p = parametric.envelope.with_amplitude(g_p_peak);
    eff.a_per_gp = (g_p_peak != 0.0) ? a_peak / g_p_peak : 0.0;
    eff.stark_coeff = 1.0 / (4.0 * delta_wc);

    const double omega_d_eff = ted.omega_d + ted.g_C * ted.g_C / delta_dc;
    const double plus = ted.omega_w - omega_d_eff + omega_p;
    const double minus = ted.omega_w - omega_d_eff - omega_p;
    eff.delta_p = (std::abs(plus) <= std::abs(minus)) ? plus : minus;

    eff.delta = ted.omega_w - omega_frame.value_or(ted.omega_w);
    eff.nu_d = ted.nu_d;
    eff.nu_w = ted.nu_w;
    eff.gamma = ted.gamma;
    eff.n_th = ted.n_th;
    return eff;
}

TimeDependentOp effective_hamiltonian(const EffectiveTed& eff, const ProductSpace& space,
                                      const DriveEnvelope& coherent) {
    const Op d = lowering(space, "d");
    const Op w = lowering(space, "w");
    const Op n_w = number_op(space, "w");

    Matrix h = (eff.delta - eff.delta_p) * number_op(space, "d").matrix +
               eff.delta * n_w.matrix + quartic(d, eff.nu_d) + quartic(w, eff.nu_w);
    TimeDependentOp out(Op(space, std::move(h)));

    {
        Matrix m = Complex(0, -1) *
                   (d.matrix.adjoint() * w.matrix - d.matrix * w.matrix.adjoint());
        const DriveEnvelope g_p = eff.g_p;
        out.add_term([g_p](double t) { return g_p.value(t); }, Op(space, std::move(m)));
    }
    if (eff.stark_enabled && eff.a_per_gp != 0.0 && eff.stark_coeff != 0.0) {
        const DriveEnvelope g_p = eff.g_p;
        const double k = eff.stark_coeff * eff.a_per_gp * eff.a_per_gp;
        out.add_term(
            [g_p, k](double t) {
                const double g = g_p.value(t);
                return k * g * g;
            },
            n_w);
    }
    if (!(coherent.kind == DriveEnvelope::Kind::Constant && coherent.amplitude == 0.0)) {
        Matrix m = 0.5 * (w.matrix + Matrix(w.matrix.adjoint()));
        out.add_term([coherent](double t) { return coherent.value(t); }, Op(space, std::move(m)));
    }
    return out;
}

Op effective_hamiltonian_at(const EffectiveTed& eff, const ProductSpace& space, double t,
                            double omega_rabi) {
    return effective_hamiltonian(eff, space, DriveEnvelope::constant(omega_rabi)).at(t);
}

double detection_drive_frequency(const TedParams& ted) {
    return detection_drive_frequency(ted.omega_d, ted.omega_w, ted.nu_w);
}

double detection_drive_frequency(double omega_d, double omega_w, double nu_w) {
    return std::abs(omega_w - omega_d) + nu_w;
}

bool DesignReport::all_pass() const {
    for (const auto& item : items) {
        if (item.status != "pass") return false;
    }
    return true;
}

DesignReport design_check(const TedParams& ted, double drive_amp, const CircuitParams* circuit) {
    DesignReport report;
    const double sep = std::abs(ted.omega_d - ted.omega_c);

    {
        // 0.005 |omega_d - omega_c| must dominate gamma
        DesignCheckItem item;
        item.name = "separation_vs_gamma";
        item.value = 0.005 * sep;
        item.threshold = ted.gamma;
        if (ted.gamma <= 0.0) {
            item.status = "pass";
            item.note = "gamma = 0: decay condition trivially satisfied";
        } else {
            const double ratio = item.value / ted.gamma;
            item.status = ratio >= 10.0 ? "pass" : (ratio > 1.0 ? "marginal" : "warn");
            item.note = "ratio " + std::to_string(ratio) + " (want >> 1)";
        }
        report.items.push_back(item);
    }
    {
        DesignCheckItem item;
        item.name = "dispersive_coupling";
        item.value = (sep > 0) ? ted.g_C / sep : std::numeric_limits<double>::infinity();
        item.threshold = 0.1;
        item.status = (item.value <= 0.1) ? "pass" : "warn";
        item.note = "g_C/|omega_d - omega_c|";
        report.items.push_back(item);
    }
    {
        DesignCheckItem item;
        item.name = "drive_amplitude";
        item.value = drive_amp;
        item.threshold = ted.g_C / 2.0;
        item.status = (drive_amp <= item.threshold) ? "pass" : "warn";
        item.note = "A <= g_C/2 keeps the w-frequency pull small against g_p";
        report.items.push_back(item);
    }
    if (circuit) {
        DesignCheckItem item;
        item.name = "coupling_junction_energy";
        item.value = circuit->E_Jcw;
        item.threshold = 0.2 * std::min(circuit->E_Jc, circuit->E_Jw);
        item.status = circuit->coupling_junction_capped() ? "pass" : "warn";
        item.note = "E_Jcw <= 0.2 min(E_Jc, E_Jw)";
        report.items.push_back(item);
    }
    return report;
}

}  // namespace ted
