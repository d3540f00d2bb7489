#include "ted/model.hpp"

#include "ted/lindblad.hpp"
#include "table_params.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ted;
using ted::testing::measured_mted;
using ted::testing::measured_sted;

namespace {
constexpr double GHZ = 2.0 * M_PI * 1e9;
constexpr double MHZ = 2.0 * M_PI * 1e6;

double ladder_energy(const TedParams& t, int nd, int nc, int nw) {
    auto mode = [](double w, double nu, int n) { return w * n + 0.5 * nu * n * (n - 1); };
    return mode(t.omega_d, t.nu_d, nd) + mode(t.omega_c, t.nu_c, nc) +
           mode(t.omega_w, t.nu_w, nw);
}

}  // namespace

TEST_CASE("drive envelopes") {
    const DriveEnvelope cos2 = DriveEnvelope::cosine_squared(2.0, 5.0, 4.0);
    CHECK(cos2.value(5.0) == doctest::Approx(2.0));
    CHECK(cos2.value(3.0) == 0.0);          // edge
    CHECK(cos2.value(7.0) == 0.0);
    CHECK(cos2.value(2.9) == 0.0);          // outside
    CHECK(cos2.value(4.0) == doctest::Approx(1.0));  // half height at quarter width
    // continuity at the window edge
    CHECK(cos2.value(3.0 + 1e-9) < 1e-8);

    const DriveEnvelope table = DriveEnvelope::piecewise({{0.0, 0.0}, {1.0, 1.0}, {3.0, 0.5}});
    CHECK(table.value(0.5) == doctest::Approx(0.5));
    CHECK(table.value(2.0) == doctest::Approx(0.75));
    CHECK(table.value(5.0) == 0.0);
}

TEST_CASE("rwa hamiltonian reduces to the bare ladder with no drives") {
    const TedParams ted = measured_sted();
    const ProductSpace space = three_mode_space(3, 3, 3);
    const Op h = rwa_hamiltonian_at(ted, {}, space, 0.0);
    for (int nd = 0; nd < 3; ++nd) {
        for (int nc = 0; nc < 3; ++nc) {
            for (int nw = 0; nw < 3; ++nw) {
                const int idx = space.basis_index({nd, nc, nw});
                // diagonal part only (g_C couples off-diagonal elements)
                CHECK(h.matrix(idx, idx).real() ==
                      doctest::Approx(ladder_energy(ted, nd, nc, nw)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("resonant parametric frame leaves d and w degenerate") {
    const TedParams ted = measured_sted();
    const ProductSpace space = three_mode_space(2, 2, 2);
    const double omega_p = ted.omega_w - ted.omega_d;
    const auto drives = std::vector<DriveSpec>{
        DriveSpec::parametric(omega_p, DriveEnvelope::constant(1 * MHZ)),
        DriveSpec::coherent(ted.omega_w, DriveEnvelope::constant(0.0))};
    const Op h = rwa_hamiltonian_at(ted, drives, space, 0.0);
    const int i100 = space.basis_index({1, 0, 0});
    const int i001 = space.basis_index({0, 0, 1});
    CHECK(h.matrix(i100, i100).real() == doctest::Approx(h.matrix(i001, i001).real()));
    // no direct d-w coupling at this order
    CHECK(std::abs(h.matrix(i100, i001)) == 0.0);
}

TEST_CASE("rwa hamiltonian is Hermitian at sampled times") {
    const TedParams ted = measured_sted();
    const ProductSpace space = three_mode_space(3, 3, 4);
    const auto drives = std::vector<DriveSpec>{
        DriveSpec::parametric(ted.omega_w - ted.omega_d,
                              DriveEnvelope::cosine_squared(20 * MHZ, 1e-6, 2e-6)),
        DriveSpec::coherent(ted.omega_w, DriveEnvelope::constant(3 * MHZ))};
    const TimeDependentOp h = rwa_hamiltonian(ted, drives, space);
    for (double t : {0.0, 0.3e-6, 1.0e-6, 1.7e-6}) {
        CHECK(h.at(t).is_hermitian(1e-12));
    }
}

TEST_CASE("two parametric drives are rejected") {
    const TedParams ted = measured_sted();
    const ProductSpace space = three_mode_space(2, 2, 2);
    const auto d1 = DriveSpec::parametric(1 * GHZ, DriveEnvelope::constant(1 * MHZ));
    const auto d2 = DriveSpec::parametric(2 * GHZ, DriveEnvelope::constant(1 * MHZ));
    CHECK_THROWS_WITH_AS(rwa_hamiltonian(ted, {d1, d2}, space),
                         doctest::Contains("unsupported"), std::invalid_argument);
}

TEST_CASE("schrieffer-wolff coupling strength") {
    TedParams ted = measured_sted();
    const double omega_p = ted.omega_w - ted.omega_d;

    SUBCASE("resonant drive reproduces the single-denominator value") {
        const auto eff = schrieffer_wolff(
            ted, DriveSpec::parametric(omega_p, DriveEnvelope::constant(20 * MHZ)));
        // g_C A / 2(omega_d - omega_c) with the numbers above: 0.979 MHz
        CHECK(std::abs(eff.g_p.amplitude) / MHZ == doctest::Approx(0.97902).epsilon(1e-4));
        const double single = ted.g_C * 20 * MHZ / (2 * (ted.omega_d - ted.omega_c));
        CHECK(eff.g_p.amplitude == doctest::Approx(single).epsilon(1e-12));
    }

    SUBCASE("zero drive amplitude gives zero coupling and no Stark pull") {
        const auto eff = schrieffer_wolff(
            ted, DriveSpec::parametric(omega_p, DriveEnvelope::constant(0.0)));
        CHECK(eff.g_p.amplitude == 0.0);
        CHECK(eff.a_per_gp == 0.0);
    }

    SUBCASE("detuning sign minimizes |delta_p|") {
        const auto eff = schrieffer_wolff(
            ted, DriveSpec::parametric(omega_p + 5 * MHZ, DriveEnvelope::constant(1 * MHZ)));
        // drive 5 MHz above the (shifted) transition: delta_p should be near -5 MHz,
        // not near 2(omega_w - omega_d)
        CHECK(std::abs(eff.delta_p) < 10 * MHZ);
    }

    SUBCASE("dispersive-regime warning") {
        TedParams strong = ted;
        strong.g_C = 0.2 * std::abs(ted.omega_d - ted.omega_c);
        const auto eff = schrieffer_wolff(
            strong, DriveSpec::parametric(omega_p, DriveEnvelope::constant(1 * MHZ)));
        REQUIRE(!eff.warnings.empty());
        CHECK(eff.warnings.front().find("dispersive") != std::string::npos);
    }

    SUBCASE("degenerate d and c modes are rejected") {
        TedParams degen = ted;
        degen.omega_c = degen.omega_d;
        CHECK_THROWS_WITH_AS(
            schrieffer_wolff(degen,
                             DriveSpec::parametric(omega_p, DriveEnvelope::constant(1 * MHZ))),
            doctest::Contains("degenerate"), std::invalid_argument);
    }
}

TEST_CASE("effective hamiltonian matrix elements") {
    const ProductSpace space = two_mode_space(2, 3);
    EffectiveTed eff;
    eff.delta = 0;
    eff.delta_p = 0;
    eff.nu_d = -0.174 * GHZ;
    eff.nu_w = -0.169 * GHZ;
    eff.gamma = 11.2e6;
    eff.g_p = DriveEnvelope::constant(1 * MHZ);
    eff.stark_enabled = false;

    const Op h = effective_hamiltonian_at(eff, space, 0.0);
    const int i10 = space.basis_index({1, 0});
    const int i01 = space.basis_index({0, 1});
    const int i11 = space.basis_index({1, 1});
    const int i02 = space.basis_index({0, 2});

    CHECK(h.matrix(i10, i01) == Complex(0, -1 * MHZ));
    CHECK(std::abs(h.matrix(i11, i02)) == doctest::Approx(std::sqrt(2.0) * MHZ));

    // with drives off, only anharmonic energies remain on the diagonal
    EffectiveTed quiet = eff;
    quiet.g_p = DriveEnvelope::constant(0.0);
    const Op h0 = effective_hamiltonian_at(quiet, space, 0.0);
    CHECK((h0.matrix - Matrix(h0.matrix.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(h0.matrix(i02, i02).real() == doctest::Approx(-0.169 * GHZ).epsilon(1e-12));
}

TEST_CASE("detection carrier sits one anharmonicity below the reset carrier") {
    const TedParams mted = measured_mted();
    const double reset = std::abs(mted.omega_w - mted.omega_d);
    const double detect = detection_drive_frequency(mted);
    CHECK(reset - detect == doctest::Approx(std::abs(mted.nu_w)).epsilon(1e-12));
    CHECK(detect == doctest::Approx(reset + mted.nu_w).epsilon(1e-12));
    CHECK(detection_drive_frequency(mted.omega_d, mted.omega_w, 0.0) ==
          doctest::Approx(reset).epsilon(1e-12));
}

TEST_CASE("design check margins") {
    TedParams ted = measured_sted();

    SUBCASE("table values are marginal against gamma") {
        const DesignReport report = design_check(ted);
        REQUIRE(!report.items.empty());
        const auto& sep = report.items.front();
        CHECK(sep.name == "separation_vs_gamma");
        CHECK(sep.value / ted.gamma == doctest::Approx(2.0).epsilon(0.01));
        CHECK(sep.status == "marginal");
    }

    SUBCASE("no decay means the decay condition passes trivially") {
        TedParams lossless = ted;
        lossless.gamma = 0.0;
        const DesignReport report = design_check(lossless);
        CHECK(report.items.front().status == "pass");
    }

    SUBCASE("strong coupling trips the dispersive warning") {
        TedParams strong = ted;
        strong.g_C = 0.2 * std::abs(ted.omega_d - ted.omega_c);
        const DesignReport report = design_check(strong);
        CHECK(report.items[1].name == "dispersive_coupling");
        CHECK(report.items[1].status == "warn");
    }

    SUBCASE("junction cap appears when circuit parameters are given") {
        const CircuitParams p = ted::testing::table_circuit();
        const DesignReport report = design_check(ted, 0.0, &p);
        CHECK(report.items.back().name == "coupling_junction_energy");
        CHECK(report.items.back().status == "pass");
    }
}

TEST_CASE("rabi oracle: full transfer at t = pi/(2 g_p)") {
    const ProductSpace space = two_mode_space(2, 2);
    EffectiveTed eff;
    eff.gamma = 11.2e6;
    eff.nu_d = -0.174 * GHZ;
    eff.nu_w = -0.169 * GHZ;
    eff.g_p = DriveEnvelope::constant(2 * MHZ);
    eff.stark_enabled = false;

    MasterEq meq(space, effective_hamiltonian(eff, space));  // no dissipators
    const double t_transfer = M_PI / (2.0 * eff.g_p.amplitude);
    EvolveOptions opts;
    opts.rtol = 1e-10;
    const Trajectory traj =
        evolve(meq, State::basis_ket(space, {1, 0}), 0.0, t_transfer, opts);
    const double p01 =
        expectation(traj.states.back(), number_op(space, "w")).real();
    CHECK(p01 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(expectation(traj.states.back(), number_op(space, "d")).real() < 1e-6);
}

namespace {

// Population-transfer frequency of the full three-mode model, driven at the
// shift-corrected carrier, extracted from the first population minimum.
double three_mode_transfer_frequency(const TedParams& ted, double a_peak) {
    const double delta_dc = ted.omega_d - ted.omega_c;
    const double d_shift = ted.g_C * ted.g_C / delta_dc;
    double omega_p = ted.omega_w - ted.omega_d - d_shift;
    for (int it = 0; it < 4; ++it) {
        const double w_shift = a_peak * a_peak / (4 * (ted.omega_w - ted.omega_c - omega_p));
        omega_p = (ted.omega_w + w_shift) - (ted.omega_d + d_shift);
    }
    const ProductSpace space = three_mode_space(2, 2, 2);
    const auto drives = std::vector<DriveSpec>{
        DriveSpec::parametric(omega_p, DriveEnvelope::constant(a_peak)),
        DriveSpec::coherent(ted.omega_w, DriveEnvelope::constant(0.0))};
    MasterEq meq(space, rwa_hamiltonian(ted, drives, space));

    const double g_guess = std::abs(ted.g_C * a_peak / (2 * delta_dc));
    EvolveOptions opts;
    opts.rtol = 1e-9;
    opts.n_samples = 1201;
    opts.store_states = false;
    opts.record_ops = {{"n_d", number_op(space, "d")}};
    const Trajectory traj = evolve(meq, State::basis_ket(space, {1, 0, 0}), 0.0,
                                   0.75 * M_PI / g_guess, opts);
    const auto& nd = traj.records.at("n_d");
    std::size_t k_min = 0;
    for (std::size_t k = 0; k < nd.size(); ++k) {
        if (nd[k].real() < nd[k_min].real()) k_min = k;
    }
    REQUIRE(k_min > 0);
    REQUIRE(k_min + 1 < nd.size());
    // parabolic refinement of the minimum
    const double y0 = nd[k_min - 1].real(), y1 = nd[k_min].real(), y2 = nd[k_min + 1].real();
    const double denom = y0 - 2 * y1 + y2;
    const double shift = (denom != 0) ? 0.5 * (y0 - y2) / denom : 0.0;
    const double dt = traj.times[1] - traj.times[0];
    const double t_min = traj.times[k_min] + shift * dt;
    return M_PI / t_min;  // population oscillates at the transfer frequency
}

}  // namespace

TEST_CASE("schrieffer-wolff transfer frequency matches the three-mode model") {
    std::mt19937 gen(20260809);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 5; ++draw) {
        TedParams ted;
        ted.omega_d = (2.5 + u(gen)) * GHZ;
        const double sign = (u(gen) < 0.5) ? -1.0 : 1.0;
        ted.omega_c = ted.omega_d + sign * (0.6 + 0.9 * u(gen)) * GHZ;
        ted.omega_w = (5.0 + u(gen)) * GHZ;
        ted.nu_d = ted.nu_c = ted.nu_w = 0.0;  // single-excitation check
        const double delta = std::abs(ted.omega_d - ted.omega_c);
        ted.g_C = (0.035 + 0.015 * u(gen)) * delta;
        ted.gamma = 1.0;  // unused (no dissipators)
        const double a_peak = (0.35 + 0.15 * u(gen)) * ted.g_C;

        const auto eff = schrieffer_wolff(
            ted, DriveSpec::parametric(ted.omega_w - ted.omega_d, DriveEnvelope::constant(a_peak)));
        const double f_full = three_mode_transfer_frequency(ted, a_peak);
        const double f_sw = 2.0 * std::abs(eff.g_p.amplitude);
        CHECK(f_full / f_sw == doctest::Approx(1.0).epsilon(0.10));
    }
}

namespace {

double w_mode_shift(const TedParams& ted, double omega_p, double a_amp) {
    const ProductSpace space = three_mode_space(3, 3, 3);
    const auto drives = std::vector<DriveSpec>{
        DriveSpec::parametric(omega_p, DriveEnvelope::constant(a_amp)),
        DriveSpec::coherent(ted.omega_w, DriveEnvelope::constant(0.0))};
    const Op h = rwa_hamiltonian_at(ted, drives, space, 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
    const int i001 = space.basis_index({0, 0, 1});
    const int i000 = space.basis_index({0, 0, 0});
    int k_w = 0, k_0 = 0;
    for (int k = 1; k < space.dim(); ++k) {
        if (std::norm(es.eigenvectors()(i001, k)) >
            std::norm(es.eigenvectors()(i001, k_w))) {
            k_w = k;
        }
        if (std::norm(es.eigenvectors()(i000, k)) >
            std::norm(es.eigenvectors()(i000, k_0))) {
            k_0 = k;
        }
    }
    return es.eigenvalues()(k_w) - es.eigenvalues()(k_0);
}

}  // namespace

TEST_CASE("w-mode pull is quadratic in the drive amplitude") {
    const TedParams ted = measured_sted();
    // off-resonant carrier keeps the w-like eigenstate unambiguous
    const double omega_p = ted.omega_w - ted.omega_d - 50 * MHZ;
    const double base = w_mode_shift(ted, omega_p, 0.0);

    const double a0 = 10 * MHZ;
    std::vector<double> amps = {a0, 2 * a0, 3 * a0, 4 * a0};
    std::vector<double> shifts;
    for (const double a : amps) shifts.push_back(w_mode_shift(ted, omega_p, a) - base);

    // least-squares quadratic coefficient and per-point residuals
    double num = 0, den = 0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        num += shifts[i] * amps[i] * amps[i];
        den += amps[i] * amps[i] * amps[i] * amps[i];
    }
    const double coeff = num / den;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        CHECK(std::abs(shifts[i] - coeff * amps[i] * amps[i]) / std::abs(shifts[i]) < 0.05);
    }
    const double predicted = 1.0 / (4.0 * (ted.omega_d - ted.omega_c));
    CHECK(coeff / predicted == doctest::Approx(1.0).epsilon(0.30));
    CHECK(coeff < 0);
}

TEST_CASE("envelope validation") {
    CHECK_THROWS_AS(DriveEnvelope::cosine_squared(1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DriveEnvelope::piecewise({{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(DriveEnvelope::piecewise({{1.0, 0.0}, {1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("ted parameter validation") {
    TedParams bad = measured_sted();
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = measured_sted();
    bad.omega_w = bad.omega_d;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("protection"),
                         std::invalid_argument);
    bad = measured_sted();
    bad.n_th = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("degenerate dressed c and w modes are rejected") {
    TedParams ted = measured_sted();
    // omega_p chosen so omega_c + omega_p lands exactly on omega_w
    const double omega_p = ted.omega_w - ted.omega_c;
    CHECK_THROWS_AS(
        schrieffer_wolff(ted, DriveSpec::parametric(omega_p, DriveEnvelope::constant(1e6))),
        std::invalid_argument);
}
