#include "ted/slh.hpp"

#include <cmath>
#include <stdexcept>

namespace ted {

SlhTriple::SlhTriple(Matrix s, std::vector<Op> l, Op h)
    : S(std::move(s)), L(std::move(l)), H(std::move(h)) {
    if (S.rows() != S.cols()) throw std::invalid_argument("SlhTriple: S must be square");
    if (static_cast<int>(L.size()) != S.rows()) {
        throw std::invalid_argument("SlhTriple: need one L operator per port");
    }
    for (const auto& op : L) {
        if (op.space != H.space) {
            throw std::invalid_argument("SlhTriple: L operator space differs from H");
        }
    }
}

double SlhTriple::unitarity_defect() const {
    const Matrix d = S * S.adjoint() - Matrix::Identity(S.rows(), S.cols());
    return d.cwiseAbs().maxCoeff();
}

void SlhTriple::validate(double tol) const {
    if (unitarity_defect() > tol) {
        throw std::invalid_argument("SlhTriple: scattering matrix is not unitary");
    }
    if (!H.is_hermitian(1e-9)) {
        throw std::invalid_argument("SlhTriple: Hamiltonian is not Hermitian");
    }
}

SlhTriple identity_component(int ports, const ProductSpace& space) {
    if (ports < 1) throw std::invalid_argument("identity_component: ports >= 1");
    std::vector<Op> l(static_cast<std::size_t>(ports), zero_op(space));
    return SlhTriple(Matrix::Identity(ports, ports), std::move(l), zero_op(space));
}

SlhTriple phase_delay(double phi, const ProductSpace& space) {
    Matrix s(1, 1);
    s(0, 0) = std::exp(Complex(0, phi));
    return SlhTriple(std::move(s), {zero_op(space)}, zero_op(space));
}

SlhTriple circulator(double eta, const ProductSpace& space) {
    if (eta < 0.0 || eta > 1.0) {
        throw std::invalid_argument("circulator: eta must lie in [0, 1]");
    }
    const double bar = std::sqrt(1.0 - eta * eta);
    Matrix s = Matrix::Zero(6, 6);
    // signal block: cyclic 1 -> 2 -> 3 -> 1 with transmitted amplitude bar;
    // ports 4..6 take the lost amplitude eta
    s(0, 2) = bar;  s(0, 3) = -eta;
    s(1, 0) = bar;  s(1, 4) = -eta;
    s(2, 1) = bar;  s(2, 5) = -eta;
    s(3, 2) = eta;  s(3, 3) = bar;
    s(4, 0) = eta;  s(4, 4) = bar;
    s(5, 1) = eta;  s(5, 5) = bar;
    std::vector<Op> l(6, zero_op(space));
    return SlhTriple(std::move(s), std::move(l), zero_op(space));
}

namespace {

ProductSpace joint_space(const ProductSpace& a, const ProductSpace& b) {
    std::vector<ModeSpec> modes = a.modes();
    for (const auto& m : b.modes()) modes.push_back(m);
    return ProductSpace(std::move(modes));  // throws on duplicate labels
}

bool spaces_overlap(const ProductSpace& a, const ProductSpace& b) {
    for (const auto& m : b.modes()) {
        if (a.has_mode(m.label)) return true;
    }
    return false;
}

}  // namespace

SlhTriple concatenate(const SlhTriple& c1, const SlhTriple& c2) {
    const int p1 = c1.ports();
    const int p2 = c2.ports();
    Matrix s = Matrix::Zero(p1 + p2, p1 + p2);
    s.topLeftCorner(p1, p1) = c1.S;
    s.bottomRightCorner(p2, p2) = c2.S;

    if (c1.space() == c2.space()) {
        std::vector<Op> l = c1.L;
        l.insert(l.end(), c2.L.begin(), c2.L.end());
        return SlhTriple(std::move(s), std::move(l), c1.H + c2.H);
    }
    if (spaces_overlap(c1.space(), c2.space())) {
        throw std::invalid_argument("concatenate: spaces overlap but are not identical");
    }
    // disjoint spaces: embed both sides into the joint space
    const ProductSpace joint = joint_space(c1.space(), c2.space());
    const Matrix id1 = Matrix::Identity(c1.space().dim(), c1.space().dim());
    const Matrix id2 = Matrix::Identity(c2.space().dim(), c2.space().dim());
    auto embed1 = [&](const Op& op) { return Op(joint, kron(op.matrix, id2)); };
    auto embed2 = [&](const Op& op) { return Op(joint, kron(id1, op.matrix)); };
    std::vector<Op> l;
    l.reserve(static_cast<std::size_t>(p1 + p2));
    for (const auto& op : c1.L) l.push_back(embed1(op));
    for (const auto& op : c2.L) l.push_back(embed2(op));
    return SlhTriple(std::move(s), std::move(l), embed1(c1.H) + embed2(c2.H));
}

SlhTriple cascade(const SlhTriple& c2, const SlhTriple& c1) {
    if (c1.ports() != c2.ports()) {
        throw std::invalid_argument("cascade: port counts differ");
    }
    if (c1.space() != c2.space()) {
        throw std::invalid_argument("cascade: components must share a space (embed first)");
    }
    const int p = c1.ports();
    Matrix s = c2.S * c1.S;
    std::vector<Op> l;
    l.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        Op acc = c2.L[static_cast<std::size_t>(j)];
        for (int k = 0; k < p; ++k) {
            acc = acc + c2.S(j, k) * c1.L[static_cast<std::size_t>(k)];
        }
        l.push_back(std::move(acc));
    }
    // H = H1 + H2 + (L2† S2 L1 - h.c.)/2i
    Matrix corr = Matrix::Zero(c1.space().dim(), c1.space().dim());
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
            if (c2.S(j, k) == Complex(0)) continue;
            corr.noalias() += c2.S(j, k) * (c2.L[static_cast<std::size_t>(j)].matrix.adjoint() *
                                            c1.L[static_cast<std::size_t>(k)].matrix);
        }
    }
    Matrix h = c1.H.matrix + c2.H.matrix + Complex(0, -0.5) * (corr - Matrix(corr.adjoint()));
    return SlhTriple(std::move(s), std::move(l), Op(c1.space(), std::move(h)));
}

SlhTriple feedback(const SlhTriple& c, int out_port, int in_port) {
    const int p = c.ports();
    if (p < 2) throw std::invalid_argument("feedback: need at least two ports");
    if (out_port < 1 || out_port > p || in_port < 1 || in_port > p) {
        throw std::invalid_argument("feedback: port index out of range");
    }
    const int x = out_port - 1;  // closed output row
    const int y = in_port - 1;   // closed input column
    const Complex s_xy = c.S(x, y);
    if (std::abs(1.0 - s_xy) <= 1e-10) {
        throw std::invalid_argument("feedback: 1 - S_yx is singular (algebraic loop)");
    }
    const Complex inv = 1.0 / (1.0 - s_xy);

    std::vector<int> rows, cols;
    for (int i = 0; i < p; ++i) {
        if (i != x) rows.push_back(i);
        if (i != y) cols.push_back(i);
    }
    const int q = p - 1;
    Matrix s(q, q);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
            s(i, j) = c.S(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]) +
                      c.S(rows[static_cast<std::size_t>(i)], y) * inv *
                          c.S(x, cols[static_cast<std::size_t>(j)]);
        }
    }
    std::vector<Op> l;
    l.reserve(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
        const int r = rows[static_cast<std::size_t>(i)];
        l.push_back(c.L[static_cast<std::size_t>(r)] +
                    (c.S(r, y) * inv) * c.L[static_cast<std::size_t>(x)]);
    }
    // H' = H + (sum_j L_j† S_jy (1 - S_xy)^-1 L_x - h.c.)/2i
    Matrix corr = Matrix::Zero(c.space().dim(), c.space().dim());
    for (int j = 0; j < p; ++j) {
        if (c.S(j, y) == Complex(0)) continue;
        corr.noalias() += (c.S(j, y) * inv) * (c.L[static_cast<std::size_t>(j)].matrix.adjoint() *
                                               c.L[static_cast<std::size_t>(x)].matrix);
    }
    Matrix h = c.H.matrix + Complex(0, -0.5) * (corr - Matrix(corr.adjoint()));
    return SlhTriple(std::move(s), std::move(l), Op(c.space(), std::move(h)));
}

void NetworkSpec::validate() const {
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("NetworkSpec: eta must be in [0, 1]");
    if (!(sted.gamma > 0) || !(mted.gamma > 0)) {
        throw std::invalid_argument("NetworkSpec: TED decay rates must be positive");
    }
}

ProductSpace network_space(int dim_ds, int dim_ws, int dim_dm, int dim_wm) {
    return ProductSpace({{"d_s", dim_ds}, {"w_s", dim_ws}, {"d_m", dim_dm}, {"w_m", dim_wm}});
}

namespace {

// Static part of an effective TED Hamiltonian on the shared network space,
// plus its time-dependent terms appended to `h`.
void add_effective_ted(TimeDependentOp& h, const EffectiveTed& eff, const ProductSpace& space,
                       const std::string& d_label, const std::string& w_label) {
    const Op d = lowering(space, d_label);
    const Op w = lowering(space, w_label);
    const Matrix dd = d.matrix.adjoint() * d.matrix;
    const Matrix ww = w.matrix.adjoint() * w.matrix;
    const Matrix d2 = d.matrix.adjoint() * d.matrix.adjoint() * d.matrix * d.matrix;
    const Matrix w2 = w.matrix.adjoint() * w.matrix.adjoint() * w.matrix * w.matrix;

    h.constant.matrix += (eff.delta - eff.delta_p) * dd + eff.delta * ww + 0.5 * eff.nu_d * d2 +
                         0.5 * eff.nu_w * w2;
    Matrix coupling =
        Complex(0, -1) * (d.matrix.adjoint() * w.matrix - d.matrix * w.matrix.adjoint());
    const DriveEnvelope g_p = eff.g_p;
    h.add_term([g_p](double t) { return g_p.value(t); }, Op(space, std::move(coupling)));
    if (eff.stark_enabled && eff.a_per_gp != 0.0 && eff.stark_coeff != 0.0) {
        const double k = eff.stark_coeff * eff.a_per_gp * eff.a_per_gp;
        h.add_term(
            [g_p, k](double t) {
                const double g = g_p.value(t);
                return k * g * g;
            },
            Op(space, ww));
    }
}

}  // namespace

PitchDetectModel build_pitch_detect(const NetworkSpec& spec, const ProductSpace& space) {
    spec.validate();
    const Op w_s = lowering(space, "w_s");
    const Op w_m = lowering(space, "w_m");

    // one-port TEDs (waveguide termination already absorbed into gamma)
    const SlhTriple sted(Matrix::Identity(1, 1), {std::sqrt(spec.sted.gamma) * w_s},
                         zero_op(space));
    const SlhTriple mted(Matrix::Identity(1, 1), {std::sqrt(spec.mted.gamma) * w_m},
                         zero_op(space));
    const SlhTriple delays = concatenate(
        concatenate(phase_delay(spec.phi_s, space), phase_delay(spec.phi_m, space)),
        identity_component(4, space));

    SlhTriple net = cascade(delays, concatenate(sted, identity_component(5, space)));
    net = cascade(circulator(spec.eta, space), net);
    net = cascade(delays, net);
    net = cascade(concatenate(concatenate(identity_component(1, space), mted),
                              identity_component(4, space)),
                  net);
    net = feedback(net, 1, 1);
    net = feedback(net, 1, 1);  // original port 2 is now the first port

    // master equation: one collapse channel per composed port, plus the static
    // H correction from the composition; TED internals ride on top
    TimeDependentOp h(net.H);
    add_effective_ted(h, spec.sted, space, "d_s", "w_s");
    add_effective_ted(h, spec.mted, space, "d_m", "w_m");

    std::vector<Collapse> collapse;
    for (const auto& l : net.L) {
        if (l.matrix.cwiseAbs().maxCoeff() > 0) collapse.push_back({1.0, l});
    }
    std::vector<Collapse> thermal;
    if (spec.sted.n_th > 0) {
        collapse.push_back({spec.sted.gamma * spec.sted.n_th, w_s});
        thermal.push_back({spec.sted.gamma * spec.sted.n_th, w_s.adjoint()});
    }
    if (spec.mted.n_th > 0) {
        collapse.push_back({spec.mted.gamma * spec.mted.n_th, w_m});
        thermal.push_back({spec.mted.gamma * spec.mted.n_th, w_m.adjoint()});
    }

    PitchDetectModel model{MasterEq(space, std::move(h), std::move(collapse), std::move(thermal)),
                           {},
                           {},
                           net};
    model.a_out = {{spec.phi_s + spec.phi_m, spec.sted.gamma, w_s},
                   {0.0, spec.mted.gamma, transition_part(w_m, "w_m", 1, 0)}};
    model.b_out = {{0.0, spec.mted.gamma, transition_part(w_m, "w_m", 2, 1)}};
    return model;
}

MasterEq direct_two_ted_master_eq(const NetworkSpec& spec, const ProductSpace& space) {
    spec.validate();
    const Op w_s = lowering(space, "w_s");
    const Op w_m = lowering(space, "w_m");
    const double etabar = std::sqrt(1.0 - spec.eta * spec.eta);
    const double rate = etabar * std::sqrt(spec.sted.gamma * spec.mted.gamma);
    const Complex phase = std::exp(Complex(0, -(spec.phi_s + spec.phi_m)));

    TimeDependentOp h(zero_op(space));
    add_effective_ted(h, spec.sted, space, "d_s", "w_s");
    add_effective_ted(h, spec.mted, space, "d_m", "w_m");
    // (i/2) rate (e^{-i phi} w_s† w_m - e^{+i phi} w_s w_m†)
    Matrix exch = Complex(0, 0.5) * rate *
                  (phase * (w_s.matrix.adjoint() * w_m.matrix) -
                   std::conj(phase) * (w_s.matrix * w_m.matrix.adjoint()));
    h.constant.matrix += exch;

    std::vector<Collapse> collapse = {{spec.sted.gamma, w_s}, {spec.mted.gamma, w_m}};
    std::vector<CrossTerm> cross;
    if (rate > 0) {
        cross.push_back({rate, w_s, Op(space, phase * w_m.matrix)});
    }
    return MasterEq(space, std::move(h), std::move(collapse), {}, std::move(cross));
}

}  // namespace ted
