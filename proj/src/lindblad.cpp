#include "ted/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ted {

void TimeDependentOp::add_term(std::function<double(double)> coeff, Op op) {
    if (constant.space.dim() != 0 && op.space != constant.space) {
        throw std::invalid_argument("TimeDependentOp: term space differs from constant part");
    }
    terms.push_back(Term{std::move(coeff), std::move(op)});
}

void TimeDependentOp::evaluate(double t, Matrix& out) const {
    out = constant.matrix;
    for (const auto& term : terms) {
        out.noalias() += term.coeff(t) * term.op.matrix;
    }
}

Op TimeDependentOp::at(double t) const {
    Matrix m;
    evaluate(t, m);
    return Op(constant.space, std::move(m));
}

namespace {

detail::Coo to_coo(const Matrix& m) {
    detail::Coo coo;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (m(i, j) != Complex(0)) {
                coo.push_back({static_cast<int>(i), static_cast<int>(j), m(i, j)});
            }
        }
    }
    return coo;
}

// out += scale * A * rho
void add_left(const detail::Coo& a, const Matrix& rho, Matrix& out, Complex scale) {
    for (const auto& e : a) {
        out.row(e.row) += (scale * e.value) * rho.row(e.col);
    }
}

// out += scale * rho * B†   (column-contiguous on column-major storage)
void add_right_adjoint(const detail::Coo& b, const Matrix& rho, Matrix& out, double scale) {
    for (const auto& e : b) {
        out.col(e.row) += (scale * std::conj(e.value)) * rho.col(e.col);
    }
}

}  // namespace

MasterEq::MasterEq(ProductSpace space, TimeDependentOp hamiltonian, std::vector<Collapse> collapse,
                   std::vector<Collapse> thermal, std::vector<CrossTerm> cross)
    : space_(std::move(space)), hamiltonian_(std::move(hamiltonian)) {
    const int d = space_.dim();
    if (hamiltonian_.constant.space != space_) {
        throw std::invalid_argument("MasterEq: Hamiltonian space does not match");
    }
    auto check_op = [&](const Op& op, const char* what) {
        if (op.space != space_) {
            throw std::invalid_argument(std::string("MasterEq: ") + what +
                                        " operator lives on a different space");
        }
    };
    Matrix damping = Matrix::Zero(d, d);
    auto take = [&](std::vector<Collapse>& dst, std::vector<Collapse>& src, const char* what) {
        for (auto& c : src) {
            if (c.rate < 0) throw std::invalid_argument("MasterEq: negative dissipator rate");
            if (c.rate == 0.0) continue;  // dropped at construction
            check_op(c.op, what);
            damping.noalias() -= 0.5 * c.rate * (c.op.matrix.adjoint() * c.op.matrix);
            jumps_.push_back({c.rate, to_coo(c.op.matrix)});
            dst.push_back(std::move(c));
        }
    };
    take(collapse_, collapse, "collapse");
    take(thermal_, thermal, "thermal");
    for (auto& x : cross) {
        if (x.rate < 0) throw std::invalid_argument("MasterEq: negative cross rate");
        if (x.rate == 0.0) continue;
        check_op(x.a, "cross");
        check_op(x.b, "cross");
        // anticommutator parts of L2[A,B] + L2[B,A]
        damping.noalias() -= 0.5 * x.rate * (x.a.matrix.adjoint() * x.b.matrix);
        damping.noalias() -= 0.5 * x.rate * (x.b.matrix.adjoint() * x.a.matrix);
        cross_coo_.push_back({x.rate, to_coo(x.a.matrix), to_coo(x.b.matrix)});
        cross_.push_back(std::move(x));
    }
    ham_const_coo_ = to_coo(hamiltonian_.constant.matrix);
    for (const auto& term : hamiltonian_.terms) ham_term_coo_.push_back(to_coo(term.op.matrix));
    damping_coo_ = to_coo(damping);
}

void MasterEq::apply(double t, const Matrix& rho, Matrix& out, Workspace& ws) const {
    // V = (-iH(t) + damping) rho; the Hermitian-preserving part is V + V†
    ws.a.setZero();
    add_left(ham_const_coo_, rho, ws.a, Complex(0, -1));
    for (std::size_t k = 0; k < ham_term_coo_.size(); ++k) {
        const double c = hamiltonian_.terms[k].coeff(t);
        if (c != 0.0) add_left(ham_term_coo_[k], rho, ws.a, Complex(0, -c));
    }
    add_left(damping_coo_, rho, ws.a, Complex(1, 0));
    out = ws.a + ws.a.adjoint();

    for (const auto& jump : jumps_) {
        ws.a.setZero();
        add_left(jump.op, rho, ws.a, Complex(1, 0));
        add_right_adjoint(jump.op, ws.a, out, jump.rate);
    }
    for (const auto& x : cross_coo_) {
        ws.a.setZero();
        add_left(x.a, rho, ws.a, Complex(1, 0));
        ws.b.setZero();
        add_right_adjoint(x.b, ws.a, ws.b, x.rate);
        out += ws.b + ws.b.adjoint();  // A rho B† + B rho A†
    }
}

Matrix MasterEq::liouvillian_matrix(double t) const {
    const int d = space_.dim();
    Matrix H;
    hamiltonian_.evaluate(t, H);
    const Matrix id = Matrix::Identity(d, d);
    // column-stacking convention: vec(A rho B) = (B^T kron A) vec(rho)
    Matrix L = Complex(0, -1) * (kron(id, H) - kron(H.transpose(), id));
    auto add_dissipator = [&](double rate, const Matrix& A, const Matrix& B) {
        // rate * L2[A,B]: A rho B† - (1/2){B†... no: - (1/2){A†B, rho}
        const Matrix AdB = A.adjoint() * B;
        L.noalias() += rate * kron(B.conjugate(), A);
        L.noalias() -= 0.5 * rate * kron(id, AdB);
        L.noalias() -= 0.5 * rate * kron(AdB.transpose(), id);
    };
    for (const auto& c : collapse_) add_dissipator(c.rate, c.op.matrix, c.op.matrix);
    for (const auto& c : thermal_) add_dissipator(c.rate, c.op.matrix, c.op.matrix);
    for (const auto& x : cross_) {
        add_dissipator(x.rate, x.a.matrix, x.b.matrix);
        add_dissipator(x.rate, x.b.matrix, x.a.matrix);
    }
    return L;
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded 4th-order weights
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

double error_norm(const Matrix& y0, const Matrix& y1, const Matrix& diff, double rtol,
                  double atol) {
    double acc = 0.0;
    const auto n = y0.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc =
            atol + rtol * std::max(std::abs(*(y0.data() + i)), std::abs(*(y1.data() + i)));
        const double e = std::abs(*(diff.data() + i)) / sc;
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace

Trajectory evolve(const MasterEq& meq, const State& rho0, double t0, double t1,
                  const EvolveOptions& opts) {
    if (rho0.space() != meq.space()) {
        throw std::invalid_argument("evolve: initial state space does not match master equation");
    }
    if (!(t1 > t0)) throw std::invalid_argument("evolve: need t1 > t0");

    const int d = meq.space().dim();
    std::vector<double> samples = opts.sample_times;
    if (samples.empty()) {
        const int n = std::max(2, opts.n_samples);
        samples.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            samples[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);
        }
    } else {
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            if (!(samples[i] < samples[i + 1])) {
                throw std::invalid_argument("evolve: sample times must be strictly increasing");
            }
        }
        if (samples.front() < t0 || samples.back() > t1) {
            throw std::invalid_argument("evolve: sample times outside span");
        }
    }

    Trajectory traj;
    traj.space = meq.space();
    traj.times = samples;
    if (opts.store_states) traj.states.reserve(samples.size());
    for (const auto& [name, op] : opts.record_ops) {
        if (op.space != meq.space()) {
            throw std::invalid_argument("evolve: record operator '" + name +
                                        "' on a different space");
        }
        traj.records[name].reserve(samples.size());
    }

    Matrix y = rho0.as_density();
    Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d);
    Matrix ytmp(d, d), y5(d, d), err(d, d);
    MasterEq::Workspace ws(d);

    auto rhs = [&](double t, const Matrix& in, Matrix& out) { meq.apply(t, in, out, ws); };

    auto emit_sample = [&](const Matrix& state) {
        if (opts.store_states) traj.states.push_back(state);
        for (const auto& [name, op] : opts.record_ops) {
            // Tr[rho M] as an elementwise sum
            traj.records[name].push_back(op.matrix.transpose().cwiseProduct(state).sum());
        }
    };

    const double span = t1 - t0;
    const double h_min = span * opts.min_step_fraction;
    double t = t0;
    std::size_t next_sample = 0;
    // first sample at t0
    while (next_sample < samples.size() && samples[next_sample] <= t0) {
        emit_sample(y);
        ++next_sample;
    }

    rhs(t, y, k1);
    // initial step guess from the RHS magnitude
    double scale = k1.cwiseAbs().maxCoeff();
    double h = (scale > 0) ? std::min(span / 10.0, 0.1 / scale) : span / 100.0;
    h = std::max(h, h_min * 10);

    // Steps land exactly on sample times, so stored states are RK solutions,
    // not interpolants.
    while (t < t1) {
        if (traj.accepted_steps + traj.rejected_steps >= opts.max_steps) {
            throw std::runtime_error("evolve: step budget exhausted at t = " + std::to_string(t));
        }
        const double t_target =
            (next_sample < samples.size()) ? std::min(samples[next_sample], t1) : t1;
        double h_try = std::min(h, t_target - t);
        const bool hits_target = (h_try >= t_target - t - 1e-16 * span);
        if (hits_target) h_try = t_target - t;

        ytmp = y + h_try * (a21 * k1);
        rhs(t + c2 * h_try, ytmp, k2);
        ytmp = y + h_try * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h_try, ytmp, k3);
        ytmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h_try, ytmp, k4);
        ytmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h_try, ytmp, k5);
        ytmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h_try, ytmp, k6);
        y5 = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h_try, y5, k7);  // FSAL
        err = y5 -
              (y + h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));

        const double enorm = error_norm(y, y5, err, opts.rtol, opts.atol);
        if (enorm <= 1.0) {
            t = (hits_target) ? t_target : t + h_try;
            y.swap(y5);
            k1.swap(k7);
            ++traj.accepted_steps;
            const double drift = std::abs(y.trace().real() - 1.0) + std::abs(y.trace().imag());
            traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
            while (next_sample < samples.size() && samples[next_sample] <= t + 1e-16 * span) {
                emit_sample(y);
                ++next_sample;
            }
        } else {
            ++traj.rejected_steps;
        }
        const double factor =
            (enorm > 0) ? std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0) : 5.0;
        if (enorm <= 1.0 && hits_target && h_try * factor < h) {
            // step was clipped to land on a sample; keep the controller's h
        } else {
            h = h_try * factor;
        }
        if (h < h_min) {
            throw std::runtime_error("evolve: step size underflow (stiffness) at t = " +
                                     std::to_string(t));
        }
    }

    if (traj.max_trace_drift > std::max(10 * opts.rtol, 1e-9)) {
        throw std::runtime_error("evolve: trace drift " + std::to_string(traj.max_trace_drift) +
                                 " exceeds tolerance");
    }
    const double floor = min_eigenvalue(y);
    if (floor < -1e-7) {
        throw std::runtime_error("evolve: final state positivity floor " + std::to_string(floor));
    }
    return traj;
}

State steady_state(const MasterEq& meq) {
    if (!meq.hamiltonian().is_static()) {
        throw std::invalid_argument("steady_state: Hamiltonian must be time-independent");
    }
    if (meq.collapse().empty() && meq.thermal().empty() && meq.cross().empty()) {
        throw std::invalid_argument("steady_state: at least one dissipator required");
    }
    const int d = meq.space().dim();
    const Matrix L = meq.liouvillian_matrix();
    Eigen::BDCSVD<Matrix> svd(L, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = sv(0) > 0 ? sv(0) : 1.0;
    // degenerate null space -> non-unique steady state
    if (sv.size() >= 2 && sv(sv.size() - 2) / scale < 1e-12) {
        throw std::runtime_error("steady_state: Liouvillian null space is degenerate");
    }
    Vector v = svd.matrixV().col(sv.size() - 1);
    Matrix rho = Eigen::Map<Matrix>(v.data(), d, d);
    rho /= rho.trace();
    rho = 0.5 * (rho + Matrix(rho.adjoint()));
    // clip eigenvalue dust from the numerical null vector
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), 0.0);
    rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    rho /= rho.trace();
    return State::density(meq.space(), std::move(rho));
}

double rabi_from_power(double n_bar, double gamma, double omega_alpha, double omega_w) {
    if (n_bar < 0) throw std::invalid_argument("rabi_from_power: n_bar must be >= 0");
    const double power = gamma * n_bar;
    return 2.0 * std::sqrt(2.0 * power * gamma * omega_alpha / omega_w);
}

std::vector<Complex> output_amplitude(const Trajectory& traj, const std::vector<OutputTerm>& terms,
                                      const std::function<Complex(double)>& a_in) {
    if (traj.states.empty()) {
        throw std::invalid_argument("output_amplitude: trajectory has no stored states");
    }
    for (const auto& term : terms) {
        if (term.op.space != traj.space) {
            throw std::invalid_argument("output_amplitude: operator space mismatch");
        }
    }
    std::vector<Complex> out(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        Complex v = a_in ? a_in(traj.times[i]) : Complex(0.0);
        for (const auto& term : terms) {
            const Complex phase = std::exp(Complex(0, term.phase));
            v += phase * std::sqrt(term.rate / 2.0) * (traj.states[i] * term.op.matrix).trace();
        }
        out[i] = v;
    }
    return out;
}

Op output_operator(const std::vector<OutputTerm>& terms) {
    if (terms.empty()) throw std::invalid_argument("output_operator: no terms");
    Op acc = zero_op(terms.front().op.space);
    for (const auto& term : terms) {
        const Complex phase = std::exp(Complex(0, term.phase));
        acc = acc + (phase * std::sqrt(term.rate / 2.0)) * term.op;
    }
    return acc;
}

}  // namespace ted
