// lindblad.hpp — Time-dependent Lindblad master equations: adaptive integration,
// steady states, and input-output field records.

#pragma once

#include "ted/fock.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ted {

// Hamiltonian as a static part plus scalar-coefficient terms,
//   H(t) = constant + sum_k coeff_k(t) * term_k,
// evaluated per integrator stage. Coefficients are real (rad/s).
struct TimeDependentOp {
    Op constant;
    struct Term {
        std::function<double(double)> coeff;
        Op op;
    };
    std::vector<Term> terms;

    explicit TimeDependentOp(Op c) : constant(std::move(c)) {}
    TimeDependentOp() = default;

    bool is_static() const { return terms.empty(); }
    void add_term(std::function<double(double)> coeff, Op op);
    // Writes constant + sum coeff_k(t) term_k into `out` (resized as needed).
    void evaluate(double t, Matrix& out) const;
    Op at(double t) const;
};

struct Collapse {
    double rate = 0.0;  // 1/s
    Op op;
};

// Cross-component pair entering as rate * (L2[A,B] + L2[B,A]) with
// L2[A,B] rho = A rho B† - {A†B, rho}/2. Propagation phases live inside the
// operators, so `rate` stays real and non-negative.
struct CrossTerm {
    double rate = 0.0;
    Op a;
    Op b;
};

namespace detail {
// coordinate-list view of the (sparse) operator matrices, cached so the
// right-hand side avoids dense products with mostly-zero factors
struct CooEntry {
    int row;
    int col;
    Complex value;
};
using Coo = std::vector<CooEntry>;
}  // namespace detail

class MasterEq {
public:
    MasterEq(ProductSpace space, TimeDependentOp hamiltonian,
             std::vector<Collapse> collapse = {}, std::vector<Collapse> thermal = {},
             std::vector<CrossTerm> cross = {});

    const ProductSpace& space() const { return space_; }
    const TimeDependentOp& hamiltonian() const { return hamiltonian_; }
    const std::vector<Collapse>& collapse() const { return collapse_; }
    const std::vector<Collapse>& thermal() const { return thermal_; }
    const std::vector<CrossTerm>& cross() const { return cross_; }

    struct Workspace {
        Matrix a, b;
        explicit Workspace(int dim) : a(dim, dim), b(dim, dim) {}
    };

    // d(rho)/dt at time t
    void apply(double t, const Matrix& rho, Matrix& out, Workspace& ws) const;

    // Dense superoperator on column-stacked rho; requires a static Hamiltonian
    // unless `t` is given explicitly.
    Matrix liouvillian_matrix(double t = 0.0) const;

private:
    ProductSpace space_;
    TimeDependentOp hamiltonian_;
    std::vector<Collapse> collapse_;
    std::vector<Collapse> thermal_;
    std::vector<CrossTerm> cross_;

    // cached sparse views
    detail::Coo ham_const_coo_;
    std::vector<detail::Coo> ham_term_coo_;
    detail::Coo damping_coo_;  // -(1/2) sum rate L†L over all channels
    struct Jump {
        double rate;
        detail::Coo op;
    };
    std::vector<Jump> jumps_;
    struct CrossCoo {
        double rate;
        detail::Coo a;
        detail::Coo b;
    };
    std::vector<CrossCoo> cross_coo_;
};

struct Trajectory {
    ProductSpace space;
    std::vector<double> times;
    std::vector<Matrix> states;
    std::map<std::string, std::vector<Complex>> records;
    // integration diagnostics
    long accepted_steps = 0;
    long rejected_steps = 0;
    double max_trace_drift = 0.0;
};

struct EvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    int n_samples = 201;                     // uniform samples incl. endpoints
    std::vector<double> sample_times;        // overrides n_samples when set
    std::vector<std::pair<std::string, Op>> record_ops;
    bool store_states = true;
    long max_steps = 50000000;               // guard against runaway runs
    double min_step_fraction = 1e-13;        // of the span; smaller -> stiffness error
};

// Adaptive Dormand-Prince 5(4) integration of the master equation.
Trajectory evolve(const MasterEq& meq, const State& rho0, double t0, double t1,
                  const EvolveOptions& opts = {});

// Null-space steady state of the (static) Liouvillian, trace-normalized.
State steady_state(const MasterEq& meq);

// Rabi rate of a coherent waveguide drive of strength n_bar photons per 1/gamma:
// Omega = 2 sqrt(2 P gamma w_alpha / w_w) with P = gamma n_bar.
double rabi_from_power(double n_bar, double gamma, double omega_alpha, double omega_w);

struct OutputTerm {
    double phase = 0.0;  // radians
    double rate = 0.0;   // 1/s
    Op op;
};

// <a_out>(t) = a_in(t) + sum e^{i phase} sqrt(rate/2) <op>(t) over the stored samples.
std::vector<Complex> output_amplitude(const Trajectory& traj, const std::vector<OutputTerm>& terms,
                                      const std::function<Complex(double)>& a_in = nullptr);

// The combined output operator sum e^{i phase} sqrt(rate/2) op, for power records.
Op output_operator(const std::vector<OutputTerm>& terms);

}  // namespace ted
