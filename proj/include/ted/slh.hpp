// slh.hpp — (S, L, H) component triples and their composition into cascaded
// network master equations. Scattering entries are complex scalars.

#pragma once

#include "ted/fock.hpp"
#include "ted/lindblad.hpp"
#include "ted/model.hpp"

#include <string>
#include <vector>

namespace ted {

struct SlhTriple {
    Matrix S;             // P x P complex scalars, unitary
    std::vector<Op> L;    // one operator per port (zero operators allowed)
    Op H;

    SlhTriple() = default;
    SlhTriple(Matrix s, std::vector<Op> l, Op h);

    int ports() const { return static_cast<int>(S.rows()); }
    const ProductSpace& space() const { return H.space; }
    // S S† deviation from identity
    double unitarity_defect() const;
    void validate(double tol = 1e-12) const;
};

// n-port trivial component on a space: S = I, L = 0, H = 0.
SlhTriple identity_component(int ports, const ProductSpace& space);
// one-port phase delay D(phi)
SlhTriple phase_delay(double phi, const ProductSpace& space);
// lossy three-port circulator (ports 4..6 are loss channels); L = 0, H = 0
SlhTriple circulator(double eta, const ProductSpace& space);

// Block-diagonal S, stacked L, summed H. Components on the same space are
// combined in place; components on disjoint spaces are embedded into the
// joint space (modes of c1 followed by modes of c2).
SlhTriple concatenate(const SlhTriple& c1, const SlhTriple& c2);

// Series composition feeding the outputs of c1 into the inputs of c2:
// S = S2 S1, L = L2 + S2 L1, H = H1 + H2 + Im(L2† S2 L1).
SlhTriple cascade(const SlhTriple& c2, const SlhTriple& c1);

// Close the loop from output port x into input port y (1-indexed).
SlhTriple feedback(const SlhTriple& c, int out_port, int in_port);

struct NetworkSpec {
    EffectiveTed sted;
    EffectiveTed mted;
    double eta = 0.0;    // loss strength in [0, 1]
    double phi_s = 0.0;  // sTED <-> circulator propagation phase
    double phi_m = 0.0;  // circulator <-> mTED propagation phase

    void validate() const;
};

// Default composed-network space (d_s, w_s, d_m, w_m).
ProductSpace network_space(int dim_ds = 2, int dim_ws = 2, int dim_dm = 2, int dim_wm = 3);

struct PitchDetectModel {
    MasterEq meq;
    // input-output record coefficients for the measurement line
    std::vector<OutputTerm> a_out;  // e^{i(phi_s+phi_m)} sqrt(g_s/2) w_s + sqrt(g_m/2) w_m^(01)
    std::vector<OutputTerm> b_out;  // sqrt(g_m/2) w_m^(12)
    // the composed network triple, for inspection/tests
    SlhTriple network;
};

// Compose one-port sTED and mTED, two phase delays, and the lossy circulator,
// close the two feedback loops, and reduce to a master equation on the
// four-mode space. Time-dependent Hamiltonian parts (g_p envelopes, Stark
// corrections, optional coherent drive on w_m) ride on top of the composed
// static generator.
PitchDetectModel build_pitch_detect(const NetworkSpec& spec, const ProductSpace& space);

// Direct term-by-term construction of the same two-TED master equation
// (local dissipators, cross pair with the propagation phase folded into w_m,
// and the excitation-exchange Hamiltonian). Used as an independent check of
// the composed reduction.
MasterEq direct_two_ted_master_eq(const NetworkSpec& spec, const ProductSpace& space);

}  // namespace ted
