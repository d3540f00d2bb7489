// fock.hpp — Truncated multi-mode bosonic spaces, labeled operators, and states.
//
// Everything here is a plain value: ProductSpace fixes the mode ordering at
// construction, Op and State carry their space, and all cross-module exchange
// checks label+dim equality. No interior mutation after construction.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace ted {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

struct ModeSpec {
    std::string label;
    int dim = 2;  // truncation levels, >= 2
};

class ProductSpace {
public:
    ProductSpace() = default;
    explicit ProductSpace(std::vector<ModeSpec> modes);

    int n_modes() const { return static_cast<int>(modes_.size()); }
    int dim() const { return total_dim_; }
    const ModeSpec& mode(int k) const { return modes_.at(static_cast<std::size_t>(k)); }
    const std::vector<ModeSpec>& modes() const { return modes_; }

    // Index of a labeled mode; throws naming the label if absent.
    int index_of(const std::string& label) const;
    bool has_mode(const std::string& label) const;

    // Row-major linear index of a basis state given one occupation per mode.
    int basis_index(const std::vector<int>& occupations) const;

    bool operator==(const ProductSpace& other) const;
    bool operator!=(const ProductSpace& other) const { return !(*this == other); }

private:
    std::vector<ModeSpec> modes_;
    int total_dim_ = 0;
};

struct Op {
    ProductSpace space;
    Matrix matrix;

    Op() = default;
    Op(ProductSpace s, Matrix m);

    Op adjoint() const { return Op(space, matrix.adjoint()); }
    bool is_hermitian(double tol = 1e-12) const;
};

Op operator+(const Op& a, const Op& b);
Op operator-(const Op& a, const Op& b);
Op operator*(const Op& a, const Op& b);
Op operator*(Complex c, const Op& a);
Op operator*(double c, const Op& a);

// Annihilation operator on the named mode, identity elsewhere.
Op lowering(const ProductSpace& space, const std::string& mode);
Op raising(const ProductSpace& space, const std::string& mode);
Op number_op(const ProductSpace& space, const std::string& mode);
Op identity_op(const ProductSpace& space);
Op zero_op(const ProductSpace& space);

// Keep only the single mode-local |to><from| element of `op` (for a lowering
// operator, the element sqrt(from) when to = from-1), re-embedded into the
// product space. Summing the parts over all adjacent level pairs recovers the
// full lowering operator.
Op transition_part(const Op& op, const std::string& mode, int from_level, int to_level);

class State {
public:
    enum class Kind { Ket, Density };

    static State ket(const ProductSpace& space, Vector psi);
    static State density(const ProductSpace& space, Matrix rho);
    // |n1 n2 ...> basis ket
    static State basis_ket(const ProductSpace& space, const std::vector<int>& occupations);

    Kind kind() const { return kind_; }
    const ProductSpace& space() const { return space_; }
    const Vector& ket_data() const;
    const Matrix& density_data() const;
    Matrix as_density() const;

private:
    State() = default;
    Kind kind_ = Kind::Ket;
    ProductSpace space_;
    Vector psi_;
    Matrix rho_;
};

// Tr[rho op] for density matrices, <psi|op|psi> for kets.
Complex expectation(const State& state, const Op& op);
Complex expectation(const Matrix& rho, const Op& op);

// Validity checks shared by tests and the dynamics module.
bool is_hermitian(const Matrix& m, double tol = 1e-12);
double min_eigenvalue(const Matrix& hermitian);

// Thermal single-mode density matrix with mean occupation n_th (truncated and
// renormalized).
Matrix thermal_mode(int dim, double n_th);

// Kronecker product of density blocks ordered as the space's modes.
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace ted
