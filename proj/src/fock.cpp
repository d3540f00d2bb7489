#include "ted/fock.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>
#include <stdexcept>

namespace ted {

ProductSpace::ProductSpace(std::vector<ModeSpec> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) {
        throw std::invalid_argument("ProductSpace: at least one mode required");
    }
    std::set<std::string> seen;
    total_dim_ = 1;
    for (const auto& m : modes_) {
        if (m.dim < 2) {
            throw std::invalid_argument("ProductSpace: mode '" + m.label + "' has dim " +
                                        std::to_string(m.dim) + ", need >= 2");
        }
        if (!seen.insert(m.label).second) {
            throw std::invalid_argument("ProductSpace: duplicate mode label '" + m.label + "'");
        }
        total_dim_ *= m.dim;
    }
}

int ProductSpace::index_of(const std::string& label) const {
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        if (modes_[k].label == label) return static_cast<int>(k);
    }
    throw std::invalid_argument("ProductSpace: unknown mode label '" + label + "'");
}

bool ProductSpace::has_mode(const std::string& label) const {
    for (const auto& m : modes_) {
        if (m.label == label) return true;
    }
    return false;
}

int ProductSpace::basis_index(const std::vector<int>& occupations) const {
    if (occupations.size() != modes_.size()) {
        throw std::invalid_argument("basis_index: need one occupation per mode");
    }
    int idx = 0;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const int n = occupations[k];
        if (n < 0 || n >= modes_[k].dim) {
            throw std::out_of_range("basis_index: occupation " + std::to_string(n) +
                                    " outside truncation of mode '" + modes_[k].label + "'");
        }
        idx = idx * modes_[k].dim + n;
    }
    return idx;
}

bool ProductSpace::operator==(const ProductSpace& other) const {
    if (modes_.size() != other.modes_.size()) return false;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        if (modes_[k].label != other.modes_[k].label) return false;
        if (modes_[k].dim != other.modes_[k].dim) return false;
    }
    return true;
}

Op::Op(ProductSpace s, Matrix m) : space(std::move(s)), matrix(std::move(m)) {
    if (matrix.rows() != space.dim() || matrix.cols() != space.dim()) {
        throw std::invalid_argument("Op: matrix dimensions do not match space");
    }
}

bool Op::is_hermitian(double tol) const { return ted::is_hermitian(matrix, tol); }

namespace {

void check_same_space(const Op& a, const Op& b, const char* what) {
    if (a.space != b.space) {
        throw std::invalid_argument(std::string(what) + ": operators live on different spaces");
    }
}

Matrix single_mode_lowering(int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

}  // namespace

Op operator+(const Op& a, const Op& b) {
    check_same_space(a, b, "Op+");
    return Op(a.space, a.matrix + b.matrix);
}

Op operator-(const Op& a, const Op& b) {
    check_same_space(a, b, "Op-");
    return Op(a.space, a.matrix - b.matrix);
}

Op operator*(const Op& a, const Op& b) {
    check_same_space(a, b, "Op*");
    return Op(a.space, a.matrix * b.matrix);
}

Op operator*(Complex c, const Op& a) { return Op(a.space, c * a.matrix); }
Op operator*(double c, const Op& a) { return Op(a.space, c * a.matrix); }

Op lowering(const ProductSpace& space, const std::string& mode) {
    const int target = space.index_of(mode);
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < space.n_modes(); ++k) {
        const int d = space.mode(k).dim;
        const Matrix block = (k == target) ? single_mode_lowering(d)
                                           : Matrix(Matrix::Identity(d, d));
        out = kron(out, block);
    }
    return Op(space, std::move(out));
}

Op raising(const ProductSpace& space, const std::string& mode) {
    return lowering(space, mode).adjoint();
}

Op number_op(const ProductSpace& space, const std::string& mode) {
    Op a = lowering(space, mode);
    return Op(space, a.matrix.adjoint() * a.matrix);
}

Op identity_op(const ProductSpace& space) {
    return Op(space, Matrix::Identity(space.dim(), space.dim()));
}

Op zero_op(const ProductSpace& space) {
    return Op(space, Matrix::Zero(space.dim(), space.dim()));
}

Op transition_part(const Op& op, const std::string& mode, int from_level, int to_level) {
    const ProductSpace& space = op.space;
    const int target = space.index_of(mode);
    const int d = space.mode(target).dim;
    if (from_level < 0 || from_level >= d || to_level < 0 || to_level >= d) {
        throw std::out_of_range("transition_part: levels outside truncation of mode '" + mode +
                                "'");
    }

    // Mode-local matrix element, read off the embedded operator with all other
    // modes in their ground state.
    std::vector<int> occ_from(static_cast<std::size_t>(space.n_modes()), 0);
    std::vector<int> occ_to = occ_from;
    occ_from[static_cast<std::size_t>(target)] = from_level;
    occ_to[static_cast<std::size_t>(target)] = to_level;
    const Complex element = op.matrix(space.basis_index(occ_to), space.basis_index(occ_from));

    Matrix local = Matrix::Zero(d, d);
    local(to_level, from_level) = element;

    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < space.n_modes(); ++k) {
        const int dk = space.mode(k).dim;
        const Matrix block = (k == target) ? local : Matrix(Matrix::Identity(dk, dk));
        out = kron(out, block);
    }
    return Op(space, std::move(out));
}

State State::ket(const ProductSpace& space, Vector psi) {
    if (psi.size() != space.dim()) {
        throw std::invalid_argument("State::ket: vector length does not match space");
    }
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-10) {
        throw std::invalid_argument("State::ket: norm deviates from 1 by " +
                                    std::to_string(std::abs(norm - 1.0)));
    }
    State s;
    s.kind_ = Kind::Ket;
    s.space_ = space;
    s.psi_ = std::move(psi);
    return s;
}

State State::density(const ProductSpace& space, Matrix rho) {
    if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
        throw std::invalid_argument("State::density: matrix does not match space");
    }
    if (!ted::is_hermitian(rho, 1e-9)) {
        throw std::invalid_argument("State::density: matrix is not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10) {
        throw std::invalid_argument("State::density: trace deviates from 1");
    }
    if (min_eigenvalue(rho) < -1e-8) {
        throw std::invalid_argument("State::density: matrix has eigenvalue below -1e-8");
    }
    State s;
    s.kind_ = Kind::Density;
    s.space_ = space;
    s.rho_ = std::move(rho);
    return s;
}

State State::basis_ket(const ProductSpace& space, const std::vector<int>& occupations) {
    Vector psi = Vector::Zero(space.dim());
    psi(space.basis_index(occupations)) = 1.0;
    return ket(space, std::move(psi));
}

const Vector& State::ket_data() const {
    if (kind_ != Kind::Ket) throw std::logic_error("State: not a ket");
    return psi_;
}

const Matrix& State::density_data() const {
    if (kind_ != Kind::Density) throw std::logic_error("State: not a density matrix");
    return rho_;
}

Matrix State::as_density() const {
    if (kind_ == Kind::Density) return rho_;
    return psi_ * psi_.adjoint();
}

Complex expectation(const State& state, const Op& op) {
    if (state.space() != op.space) {
        throw std::invalid_argument("expectation: state and operator spaces differ");
    }
    if (state.kind() == State::Kind::Ket) {
        const Vector& psi = state.ket_data();
        return psi.dot(op.matrix * psi);  // Eigen dot conjugates the left argument
    }
    return expectation(state.density_data(), op);
}

Complex expectation(const Matrix& rho, const Op& op) {
    if (rho.rows() != op.space.dim()) {
        throw std::invalid_argument("expectation: density matrix does not match operator space");
    }
    return op.matrix.transpose().cwiseProduct(rho).sum();
}

bool is_hermitian(const Matrix& m, double tol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hermitian + hermitian.adjoint()));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("min_eigenvalue: eigensolve failed");
    }
    return es.eigenvalues().minCoeff();
}

Matrix thermal_mode(int dim, double n_th) {
    if (dim < 1) throw std::invalid_argument("thermal_mode: dim must be >= 1");
    if (n_th < 0) throw std::invalid_argument("thermal_mode: n_th must be >= 0");
    Matrix rho = Matrix::Zero(dim, dim);
    if (n_th == 0.0) {
        rho(0, 0) = 1.0;
        return rho;
    }
    const double ratio = n_th / (1.0 + n_th);
    double p = 1.0;
    double total = 0.0;
    for (int n = 0; n < dim; ++n) {
        rho(n, n) = p;
        total += p;
        p *= ratio;
    }
    rho /= total;
    return rho;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace ted
