#include "qmsd/dense.hpp"

#include <complex>

#include "qmsd/errors.hpp"

namespace qmsd {

namespace {

long long ipow(int base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

void check_budget(int d, int n) {
    if (ipow(d, n) > kDenseBudget) {
        throw BudgetExceededError("dense register exceeds the d^N <= 243 budget");
    }
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& m, int k) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    for (int i = 0; i < k; ++i) out = out * m;
    return out;
}

std::complex<double> product_trace(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return a.cwiseProduct(b.transpose()).sum();
}

// The phase-space membership rule reads the eigenvalue of a Pauli label
// (a | b) as w^{a.x - b.z}.  The matrix with that spectrum on the matching
// lines is the symmetrized displacement w^{-2^{-1} a.b} Z^a X^b, not the
// plain product: the matrices here must carry that phase or the projector
// lands on a cyclically shifted eigenspace whenever a.b != 0 (mod d).
int displacement_shift(const SymplecticVector& v) {
    long long dot = 0;
    for (int j = 0; j < v.n_qudits(); ++j) dot += static_cast<long long>(v.a[j]) * v.b[j];
    return mod_reduce(static_cast<long long>(mod_inverse(2, v.d)) * dot, v.d);
}

Eigen::MatrixXcd displacement_matrix(const SymplecticVector& v) {
    const double angle = -2.0 * M_PI * displacement_shift(v) / v.d;
    return std::complex<double>(std::cos(angle), std::sin(angle)) * pauli_matrix(v);
}

}  // namespace

DenseState make_dense_state(const Eigen::MatrixXcd& m, int d, bool* quasi) {
    Prime p(d);
    if (m.rows() != m.cols() || m.rows() < d) throw ShapeError("density matrix must be square");
    long long side = m.rows();
    int n = 0;
    while (side > 1) {
        if (side % d != 0) throw ShapeError("matrix side is not a power of d");
        side /= d;
        ++n;
    }
    check_budget(d, n);
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ShapeError("density matrix is not Hermitian");
    }
    if (std::abs(m.trace() - std::complex<double>(1.0, 0.0)) > 1e-12) {
        throw ShapeError("density matrix trace differs from 1");
    }
    if (quasi) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        *quasi = es.eigenvalues().minCoeff() < -1e-10;
    }
    return DenseState{m, d, n};
}

Eigen::MatrixXcd codespace_projector(const StabilizerCode& code) {
    CodeValidation check = validate(code);
    if (!check.valid) throw InvalidCodeError("codespace_projector: " + check.reason);
    check_budget(code.d, code.N);

    const long long dim = ipow(code.d, code.N);
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(dim, dim);
    for (int i = 0; i < code.N - 1; ++i) {
        const Eigen::MatrixXcd s = displacement_matrix(code_row(code, i));
        Eigen::MatrixXcd factor = Eigen::MatrixXcd::Zero(dim, dim);
        Eigen::MatrixXcd s_pow = Eigen::MatrixXcd::Identity(dim, dim);
        for (int k = 0; k < code.d; ++k) {
            const double angle = -2.0 * M_PI * mod_reduce(static_cast<long long>(code.syndrome.e[i]) * k, code.d) / code.d;
            factor += std::complex<double>(std::cos(angle), std::sin(angle)) * s_pow;
            s_pow = s_pow * s;
        }
        proj = proj * (factor / static_cast<double>(code.d));
    }
    return proj;
}

DenseDistillationResult distill_dense(const StabilizerCode& code, const DenseState& rho_in) {
    if (rho_in.d != code.d) throw DimensionMismatchError("distill_dense: modulus mismatch");
    if (rho_in.n_qudits != 1) throw ShapeError("distill_dense: input must be a single qudit");
    check_budget(code.d, code.N);

    const int d = code.d;
    Eigen::MatrixXcd rho_n = rho_in.matrix;
    for (int i = 1; i < code.N; ++i) {
        Eigen::MatrixXcd next(rho_n.rows() * d, rho_n.cols() * d);
        for (int r = 0; r < rho_n.rows(); ++r) {
            for (int c = 0; c < rho_n.cols(); ++c) {
                next.block(r * d, c * d, d, d) = rho_n(r, c) * rho_in.matrix;
            }
        }
        rho_n = std::move(next);
    }

    const Eigen::MatrixXcd proj = codespace_projector(code);
    const double p = product_trace(proj, rho_n).real();
    if (p <= 1e-12) throw ZeroAcceptanceError("dense distillation accepts with probability 0");

    const Eigen::MatrixXcd conditioned = (proj * rho_n * proj) / p;
    const LogicalPair logical = logical_operators(canonicalize(code));
    const Eigen::MatrixXcd z_mat = displacement_matrix(logical.z_l);
    const Eigen::MatrixXcd x_mat = displacement_matrix(logical.x_l);

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        const Eigen::MatrixXcd za = matrix_power(z_mat, a);
        for (int b = 0; b < d; ++b) {
            const Eigen::MatrixXcd logical_op = za * matrix_power(x_mat, b);
            const std::complex<double> coeff = product_trace(conditioned, logical_op.adjoint());
            out += coeff * pauli_matrix(code.d, a, b);
        }
    }
    out /= static_cast<double>(d);

    DenseDistillationResult result;
    result.rho_out = DenseState{out, d, 1};
    result.acceptance_probability = p;
    return result;
}

}  // namespace qmsd
