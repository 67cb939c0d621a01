#pragma once

#include <Eigen/Dense>

#include "qmsd/codes.hpp"
#include "qmsd/wigner.hpp"

namespace qmsd {

// Dense density-matrix simulator for small registers. This path never touches
// the phase-space engine; the two are kept independent so each can check the
// other.

struct DenseState {
    Eigen::MatrixXcd matrix;
    int d = 0;
    int n_qudits = 0;
};

inline constexpr int kDenseBudget = 243;  // max matrix side length d^N

// Wraps a matrix after checking Hermiticity (1e-12) and unit trace (1e-12).
// Negative eigenvalues down to -1e-10 are allowed; anything below marks the
// state as a quasi-state, reported through *quasi when non-null.
DenseState make_dense_state(const Eigen::MatrixXcd& m, int d, bool* quasi = nullptr);

// Projector onto the joint eigenspace where stabilizer row i has eigenvalue
// omega^{s_i}: product over rows of (1/d) sum_k omega^{-s_i k} T_i^k, with
// T_i the symmetrized displacement omega^{-2^{-1} a.b} Z^a X^b.  The
// displacement phase keeps matrix eigenvalues aligned with the phase-space
// membership rule w^{a.x - b.z}.
Eigen::MatrixXcd codespace_projector(const StabilizerCode& code);

struct DenseDistillationResult {
    DenseState rho_out;  // single qudit
    double acceptance_probability = 0.0;
};

// Projects rho_in^{tensor N} onto the codespace and reads the logical qudit
// back out by logical-Pauli tomography:
//   Tr(rho_out (Z^a X^b)^dag) = Tr(Pi rho^{(N)} Pi (Z_L^a X_L^b)^dag) / p.
// Logical powers are formed by explicit matrix products so operator phases
// are never tracked by hand.
DenseDistillationResult distill_dense(const StabilizerCode& code, const DenseState& rho_in);

}  // namespace qmsd
