#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmsd/zd.hpp"

namespace qmsd {

// Discrete Wigner function of an n-qudit state, one real value per phase
// space point.  Flat layout: per-qudit digit z_i*d + x_i, qudit 1 most
// significant, so flat = sum_i (z_i*d + x_i) * d^{2(n-1-i)}.
struct WignerFunction {
    int d = 0;
    int n_qudits = 0;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    // Single-qudit accessors.
    double at(int z, int x) const { return values[static_cast<size_t>(z) * d + x]; }
    double& at(int z, int x) { return values[static_cast<size_t>(z) * d + x]; }
};

WignerFunction uniform_wigner(Prime d, int n_qudits);

int wigner_flat_index(int d, const std::vector<int>& z, const std::vector<int>& x);

// Z^a X^b as a d x d matrix: Z|k> = w^k |k>, X|k> = |k+1>.
Eigen::MatrixXcd pauli_matrix(int d, int a, int b);

// Tensor product over qudits, qudit 1 as the leading Kronecker factor.
Eigen::MatrixXcd pauli_matrix(const SymplecticVector& v);

// Phase point operator A_{(u,v)} = P(u,v) A_{(0,0)} P(u,v)^dag with
// A_{(0,0)} = sum_{z,x} w^{-z x / 2} P(z,x); trace d, Hermitian.  Cached per
// (d,u,v); concurrent readers are safe.
const Eigen::MatrixXcd& phase_point_operator(int d, int u, int v);

// W(z,x) = Tr(rho A_{(z,x)}) / d^{2n}, normalized so the values sum to
// Tr(rho) and the product rule holds for product states.
WignerFunction wigner_from_density(const Eigen::MatrixXcd& rho, int d, int n_qudits);

// Inverse map: rho = sum_p W(p) A_p / d^n.
Eigen::MatrixXcd density_from_wigner(const WignerFunction& w);

WignerFunction tensor(const WignerFunction& lhs, const WignerFunction& rhs);

struct PolytopeVerdict {
    enum class Kind { Inside, OnBoundary, Outside };
    Kind kind = Kind::Inside;
    std::vector<int> points;  // offending flat indices (negative or boundary)
};

// Classifies a single-qudit quasidistribution against W >= 0.
PolytopeVerdict polytope_membership(const WignerFunction& w, double tol = 1e-9);

// One-parameter family: value nu at a distinguished point, uniform
// (1-nu)/(d^2-1) elsewhere.
struct NuFamilyState {
    int d = 0;
    double nu = 0.0;
    int u = 0;
    int v = 0;
};

// Projects a single-qudit Wigner function onto the family that keeps the
// minimum entry (ties broken toward the smallest flat index) and spreads the
// remaining weight uniformly.
NuFamilyState to_nu_family(const WignerFunction& w);

WignerFunction nu_family_wigner(Prime d, double nu, int u, int v);

// JSON format: {"d": 3, "N": 1, "values": [...]} with values written to 17
// significant digits.
WignerFunction wigner_from_json(const std::string& text);
std::string wigner_to_json(const WignerFunction& w);

// Dense matrix JSON: {"d": 3, "re": [[...]], "im": [[...]]}.  The matrix side
// must be a power of d; the inferred qudit count is returned through n_out.
Eigen::MatrixXcd density_from_json(const std::string& text, int* d_out, int* n_out);

}  // namespace qmsd
