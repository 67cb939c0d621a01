#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "qmsd/wigner.hpp"
#include "qmsd/zd.hpp"

namespace qmsd {

// Exclusivity-graph contextuality witness for a single qudit plus ancilla.
// Vertices are rank-1 two-qudit stabilizer projectors; edges join orthogonal
// pairs; the sum of all vertex projectors obeys
//   Sigma^{(u,v)} = (d^3 * 1 - A_{(u,v)} / d) (x) 1,
// with the trace-1 normalization of the phase-point operator (a trace count
// of the d(d^2-1) + d^3(d^2-1) rank-1 terms forces the 1/d).  Hence
// Tr(Sigma rho (x) sigma) = d^3 - d W_rho(u,v) regardless of sigma, and the
// bound d^3 is exceeded exactly when W_rho(u,v) < 0.

struct StabilizerStateInfo {
    Eigen::VectorXcd ket;  // dim d
    int a = 0, b = 0;      // eigenstate of Z^a X^b
    int eigen_exponent = 0;  // eigenvalue omega^{eigen_exponent}
};

// Eigenstates of the d+1 single-qudit Pauli bases, d(d+1) states total.
// Each state's Wigner function is 1/d on exactly d phase-space points.
std::vector<StabilizerStateInfo> enumerate_single_qudit_stabilizer_states(const Prime& d);

struct VertexGenerator {
    SymplecticVector op;  // two-qudit Pauli label
    int syndrome = 0;     // the vertex state obeys P(op)|psi> = omega^{syndrome}|psi>
};

struct ProjectorVertex {
    enum class Kind { Separable, Entangled };
    Kind kind = Kind::Separable;
    Eigen::VectorXcd ket;  // dim d^2; the projector is ket * ket^dag
    std::array<VertexGenerator, 2> generators;
    std::string label;
};

// |phi> (x) |k> for every single-qudit stabilizer state phi whose Wigner
// function vanishes at (u,v) and every computational ket k: d(d^2-1) vertices.
std::vector<ProjectorVertex> separable_projectors(const Prime& d, int u, int v);

// Choi states (U (x) 1)|Phi> for all d^3(d^2-1) single-qudit Cliffords,
// enumerated as P(p,q) V_F over F in SL(2,Z_d) and translations (p,q).
std::vector<ProjectorVertex> entangled_projectors(const Prime& d);

struct ExclusivityGraph {
    int d = 0;
    int u = 0, v = 0;
    std::vector<ProjectorVertex> vertices;
    std::vector<std::pair<int, int>> edges;  // i < j, edge iff Tr(Pi_i Pi_j) < 1e-10
};

ExclusivityGraph build_graph(const Prime& d, int u, int v, int threads = 0);

// Max entrywise deviation of the literal projector sum from
// (d^3 * 1 - A_{(u,v)} / d) (x) 1.
double sigma_identity_check(const Prime& d, int u, int v);

struct WitnessReport {
    int u = 0, v = 0;
    double value = 0.0;
    double bound = 0.0;  // d^3
    bool contextual = false;
    double closed_form = 0.0;  // d^3 - d W_rho(u,v), for cross-checking
};

// value = Tr(Sigma^{(u,v)} rho (x) sigma); contextual iff value > bound + 1e-9.
WitnessReport witness_value(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma,
                            const Prime& d, int u, int v);

// Vertices assigned value 1 by the deterministic phase-space model at the
// ontic point (z,x) for the system and (z2,x2) for the ancilla: a vertex
// fires iff the point lies in the support of its state's Wigner function.
// The result is always independent in g and has size <= d^3.
std::vector<int> ontological_independent_set(const ExclusivityGraph& g, int z, int x, int z2, int x2);

struct MisResult {
    int size = 0;
    std::vector<int> certificate;  // vertex indices, pairwise non-adjacent
    bool timed_out = false;        // true: exact search stopped early, size is a lower bound
};

// Exact branch-and-bound (max clique on the complement with greedy-coloring
// bounds). The certificate is re-verified against the edge list before return.
MisResult max_independent_set(const ExclusivityGraph& g, double time_budget_seconds = 600.0);

// DIMACS export: "p edge V E" then one "e i j" line per edge, 1-indexed.
std::string graph_to_dimacs(const ExclusivityGraph& g);

std::string witness_report_to_json(const WitnessReport& r);

}  // namespace qmsd
