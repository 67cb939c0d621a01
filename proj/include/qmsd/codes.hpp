#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmsd/zd.hpp"

namespace qmsd {

// An [[N, 1]] qudit stabilizer code: N-1 independent commuting Pauli
// generators over Z_d, each row of m holding (a_1..a_N | b_1..b_N), plus the
// target eigenvalue exponent s_i (eigenvalue w^{s_i}) per generator.
struct StabilizerCode {
    int d = 0;
    int N = 0;
    ZdMatrix m;          // (N-1) x 2N
    ZdVector syndrome;   // length N-1
};

SymplecticVector code_row(const StabilizerCode& code, int row);

struct CodeValidation {
    bool valid = false;
    std::string reason;  // empty when valid
};

// Checks shapes, entry ranges, pairwise commutation and row independence.
// Reports the first violated commutation pair or the rank defect.
CodeValidation validate(const StabilizerCode& code);

// Block data of the canonical generator matrix
//
//     ( 1_n  A  vecA | B    0  vecB )
//     ( 0    0  0    | C  1_m  vecC )
//
// with n = rank of the Z block, m = N-1-n, reached by row scaling, row
// addition and qudit exchange.  column_permutation[j] is the original qudit
// index now sitting at canonical position j; syndrome is transformed
// covariantly with the row operations.
struct CanonicalCode {
    int d = 0;
    int N = 0;
    int n = 0;
    int m = 0;
    ZdMatrix A;       // n x m
    ZdMatrix B;       // n x n
    ZdMatrix C;       // m x n
    ZdVector vec_a;   // length n
    ZdVector vec_b;   // length n
    ZdVector vec_c;   // length m
    std::vector<int> column_permutation;  // length N
    ZdVector syndrome;                    // length N-1
};

CanonicalCode canonicalize(const StabilizerCode& code);

// Canonical generator matrix in canonical column order.
ZdMatrix reassemble(const CanonicalCode& canon);

// Canonical generators mapped back to the original qudit order.
StabilizerCode to_physical_code(const CanonicalCode& canon);

struct LogicalPair {
    SymplecticVector z_l;
    SymplecticVector x_l;
};

// Logical Z and X of the encoded qudit, in the original qudit order.
// symplectic_product(z_l, x_l) == 1 and both commute with every generator.
LogicalPair logical_operators(const CanonicalCode& canon);

// A code is trivial exactly when vecA, vecB and vecC all vanish; such a code
// projects N-1 qudits onto a stabilizer state and passes one qudit through.
bool is_trivial(const CanonicalCode& canon);

// Rejection sampling: uniform candidate rows are kept only when they commute
// with and are independent of the rows already kept.  Syndrome is zero.
// Deterministic for a fixed seed.
StabilizerCode random_code(Prime d, int n_qudits, uint64_t seed);

// JSON format:
//   {"d": 3, "N": 2, "rows": [[a_1..a_N, b_1..b_N], ...], "syndrome": [s...]}
StabilizerCode code_from_json(const std::string& text);
std::string code_to_json(const StabilizerCode& code);
StabilizerCode load_code_file(const std::string& path);

}  // namespace qmsd
