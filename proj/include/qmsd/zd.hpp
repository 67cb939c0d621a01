#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qmsd/errors.hpp"

namespace qmsd {

// Largest modulus accepted anywhere.  Enumerations downstream scale like d^2
// and d^4, so the cap keeps every code path tractable.
inline constexpr int kMaxPrime = 97;

// Validated odd prime modulus.
class Prime {
  public:
    explicit Prime(int value);
    int value() const { return value_; }

  private:
    int value_;
};

// Canonical representative of x in [0, d).
inline int mod_reduce(long long x, int d) {
    int r = static_cast<int>(x % d);
    return r < 0 ? r + d : r;
}

// Multiplicative inverse mod an odd prime, by the extended Euclidean
// algorithm.  Throws ZeroInverseError when a == 0 (mod d).
int mod_inverse(int a, int d);

struct ZdVector {
    int d = 0;
    std::vector<int> e;

    int size() const { return static_cast<int>(e.size()); }
    bool is_zero() const;
};

// Dense row-major matrix over Z_d.
struct ZdMatrix {
    int d = 0;
    int rows = 0;
    int cols = 0;
    std::vector<int> a;

    ZdMatrix() = default;
    ZdMatrix(int d_, int rows_, int cols_) : d(d_), rows(rows_), cols(cols_), a(static_cast<size_t>(rows_) * cols_, 0) {}

    int& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    int at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

bool operator==(const ZdMatrix& lhs, const ZdMatrix& rhs);

struct RowReduction {
    ZdMatrix rref;
    int rank = 0;
    std::vector<int> pivot_cols;
};

// Reduced row echelon form over Z_d.  Pivot search scans columns left to
// right and rows top to bottom; each pivot is normalized to 1 and cleared
// above and below, so the result is a canonical representative of the row
// space.
RowReduction row_reduce(const ZdMatrix& m);

// One solution of m x = rhs (free variables set to 0), or nullopt when the
// system is inconsistent.
std::optional<ZdVector> solve_linear(const ZdMatrix& m, const ZdVector& rhs);

// Pauli label (a | b): the operator prod_i Z^{a_i} X^{b_i} on n qudits.
struct SymplecticVector {
    int d = 0;
    std::vector<int> a;
    std::vector<int> b;

    int n_qudits() const { return static_cast<int>(a.size()); }
};

// a.b' - b.a' (mod d).  Zero exactly when the two Pauli operators commute.
int symplectic_product(const SymplecticVector& p, const SymplecticVector& q);

}  // namespace qmsd
