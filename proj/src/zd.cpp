#include "qmsd/zd.hpp"

#include <algorithm>
#include <string>

namespace qmsd {

namespace {

bool is_prime(int v) {
    if (v < 2) return false;
    for (int p = 2; p * p <= v; ++p) {
        if (v % p == 0) return false;
    }
    return true;
}

}  // namespace

Prime::Prime(int value) : value_(value) {
    if (value < 3 || value > kMaxPrime || value % 2 == 0 || !is_prime(value)) {
        throw Error("modulus must be an odd prime <= " + std::to_string(kMaxPrime) +
                    ", got " + std::to_string(value));
    }
}

int mod_inverse(int a, int d) {
    a = mod_reduce(a, d);
    if (a == 0) {
        throw ZeroInverseError("0 has no inverse mod " + std::to_string(d));
    }
    int r0 = d, r1 = a;
    int t0 = 0, t1 = 1;
    while (r1 != 0) {
        int q = r0 / r1;
        int r2 = r0 - q * r1;
        int t2 = t0 - q * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    return mod_reduce(t0, d);
}

bool ZdVector::is_zero() const {
    return std::all_of(e.begin(), e.end(), [](int v) { return v == 0; });
}

bool operator==(const ZdMatrix& lhs, const ZdMatrix& rhs) {
    return lhs.d == rhs.d && lhs.rows == rhs.rows && lhs.cols == rhs.cols && lhs.a == rhs.a;
}

RowReduction row_reduce(const ZdMatrix& m) {
    RowReduction out;
    out.rref = m;
    ZdMatrix& r = out.rref;
    const int d = r.d;
    int rank = 0;
    for (int col = 0; col < r.cols && rank < r.rows; ++col) {
        int prow = -1;
        for (int i = rank; i < r.rows; ++i) {
            if (r.at(i, col) != 0) {
                prow = i;
                break;
            }
        }
        if (prow < 0) continue;
        if (prow != rank) {
            for (int c = 0; c < r.cols; ++c) std::swap(r.at(prow, c), r.at(rank, c));
        }
        const int inv = mod_inverse(r.at(rank, col), d);
        for (int c = 0; c < r.cols; ++c) {
            r.at(rank, c) = mod_reduce(static_cast<long long>(r.at(rank, c)) * inv, d);
        }
        for (int i = 0; i < r.rows; ++i) {
            if (i == rank) continue;
            const int f = r.at(i, col);
            if (f == 0) continue;
            for (int c = 0; c < r.cols; ++c) {
                r.at(i, c) = mod_reduce(r.at(i, c) - static_cast<long long>(f) * r.at(rank, c), d);
            }
        }
        out.pivot_cols.push_back(col);
        ++rank;
    }
    out.rank = rank;
    return out;
}

std::optional<ZdVector> solve_linear(const ZdMatrix& m, const ZdVector& rhs) {
    if (rhs.size() != m.rows || rhs.d != m.d) {
        throw DimensionMismatchError("solve_linear: rhs length " + std::to_string(rhs.size()) +
                                     " does not match " + std::to_string(m.rows) + " rows");
    }
    ZdMatrix aug(m.d, m.rows, m.cols + 1);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols) = mod_reduce(rhs.e[i], m.d);
    }
    RowReduction red = row_reduce(aug);
    for (int p = 0; p < red.rank; ++p) {
        if (red.pivot_cols[p] == m.cols) return std::nullopt;
    }
    ZdVector x{m.d, std::vector<int>(static_cast<size_t>(m.cols), 0)};
    for (int p = 0; p < red.rank; ++p) {
        x.e[red.pivot_cols[p]] = red.rref.at(p, m.cols);
    }
    return x;
}

int symplectic_product(const SymplecticVector& p, const SymplecticVector& q) {
    if (p.d != q.d || p.n_qudits() != q.n_qudits()) {
        throw DimensionMismatchError("symplectic_product: operands of unequal shape");
    }
    long long acc = 0;
    for (int i = 0; i < p.n_qudits(); ++i) {
        acc += static_cast<long long>(p.a[i]) * q.b[i] - static_cast<long long>(p.b[i]) * q.a[i];
    }
    return mod_reduce(acc, p.d);
}

}  // namespace qmsd
