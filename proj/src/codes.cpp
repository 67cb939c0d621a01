#include "qmsd/codes.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "qmsd/rng.hpp"

namespace qmsd {

SymplecticVector code_row(const StabilizerCode& code, int row) {
    SymplecticVector v;
    v.d = code.d;
    v.a.resize(code.N);
    v.b.resize(code.N);
    for (int j = 0; j < code.N; ++j) {
        v.a[j] = code.m.at(row, j);
        v.b[j] = code.m.at(row, code.N + j);
    }
    return v;
}

CodeValidation validate(const StabilizerCode& code) {
    try {
        Prime check(code.d);
    } catch (const Error& e) {
        return {false, e.what()};
    }
    if (code.N < 2) return {false, "N must be at least 2"};
    if (code.m.rows != code.N - 1 || code.m.cols != 2 * code.N || code.m.d != code.d) {
        return {false, "generator matrix must be (N-1) x 2N over Z_d"};
    }
    if (code.syndrome.size() != code.N - 1 || code.syndrome.d != code.d) {
        return {false, "syndrome must have length N-1 over Z_d"};
    }
    for (int v : code.m.a) {
        if (v < 0 || v >= code.d) return {false, "matrix entry out of [0, d)"};
    }
    for (int v : code.syndrome.e) {
        if (v < 0 || v >= code.d) return {false, "syndrome entry out of [0, d)"};
    }
    for (int i = 0; i < code.N - 1; ++i) {
        for (int j = i + 1; j < code.N - 1; ++j) {
            if (symplectic_product(code_row(code, i), code_row(code, j)) != 0) {
                return {false, "rows " + std::to_string(i) + " and " + std::to_string(j) +
                                   " do not commute"};
            }
        }
    }
    const int rank = row_reduce(code.m).rank;
    if (rank != code.N - 1) {
        return {false, "rows are dependent: rank " + std::to_string(rank) + " < " +
                           std::to_string(code.N - 1)};
    }
    return {true, ""};
}

namespace {

// Mutable view used while reducing to canonical form.  Row operations carry
// the syndrome along; qudit exchange swaps a column in both halves.
struct Reducer {
    ZdMatrix w;
    ZdVector syn;
    std::vector<int> perm;
    int d, N, R;

    explicit Reducer(const StabilizerCode& code)
        : w(code.m), syn(code.syndrome), d(code.d), N(code.N), R(code.N - 1) {
        perm.resize(N);
        for (int j = 0; j < N; ++j) perm[j] = j;
    }

    int alpha(int i, int j) const { return w.at(i, j); }
    int beta(int i, int j) const { return w.at(i, N + j); }

    void swap_qudits(int j1, int j2) {
        if (j1 == j2) return;
        for (int i = 0; i < R; ++i) {
            std::swap(w.at(i, j1), w.at(i, j2));
            std::swap(w.at(i, N + j1), w.at(i, N + j2));
        }
        std::swap(perm[j1], perm[j2]);
    }

    void swap_rows(int i1, int i2) {
        if (i1 == i2) return;
        for (int c = 0; c < 2 * N; ++c) std::swap(w.at(i1, c), w.at(i2, c));
        std::swap(syn.e[i1], syn.e[i2]);
    }

    void scale_row(int i, int f) {
        for (int c = 0; c < 2 * N; ++c) w.at(i, c) = mod_reduce(static_cast<long long>(w.at(i, c)) * f, d);
        syn.e[i] = mod_reduce(static_cast<long long>(syn.e[i]) * f, d);
    }

    // row i += f * row j
    void add_row(int i, int j, int f) {
        for (int c = 0; c < 2 * N; ++c) {
            w.at(i, c) = mod_reduce(w.at(i, c) + static_cast<long long>(f) * w.at(j, c), d);
        }
        syn.e[i] = mod_reduce(syn.e[i] + static_cast<long long>(f) * syn.e[j], d);
    }
};

}  // namespace

CanonicalCode canonicalize(const StabilizerCode& code) {
    CodeValidation check = validate(code);
    if (!check.valid) throw InvalidCodeError("canonicalize: " + check.reason);

    Reducer red(code);
    const int N = red.N, R = red.R, d = red.d;

    // Pass 1: bring the Z block to (1_n A vecA; 0 0 0), swapping in the
    // nearest qudit column that provides a pivot.
    int n = 0;
    while (n < R) {
        int pj = -1, pi = -1;
        for (int j = n; j < N && pj < 0; ++j) {
            for (int i = n; i < R; ++i) {
                if (red.alpha(i, j) != 0) {
                    pj = j;
                    pi = i;
                    break;
                }
            }
        }
        if (pj < 0) break;
        red.swap_qudits(n, pj);
        red.swap_rows(n, pi);
        red.scale_row(n, mod_inverse(red.alpha(n, n), d));
        for (int i = 0; i < R; ++i) {
            if (i != n && red.alpha(i, n) != 0) red.add_row(i, n, d - red.alpha(i, n));
        }
        ++n;
    }
    const int m = R - n;

    // Pass 2: the bottom m rows now have zero Z block and their X block has
    // full rank on the non-pivot qudits, so an identity can be pivoted into
    // X-block columns n..n+m-1.  Swaps stay right of column n, which keeps
    // the 1_n block intact.
    for (int q = 0; q < m; ++q) {
        const int pos = n + q;
        int pj = -1, pi = -1;
        for (int j = pos; j < N && pj < 0; ++j) {
            for (int i = pos; i < R; ++i) {
                if (red.beta(i, j) != 0) {
                    pj = j;
                    pi = i;
                    break;
                }
            }
        }
        if (pj < 0) throw InvalidCodeError("canonicalize: X block rank defect in bottom rows");
        red.swap_qudits(pos, pj);
        red.swap_rows(pos, pi);
        red.scale_row(pos, mod_inverse(red.beta(pos, pos), d));
        for (int i = 0; i < R; ++i) {
            if (i != pos && red.beta(i, pos) != 0) red.add_row(i, pos, d - red.beta(i, pos));
        }
    }

    // The reduced matrix must now match the canonical pattern exactly.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (red.alpha(i, j) != (i == j ? 1 : 0)) throw Error("canonicalize: malformed 1_n block");
        }
        for (int j = n; j < n + m; ++j) {
            if (red.beta(i, j) != 0) throw Error("canonicalize: malformed 0_{n x m} block");
        }
    }
    for (int i = n; i < R; ++i) {
        for (int j = 0; j < N; ++j) {
            if (red.alpha(i, j) != 0) throw Error("canonicalize: nonzero Z block in bottom rows");
        }
        for (int j = n; j < n + m; ++j) {
            if (red.beta(i, j) != (i - n == j - n ? 1 : 0)) throw Error("canonicalize: malformed 1_m block");
        }
    }

    CanonicalCode canon;
    canon.d = d;
    canon.N = N;
    canon.n = n;
    canon.m = m;
    canon.A = ZdMatrix(d, n, m);
    canon.B = ZdMatrix(d, n, n);
    canon.C = ZdMatrix(d, m, n);
    canon.vec_a = ZdVector{d, std::vector<int>(static_cast<size_t>(n), 0)};
    canon.vec_b = ZdVector{d, std::vector<int>(static_cast<size_t>(n), 0)};
    canon.vec_c = ZdVector{d, std::vector<int>(static_cast<size_t>(m), 0)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) canon.A.at(i, j) = red.alpha(i, n + j);
        for (int j = 0; j < n; ++j) canon.B.at(i, j) = red.beta(i, j);
        canon.vec_a.e[i] = red.alpha(i, N - 1);
        canon.vec_b.e[i] = red.beta(i, N - 1);
    }
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) canon.C.at(i, j) = red.beta(n + i, j);
        canon.vec_c.e[i] = red.beta(n + i, N - 1);
    }
    canon.column_permutation = red.perm;
    canon.syndrome = red.syn;
    return canon;
}

ZdMatrix reassemble(const CanonicalCode& canon) {
    const int N = canon.N, n = canon.n, m = canon.m;
    ZdMatrix out(canon.d, N - 1, 2 * N);
    for (int i = 0; i < n; ++i) {
        out.at(i, i) = 1;
        for (int j = 0; j < m; ++j) out.at(i, n + j) = canon.A.at(i, j);
        out.at(i, N - 1) = canon.vec_a.e[i];
        for (int j = 0; j < n; ++j) out.at(i, N + j) = canon.B.at(i, j);
        out.at(i, 2 * N - 1) = canon.vec_b.e[i];
    }
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) out.at(n + i, N + j) = canon.C.at(i, j);
        out.at(n + i, N + n + i) = 1;
        out.at(n + i, 2 * N - 1) = canon.vec_c.e[i];
    }
    return out;
}

StabilizerCode to_physical_code(const CanonicalCode& canon) {
    const ZdMatrix c = reassemble(canon);
    StabilizerCode out;
    out.d = canon.d;
    out.N = canon.N;
    out.m = ZdMatrix(canon.d, canon.N - 1, 2 * canon.N);
    for (int i = 0; i < canon.N - 1; ++i) {
        for (int j = 0; j < canon.N; ++j) {
            out.m.at(i, canon.column_permutation[j]) = c.at(i, j);
            out.m.at(i, canon.N + canon.column_permutation[j]) = c.at(i, canon.N + j);
        }
    }
    out.syndrome = canon.syndrome;
    return out;
}

LogicalPair logical_operators(const CanonicalCode& canon) {
    const int N = canon.N, n = canon.n, m = canon.m, d = canon.d;
    std::vector<int> za(N, 0), zb(N, 0), xa(N, 0), xb(N, 0);
    // Canonical order: Z_L = (0, -vecC, 1 | vecB, 0, 0), X_L = (0, 0, 0 | -vecA, 0, 1).
    for (int i = 0; i < m; ++i) za[n + i] = mod_reduce(-canon.vec_c.e[i], d);
    za[N - 1] = 1;
    for (int i = 0; i < n; ++i) zb[i] = canon.vec_b.e[i];
    for (int i = 0; i < n; ++i) xb[i] = mod_reduce(-canon.vec_a.e[i], d);
    xb[N - 1] = 1;

    LogicalPair out;
    out.z_l.d = d;
    out.x_l.d = d;
    out.z_l.a.resize(N);
    out.z_l.b.resize(N);
    out.x_l.a.resize(N);
    out.x_l.b.resize(N);
    for (int j = 0; j < N; ++j) {
        const int p = canon.column_permutation[j];
        out.z_l.a[p] = za[j];
        out.z_l.b[p] = zb[j];
        out.x_l.a[p] = xa[j];
        out.x_l.b[p] = xb[j];
    }
    return out;
}

bool is_trivial(const CanonicalCode& canon) {
    return canon.vec_a.is_zero() && canon.vec_b.is_zero() && canon.vec_c.is_zero();
}

StabilizerCode random_code(Prime d, int n_qudits, uint64_t seed) {
    if (n_qudits < 2) throw Error("random_code: N must be at least 2");
    const int dd = d.value();
    const int N = n_qudits;
    std::mt19937_64 rng(derive_stream_seed(seed, 0));

    std::vector<SymplecticVector> kept;
    ZdMatrix rows(dd, 0, 2 * N);
    while (static_cast<int>(kept.size()) < N - 1) {
        SymplecticVector cand;
        cand.d = dd;
        cand.a.resize(N);
        cand.b.resize(N);
        for (int j = 0; j < N; ++j) cand.a[j] = static_cast<int>(uniform_below(rng, dd));
        for (int j = 0; j < N; ++j) cand.b[j] = static_cast<int>(uniform_below(rng, dd));

        bool ok = true;
        for (const SymplecticVector& r : kept) {
            if (symplectic_product(cand, r) != 0) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        ZdMatrix trial(dd, static_cast<int>(kept.size()) + 1, 2 * N);
        for (size_t i = 0; i < kept.size(); ++i) {
            for (int j = 0; j < N; ++j) {
                trial.at(static_cast<int>(i), j) = kept[i].a[j];
                trial.at(static_cast<int>(i), N + j) = kept[i].b[j];
            }
        }
        for (int j = 0; j < N; ++j) {
            trial.at(static_cast<int>(kept.size()), j) = cand.a[j];
            trial.at(static_cast<int>(kept.size()), N + j) = cand.b[j];
        }
        if (row_reduce(trial).rank != static_cast<int>(kept.size()) + 1) continue;
        kept.push_back(cand);
    }

    StabilizerCode code;
    code.d = dd;
    code.N = N;
    code.m = ZdMatrix(dd, N - 1, 2 * N);
    for (int i = 0; i < N - 1; ++i) {
        for (int j = 0; j < N; ++j) {
            code.m.at(i, j) = kept[i].a[j];
            code.m.at(i, N + j) = kept[i].b[j];
        }
    }
    code.syndrome = ZdVector{dd, std::vector<int>(static_cast<size_t>(N - 1), 0)};
    return code;
}

StabilizerCode code_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("code JSON: ") + e.what());
    }
    try {
        StabilizerCode code;
        code.d = j.at("d").get<int>();
        code.N = j.at("N").get<int>();
        if (code.N < 2) throw ParseError("code JSON: N must be at least 2");
        const auto& rows = j.at("rows");
        if (!rows.is_array() || static_cast<int>(rows.size()) != code.N - 1) {
            throw ParseError("code JSON: rows must be an array of N-1 rows");
        }
        code.m = ZdMatrix(code.d, code.N - 1, 2 * code.N);
        for (int i = 0; i < code.N - 1; ++i) {
            const auto& row = rows.at(i);
            if (!row.is_array() || static_cast<int>(row.size()) != 2 * code.N) {
                throw ParseError("code JSON: each row must have 2N entries");
            }
            for (int c = 0; c < 2 * code.N; ++c) {
                const int v = row.at(c).get<int>();
                if (v < 0 || v >= code.d) throw ParseError("code JSON: row entry out of [0, d)");
                code.m.at(i, c) = v;
            }
        }
        const auto& syn = j.at("syndrome");
        if (!syn.is_array() || static_cast<int>(syn.size()) != code.N - 1) {
            throw ParseError("code JSON: syndrome must have N-1 entries");
        }
        code.syndrome = ZdVector{code.d, std::vector<int>(static_cast<size_t>(code.N - 1), 0)};
        for (int i = 0; i < code.N - 1; ++i) {
            const int v = syn.at(i).get<int>();
            if (v < 0 || v >= code.d) throw ParseError("code JSON: syndrome entry out of [0, d)");
            code.syndrome.e[i] = v;
        }
        CodeValidation check = validate(code);
        if (!check.valid) throw ParseError("code JSON: " + check.reason);
        return code;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("code JSON: ") + e.what());
    }
}

std::string code_to_json(const StabilizerCode& code) {
    nlohmann::json j;
    j["d"] = code.d;
    j["N"] = code.N;
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < code.N - 1; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < 2 * code.N; ++c) row.push_back(code.m.at(i, c));
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["syndrome"] = code.syndrome.e;
    return j.dump();
}

StabilizerCode load_code_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open code file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return code_from_json(ss.str());
}

}  // namespace qmsd
