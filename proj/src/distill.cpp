#include "qmsd/distill.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "parallel.hpp"
#include "qmsd/errors.hpp"
#include "qmsd/rng.hpp"

namespace qmsd {

namespace {

long long ipow(int base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

void check_point_shape(const StabilizerCode& code, const std::vector<int>& z, const std::vector<int>& x) {
    if (static_cast<int>(z.size()) != code.N || static_cast<int>(x.size()) != code.N) {
        throw DimensionMismatchError("phase-space point length does not match code qudit count");
    }
}

void check_input(const CodespaceBasis& basis, const WignerFunction& w_in) {
    if (w_in.d != basis.d) throw DimensionMismatchError("input Wigner modulus differs from code");
    if (w_in.n_qudits != 1) throw ShapeError("input Wigner function must be single-qudit");
    double sum = 0;
    for (double v : w_in.values) sum += v;
    if (std::abs(sum - 1.0) > 1e-9) throw ShapeError("input Wigner values must sum to 1");
}

// Adds column `col` of the generator into pt, entrywise mod d.
inline void add_column(std::vector<int>& pt, const std::vector<int>& col, int d) {
    for (size_t r = 0; r < pt.size(); ++r) {
        int v = pt[r] + col[r];
        if (v >= d) v -= d;
        pt[r] = v;
    }
}

std::vector<std::vector<int>> generator_columns(const CodespaceBasis& basis) {
    std::vector<std::vector<int>> cols(static_cast<size_t>(basis.N + 1),
                                       std::vector<int>(static_cast<size_t>(2 * basis.N), 0));
    for (int c = 0; c <= basis.N; ++c) {
        for (int r = 0; r < 2 * basis.N; ++r) cols[c][r] = basis.generator.at(r, c);
    }
    return cols;
}

}  // namespace

bool membership_test(const StabilizerCode& code, const std::vector<int>& z, const std::vector<int>& x) {
    check_point_shape(code, z, x);
    for (int i = 0; i < code.N - 1; ++i) {
        long long acc = 0;
        for (int j = 0; j < code.N; ++j) {
            acc += static_cast<long long>(code.m.at(i, j)) * x[j] -
                   static_cast<long long>(code.m.at(i, code.N + j)) * z[j];
        }
        if (mod_reduce(acc, code.d) != code.syndrome.e[i]) return false;
    }
    return true;
}

std::pair<int, int> logical_coordinates(const LogicalPair& logical,
                                        const std::vector<int>& z, const std::vector<int>& x) {
    const int d = logical.z_l.d;
    const int N = logical.z_l.n_qudits();
    if (static_cast<int>(z.size()) != N || static_cast<int>(x.size()) != N) {
        throw DimensionMismatchError("logical_coordinates: point length mismatch");
    }
    long long xl = 0, zl = 0;
    for (int j = 0; j < N; ++j) {
        xl += static_cast<long long>(logical.z_l.a[j]) * x[j] - static_cast<long long>(logical.z_l.b[j]) * z[j];
        zl += static_cast<long long>(logical.x_l.b[j]) * z[j] - static_cast<long long>(logical.x_l.a[j]) * x[j];
    }
    return {mod_reduce(zl, d), mod_reduce(xl, d)};
}

CodespaceBasis make_codespace_basis(const StabilizerCode& code) {
    CodeValidation check = validate(code);
    if (!check.valid) throw InvalidCodeError("make_codespace_basis: " + check.reason);

    CodespaceBasis basis;
    basis.d = code.d;
    basis.N = code.N;
    basis.code = code;
    const CanonicalCode canon = canonicalize(code);
    basis.logical = logical_operators(canon);

    basis.generator = ZdMatrix(code.d, 2 * code.N, code.N + 1);
    for (int i = 0; i < code.N - 1; ++i) {
        for (int j = 0; j < code.N; ++j) {
            basis.generator.at(j, i) = code.m.at(i, j);                    // z part = a
            basis.generator.at(code.N + j, i) = code.m.at(i, code.N + j);  // x part = b
        }
    }
    for (int j = 0; j < code.N; ++j) {
        basis.generator.at(j, code.N - 1) = basis.logical.z_l.a[j];
        basis.generator.at(code.N + j, code.N - 1) = basis.logical.z_l.b[j];
        basis.generator.at(j, code.N) = basis.logical.x_l.a[j];
        basis.generator.at(code.N + j, code.N) = basis.logical.x_l.b[j];
    }

    basis.particular = ZdVector{code.d, std::vector<int>(static_cast<size_t>(2 * code.N), 0)};
    if (!code.syndrome.is_zero()) {
        // Solve alpha.x - beta.z = s for unknowns (x; z), then shift the
        // solution so its logical coordinates vanish.
        ZdMatrix g(code.d, code.N - 1, 2 * code.N);
        for (int i = 0; i < code.N - 1; ++i) {
            for (int j = 0; j < code.N; ++j) {
                g.at(i, j) = code.m.at(i, j);
                g.at(i, code.N + j) = mod_reduce(-code.m.at(i, code.N + j), code.d);
            }
        }
        auto sol = solve_linear(g, code.syndrome);
        if (!sol) throw EmptyCodespaceError("syndrome equation has no solution");
        std::vector<int> z(static_cast<size_t>(code.N)), x(static_cast<size_t>(code.N));
        for (int j = 0; j < code.N; ++j) {
            x[j] = sol->e[j];
            z[j] = sol->e[code.N + j];
        }
        auto [zl, xl] = logical_coordinates(basis.logical, z, x);
        for (int j = 0; j < code.N; ++j) {
            basis.particular.e[j] = mod_reduce(z[j] - static_cast<long long>(zl) * basis.logical.z_l.a[j] -
                                                   static_cast<long long>(xl) * basis.logical.x_l.a[j],
                                               code.d);
            basis.particular.e[code.N + j] =
                mod_reduce(x[j] - static_cast<long long>(zl) * basis.logical.z_l.b[j] -
                               static_cast<long long>(xl) * basis.logical.x_l.b[j],
                           code.d);
        }
        std::vector<int> pz(basis.particular.e.begin(), basis.particular.e.begin() + code.N);
        std::vector<int> px(basis.particular.e.begin() + code.N, basis.particular.e.end());
        auto readout = logical_coordinates(basis.logical, pz, px);
        if (!membership_test(code, pz, px) || readout.first != 0 || readout.second != 0) {
            throw Error("make_codespace_basis: particular solution adjustment failed");
        }
    }
    return basis;
}

void enumerate_codespace(const CodespaceBasis& basis, int z_l, int x_l,
                         const std::function<void(const std::vector<int>&, const std::vector<int>&)>& fn) {
    const int d = basis.d, N = basis.N;
    const auto cols = generator_columns(basis);
    const long long count = ipow(d, N - 1);

    std::vector<int> pt(static_cast<size_t>(2 * N), 0);
    for (int r = 0; r < 2 * N; ++r) {
        pt[r] = mod_reduce(basis.particular.e[r] + static_cast<long long>(z_l) * cols[N - 1][r] +
                               static_cast<long long>(x_l) * cols[N][r],
                           d);
    }
    std::vector<int> dig(static_cast<size_t>(N - 1), 0);
    std::vector<int> z(static_cast<size_t>(N)), x(static_cast<size_t>(N));
    for (long long s = 0; s < count; ++s) {
        for (int j = 0; j < N; ++j) {
            z[j] = pt[j];
            x[j] = pt[N + j];
        }
        fn(z, x);
        for (int j = 0; j < N - 1; ++j) {
            add_column(pt, cols[j], d);
            if (++dig[j] < d) break;
            dig[j] = 0;
        }
    }
}

DistillationResult distill_exact(const CodespaceBasis& basis, const WignerFunction& w_in, int threads) {
    check_input(basis, w_in);
    const int d = basis.d, N = basis.N;
    const int cells = d * d;
    const auto cols = generator_columns(basis);
    const double* w = w_in.values.data();

    // Blocks own the trailing u digits; the inner odometer walks the rest.
    const int n_u = N - 1;
    const int block_digits = std::min(n_u, 4);
    const int inner_digits = n_u - block_digits;
    const long long n_blocks = ipow(d, block_digits);
    const long long inner = ipow(d, inner_digits);

    std::vector<std::vector<double>> partials(static_cast<size_t>(n_blocks),
                                              std::vector<double>(static_cast<size_t>(cells), 0.0));

    detail::parallel_blocks(n_blocks, detail::resolve_threads(threads), [&](long long b) {
        std::vector<int> base(static_cast<size_t>(2 * N), 0);
        for (int r = 0; r < 2 * N; ++r) base[r] = basis.particular.e[r];
        long long rem = b;
        for (int j = inner_digits; j < n_u; ++j) {
            const int digit = static_cast<int>(rem % d);
            rem /= d;
            for (int r = 0; r < 2 * N; ++r) {
                base[r] = mod_reduce(base[r] + static_cast<long long>(digit) * cols[j][r], d);
            }
        }
        std::vector<int> pt(static_cast<size_t>(2 * N), 0);
        std::vector<int> dig(static_cast<size_t>(inner_digits > 0 ? inner_digits : 1), 0);
        for (int zl = 0; zl < d; ++zl) {
            for (int xl = 0; xl < d; ++xl) {
                for (int r = 0; r < 2 * N; ++r) {
                    pt[r] = mod_reduce(base[r] + static_cast<long long>(zl) * cols[N - 1][r] +
                                           static_cast<long long>(xl) * cols[N][r],
                                       d);
                }
                std::fill(dig.begin(), dig.end(), 0);
                double acc = 0;
                for (long long s = 0; s < inner; ++s) {
                    double prod = w[pt[0] * d + pt[N]];
                    for (int i = 1; i < N; ++i) prod *= w[pt[i] * d + pt[N + i]];
                    acc += prod;
                    for (int j = 0; j < inner_digits; ++j) {
                        add_column(pt, cols[j], d);
                        if (++dig[j] < d) break;
                        dig[j] = 0;
                    }
                }
                partials[b][zl * d + xl] = acc;
            }
        }
    });

    std::vector<double> h(static_cast<size_t>(cells), 0.0);
    for (long long b = 0; b < n_blocks; ++b) {
        for (int c = 0; c < cells; ++c) h[c] += partials[b][c];
    }
    double total = 0;
    for (int c = 0; c < cells; ++c) total += h[c];
    if (total <= 1e-12) throw ZeroAcceptanceError("distillation accepts with probability 0");

    DistillationResult out;
    out.w_out.d = d;
    out.w_out.n_qudits = 1;
    out.w_out.values.resize(static_cast<size_t>(cells));
    for (int c = 0; c < cells; ++c) out.w_out.values[c] = h[c] / total;
    out.acceptance_probability = total;
    out.histogram = std::move(h);
    return out;
}

DistillationResult distill_exact(const StabilizerCode& code, const WignerFunction& w_in, int threads) {
    return distill_exact(make_codespace_basis(code), w_in, threads);
}

McDistillationResult distill_mc(const StabilizerCode& code, const WignerFunction& w_in,
                                uint64_t samples, uint64_t seed, int threads) {
    const CodespaceBasis basis = make_codespace_basis(code);
    check_input(basis, w_in);
    if (samples == 0) throw ShapeError("distill_mc: need at least one sample");
    for (double v : w_in.values) {
        if (v < -1e-12) throw NegativeInputError("distill_mc: input has negative Wigner values");
    }
    const int d = basis.d, N = basis.N;
    const int cells = d * d;

    // Cumulative table for inverse-CDF draws; tiny negative noise clamps to 0.
    std::vector<double> cdf(static_cast<size_t>(cells), 0.0);
    double run = 0;
    for (int i = 0; i < cells; ++i) {
        run += std::max(w_in.values[i], 0.0);
        cdf[i] = run;
    }
    for (int i = 0; i < cells; ++i) cdf[i] /= run;
    cdf[cells - 1] = 1.0;

    constexpr int kStreams = 64;
    const uint64_t per = samples / kStreams;
    const uint64_t extra = samples % kStreams;

    std::vector<std::vector<uint64_t>> partial(kStreams, std::vector<uint64_t>(static_cast<size_t>(cells), 0));

    detail::parallel_blocks(kStreams, detail::resolve_threads(threads), [&](long long stream) {
        const uint64_t mine = per + (static_cast<uint64_t>(stream) < extra ? 1 : 0);
        if (mine == 0) return;
        std::mt19937_64 rng(derive_stream_seed(seed, static_cast<uint64_t>(stream)));
        std::vector<int> z(static_cast<size_t>(N)), x(static_cast<size_t>(N));
        auto& hist = partial[static_cast<size_t>(stream)];
        for (uint64_t s = 0; s < mine; ++s) {
            for (int i = 0; i < N; ++i) {
                const double u = uniform_double(rng);
                const int idx = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                z[i] = idx / d;
                x[i] = idx % d;
            }
            bool inside = true;
            for (int i = 0; i < N - 1 && inside; ++i) {
                long long acc = 0;
                for (int j = 0; j < N; ++j) {
                    acc += static_cast<long long>(basis.code.m.at(i, j)) * x[j] -
                           static_cast<long long>(basis.code.m.at(i, N + j)) * z[j];
                }
                inside = mod_reduce(acc, d) == basis.code.syndrome.e[i];
            }
            if (!inside) continue;
            auto [zl, xl] = logical_coordinates(basis.logical, z, x);
            ++hist[static_cast<size_t>(zl) * d + xl];
        }
    });

    std::vector<uint64_t> hist(static_cast<size_t>(cells), 0);
    for (int s = 0; s < kStreams; ++s) {
        for (int c = 0; c < cells; ++c) hist[c] += partial[s][c];
    }
    uint64_t accepted = 0;
    for (uint64_t h : hist) accepted += h;
    if (accepted == 0) throw ZeroAcceptanceError("no samples passed the membership test");

    McDistillationResult out;
    out.accepted = accepted;
    out.samples = samples;
    out.seed = seed;
    out.result.w_out.d = d;
    out.result.w_out.n_qudits = 1;
    out.result.w_out.values.resize(static_cast<size_t>(cells));
    out.result.histogram.resize(static_cast<size_t>(cells));
    for (int c = 0; c < cells; ++c) {
        out.result.histogram[c] = static_cast<double>(hist[c]);
        out.result.w_out.values[c] = static_cast<double>(hist[c]) / static_cast<double>(accepted);
    }
    out.result.acceptance_probability = static_cast<double>(accepted) / static_cast<double>(samples);
    return out;
}

std::vector<SweepRow> nu_sweep(const StabilizerCode& code, int u, int v,
                               const std::vector<double>& grid, int threads) {
    const CodespaceBasis basis = make_codespace_basis(code);
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    const Prime d(code.d);
    for (double nu : grid) {
        const WignerFunction w = nu_family_wigner(d, nu, u, v);
        const DistillationResult r = distill_exact(basis, w, threads);
        rows.push_back({nu, r.w_out.values[static_cast<size_t>(mod_reduce(u, code.d)) * code.d +
                                           mod_reduce(v, code.d)],
                        r.acceptance_probability});
    }
    return rows;
}

double verify_bound_gap(const StabilizerCode& code, int u, int v, int threads) {
    const std::vector<SweepRow> row = nu_sweep(code, u, v, {0.0}, threads);
    return row[0].nu_out;
}

}  // namespace qmsd
