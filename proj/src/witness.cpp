#include "qmsd/witness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

#include "parallel.hpp"
#include "qmsd/errors.hpp"

namespace qmsd {

namespace {

using Complex = std::complex<double>;

Complex omega_power(int d, long long k) {
    const double angle = 2.0 * M_PI * mod_reduce(k, d) / d;
    return {std::cos(angle), std::sin(angle)};
}

// Exponent s minimizing |value - omega^s|; residual must be tiny for any
// stabilizer eigenvalue.
int nearest_root_exponent(Complex value, int d, double tol) {
    int best = 0;
    double best_dist = std::abs(value - omega_power(d, 0));
    for (int s = 1; s < d; ++s) {
        const double dist = std::abs(value - omega_power(d, s));
        if (dist < best_dist) {
            best_dist = dist;
            best = s;
        }
    }
    if (best_dist > tol) throw Error("eigenvalue is not a d-th root of unity");
    return best;
}

// Rotates the ket so its largest-magnitude entry is real positive, fixing the
// arbitrary eigensolver phase deterministically.
void normalize_phase(Eigen::VectorXcd& ket) {
    int arg_max = 0;
    double mag = 0;
    for (int i = 0; i < ket.size(); ++i) {
        if (std::abs(ket(i)) > mag + 1e-12) {
            mag = std::abs(ket(i));
            arg_max = static_cast<int>(i);
        }
    }
    ket *= std::abs(ket(arg_max)) / ket(arg_max);
    ket.normalize();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& lhs, const Eigen::MatrixXcd& rhs) {
    Eigen::MatrixXcd out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
    for (int r = 0; r < lhs.rows(); ++r) {
        for (int c = 0; c < lhs.cols(); ++c) {
            out.block(r * rhs.rows(), c * rhs.cols(), rhs.rows(), rhs.cols()) = lhs(r, c) * rhs;
        }
    }
    return out;
}

// Decomposes m = phase * Z^a X^b, scanning all d^2 labels.  Throws when m is
// not proportional to a Pauli operator (i.e. the conjugating map was not
// Clifford).
struct PauliImage {
    int a = 0, b = 0;
    Complex phase;
};

PauliImage pauli_image(const Eigen::MatrixXcd& m, int d) {
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const Eigen::MatrixXcd p = pauli_matrix(d, a, b);
            // P has exactly one nonzero entry per column; read the candidate
            // phase off column 0.
            const int row = b % d;
            const Complex phase = m(row, 0) / p(row, 0);
            if (std::abs(std::abs(phase) - 1.0) > 1e-8) continue;
            if ((m - phase * p).cwiseAbs().maxCoeff() < 1e-8) return {a, b, phase};
        }
    }
    throw Error("matrix is not proportional to any Pauli operator");
}

// Metaplectic matrix for F = [[alpha, beta], [gamma, delta]] in SL(2, Z_d).
Eigen::MatrixXcd weil_matrix(int d, int alpha, int beta, int gamma, int delta) {
    const int inv2 = mod_inverse(2, d);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(d, d);
    if (beta != 0) {
        const int beta_inv = mod_inverse(beta, d);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d));
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) {
                const long long quad = static_cast<long long>(delta) * j * j - 2LL * j * k +
                                       static_cast<long long>(alpha) * k * k;
                v(j, k) = scale * omega_power(d, static_cast<long long>(inv2) * beta_inv % d * quad);
            }
        }
    } else {
        for (int k = 0; k < d; ++k) {
            const long long quad = static_cast<long long>(alpha) * gamma % d * k * k;
            v(mod_reduce(static_cast<long long>(alpha) * k, d), k) =
                omega_power(d, static_cast<long long>(inv2) * quad);
        }
    }
    return v;
}

std::vector<std::array<int, 4>> enumerate_sl2(int d) {
    std::vector<std::array<int, 4>> out;
    for (int alpha = 0; alpha < d; ++alpha) {
        for (int beta = 0; beta < d; ++beta) {
            for (int gamma = 0; gamma < d; ++gamma) {
                for (int delta = 0; delta < d; ++delta) {
                    if (mod_reduce(static_cast<long long>(alpha) * delta -
                                       static_cast<long long>(beta) * gamma,
                                   d) == 1) {
                        out.push_back({alpha, beta, gamma, delta});
                    }
                }
            }
        }
    }
    return out;
}

VertexGenerator scanned_generator(const Eigen::VectorXcd& ket, const Eigen::MatrixXcd& image,
                                  int d, int ancilla_a, int ancilla_b) {
    const PauliImage im = pauli_image(image, d);
    VertexGenerator g;
    g.op.d = d;
    g.op.a = {im.a, mod_reduce(ancilla_a, d)};
    g.op.b = {im.b, mod_reduce(ancilla_b, d)};
    const Eigen::MatrixXcd mat = pauli_matrix(g.op);
    const Complex expectation = ket.dot(mat * ket);
    g.syndrome = nearest_root_exponent(expectation, d, 1e-6);
    return g;
}

std::vector<ProjectorVertex> all_vertices(const Prime& d, int u, int v) {
    std::vector<ProjectorVertex> vertices = separable_projectors(d, u, v);
    std::vector<ProjectorVertex> ent = entangled_projectors(d);
    vertices.insert(vertices.end(), std::make_move_iterator(ent.begin()),
                    std::make_move_iterator(ent.end()));
    return vertices;
}

const Eigen::MatrixXcd& sigma_operator(const Prime& d, int u, int v) {
    static std::map<long long, std::unique_ptr<const Eigen::MatrixXcd>> cache;
    static std::shared_mutex mutex;
    const long long key = (static_cast<long long>(d.value()) << 16) |
                          (static_cast<long long>(mod_reduce(u, d.value())) << 8) |
                          mod_reduce(v, d.value());
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    const int dim = d.value() * d.value();
    auto sigma = std::make_unique<Eigen::MatrixXcd>(Eigen::MatrixXcd::Zero(dim, dim));
    for (const ProjectorVertex& vertex : all_vertices(d, u, v)) {
        sigma->noalias() += vertex.ket * vertex.ket.adjoint();
    }
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.try_emplace(key, std::move(sigma));
    return *it->second;
}

void check_density(const Eigen::MatrixXcd& m, int d, const char* what) {
    if (m.rows() != d || m.cols() != d) throw ShapeError(std::string(what) + ": wrong matrix shape");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-8) {
        throw ShapeError(std::string(what) + ": matrix is not Hermitian");
    }
    if (std::abs(m.trace() - Complex(1.0, 0.0)) > 1e-6) {
        throw ShapeError(std::string(what) + ": matrix trace differs from 1");
    }
}

}  // namespace

std::vector<StabilizerStateInfo> enumerate_single_qudit_stabilizer_states(const Prime& d) {
    const int p = d.value();
    std::vector<std::pair<int, int>> directions;
    directions.push_back({1, 0});
    for (int c = 0; c < p; ++c) directions.push_back({c, 1});

    std::vector<StabilizerStateInfo> states;
    states.reserve(static_cast<size_t>(p) * (p + 1));
    for (auto [a, b] : directions) {
        const Eigen::MatrixXcd op = pauli_matrix(p, a, b);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op);
        if (solver.info() != Eigen::Success) throw Error("eigensolver failed on a Pauli operator");
        std::vector<StabilizerStateInfo> basis(static_cast<size_t>(p));
        std::vector<bool> seen(static_cast<size_t>(p), false);
        for (int i = 0; i < p; ++i) {
            const int s = nearest_root_exponent(solver.eigenvalues()(i), p, 1e-8);
            if (seen[s]) throw Error("degenerate Pauli eigenvalue");
            seen[s] = true;
            StabilizerStateInfo info;
            info.ket = solver.eigenvectors().col(i);
            normalize_phase(info.ket);
            info.a = a;
            info.b = b;
            info.eigen_exponent = s;
            basis[static_cast<size_t>(s)] = std::move(info);
        }
        for (auto& info : basis) states.push_back(std::move(info));
    }
    return states;
}

std::vector<ProjectorVertex> separable_projectors(const Prime& d, int u, int v) {
    const int p = d.value();
    const int uu = mod_reduce(u, p), vv = mod_reduce(v, p);
    std::vector<ProjectorVertex> out;
    out.reserve(static_cast<size_t>(p) * (p * p - 1));
    for (const StabilizerStateInfo& state : enumerate_single_qudit_stabilizer_states(d)) {
        const WignerFunction w = wigner_from_density(state.ket * state.ket.adjoint(), p, 1);
        if (std::abs(w.at(uu, vv)) > 1e-8) continue;  // line through the face: excluded
        for (int k = 0; k < p; ++k) {
            ProjectorVertex vertex;
            vertex.kind = ProjectorVertex::Kind::Separable;
            vertex.ket = Eigen::VectorXcd::Zero(p * p);
            for (int i = 0; i < p; ++i) vertex.ket(i * p + k) = state.ket(i);
            vertex.generators[0].op.d = p;
            vertex.generators[0].op.a = {state.a, 0};
            vertex.generators[0].op.b = {state.b, 0};
            vertex.generators[0].syndrome = state.eigen_exponent;
            vertex.generators[1].op.d = p;
            vertex.generators[1].op.a = {0, 1};
            vertex.generators[1].op.b = {0, 0};
            vertex.generators[1].syndrome = k;
            char buf[64];
            std::snprintf(buf, sizeof buf, "sep P(%d,%d) s=%d ket=%d", state.a, state.b,
                          state.eigen_exponent, k);
            vertex.label = buf;
            out.push_back(std::move(vertex));
        }
    }
    if (static_cast<int>(out.size()) != p * (p * p - 1)) {
        throw Error("separable projector count is off");
    }
    return out;
}

std::vector<ProjectorVertex> entangled_projectors(const Prime& d) {
    const int p = d.value();
    const double scale = 1.0 / std::sqrt(static_cast<double>(p));
    const Eigen::MatrixXcd z_mat = pauli_matrix(p, 1, 0);
    const Eigen::MatrixXcd x_mat = pauli_matrix(p, 0, 1);

    std::vector<ProjectorVertex> out;
    out.reserve(static_cast<size_t>(p) * p * p * (p * p - 1));
    for (const auto& f : enumerate_sl2(p)) {
        const Eigen::MatrixXcd v_f = weil_matrix(p, f[0], f[1], f[2], f[3]);
        for (int tp = 0; tp < p; ++tp) {
            for (int tq = 0; tq < p; ++tq) {
                const Eigen::MatrixXcd u_mat = pauli_matrix(p, tp, tq) * v_f;
                ProjectorVertex vertex;
                vertex.kind = ProjectorVertex::Kind::Entangled;
                vertex.ket = Eigen::VectorXcd::Zero(p * p);
                for (int i = 0; i < p; ++i) {
                    for (int k = 0; k < p; ++k) vertex.ket(i * p + k) = scale * u_mat(i, k);
                }
                const Eigen::MatrixXcd u_dag = u_mat.adjoint();
                vertex.generators[0] =
                    scanned_generator(vertex.ket, u_mat * z_mat * u_dag, p, p - 1, 0);
                vertex.generators[1] = scanned_generator(vertex.ket, u_mat * x_mat * u_dag, p, 0, 1);
                char buf[96];
                std::snprintf(buf, sizeof buf, "ent F=[[%d,%d],[%d,%d]] t=(%d,%d)", f[0], f[1],
                              f[2], f[3], tp, tq);
                vertex.label = buf;
                out.push_back(std::move(vertex));
            }
        }
    }
    if (static_cast<int>(out.size()) != p * p * p * (p * p - 1)) {
        throw Error("entangled projector count is off");
    }
    return out;
}

ExclusivityGraph build_graph(const Prime& d, int u, int v, int threads) {
    ExclusivityGraph g;
    g.d = d.value();
    g.u = mod_reduce(u, g.d);
    g.v = mod_reduce(v, g.d);
    g.vertices = all_vertices(d, g.u, g.v);

    const int n = static_cast<int>(g.vertices.size());
    std::vector<std::vector<int>> row_edges(static_cast<size_t>(n));
    detail::parallel_blocks(n, detail::resolve_threads(threads), [&](long long i) {
        const Eigen::VectorXcd& ki = g.vertices[static_cast<size_t>(i)].ket;
        auto& edges = row_edges[static_cast<size_t>(i)];
        for (int j = static_cast<int>(i) + 1; j < n; ++j) {
            const Complex overlap = ki.dot(g.vertices[static_cast<size_t>(j)].ket);
            if (std::norm(overlap) < 1e-10) edges.push_back(j);
        }
    });
    for (int i = 0; i < n; ++i) {
        for (int j : row_edges[static_cast<size_t>(i)]) g.edges.push_back({i, j});
    }
    return g;
}

double sigma_identity_check(const Prime& d, int u, int v) {
    const int p = d.value();
    const int uu = mod_reduce(u, p), vv = mod_reduce(v, p);
    const Eigen::MatrixXcd& sigma = sigma_operator(d, uu, vv);
    // The phase-point operator enters trace-normalized (A/d, trace 1): the
    // projector sum has trace d(d^2-1) + d^3(d^2-1) = (d^3*d - 1)*d, which
    // forces that normalization.
    const Eigen::MatrixXcd target =
        kron(static_cast<double>(p) * p * p * Eigen::MatrixXcd::Identity(p, p) -
                 phase_point_operator(p, uu, vv) / static_cast<double>(p),
             Eigen::MatrixXcd::Identity(p, p));
    return (sigma - target).cwiseAbs().maxCoeff();
}

WitnessReport witness_value(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma,
                            const Prime& d, int u, int v) {
    const int p = d.value();
    check_density(rho, p, "witness rho");
    check_density(sigma, p, "witness sigma");
    WitnessReport report;
    report.u = mod_reduce(u, p);
    report.v = mod_reduce(v, p);
    report.bound = static_cast<double>(p) * p * p;

    const Eigen::MatrixXcd& op = sigma_operator(d, report.u, report.v);
    const Eigen::MatrixXcd state = kron(rho, sigma);
    report.value = op.cwiseProduct(state.transpose()).sum().real();

    const WignerFunction w = wigner_from_density(rho, p, 1);
    report.closed_form = report.bound - static_cast<double>(p) * w.at(report.u, report.v);
    report.contextual = report.value > report.bound + 1e-9;
    return report;
}

std::vector<int> ontological_independent_set(const ExclusivityGraph& g, int z, int x, int z2, int x2) {
    const int d = g.d;
    const int zz = mod_reduce(z, d), xx = mod_reduce(x, d);
    const int zz2 = mod_reduce(z2, d), xx2 = mod_reduce(x2, d);

    // A vertex is assigned 1 exactly when the ontic point lies in the support
    // of its state's Wigner function: <psi| A_sys (x) A_anc |psi> is d^2 on
    // the support and 0 off it.  Orthogonal stabilizer states have disjoint
    // supports, so the fired set is independent by construction.
    const Eigen::MatrixXcd point_op =
        kron(phase_point_operator(d, zz, xx), phase_point_operator(d, zz2, xx2));

    std::vector<int> fired;
    std::vector<char> in_set(g.vertices.size(), 0);
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i) {
        const Eigen::VectorXcd& ket = g.vertices[static_cast<size_t>(i)].ket;
        const double value = ket.dot(point_op * ket).real() / (d * d);
        if (value < 0.5) continue;
        if (value < 1.0 - 1e-6 || value > 1.0 + 1e-6) {
            throw Error("ontological assignment is not deterministic at this point");
        }
        fired.push_back(i);
        in_set[static_cast<size_t>(i)] = 1;
    }
    if (static_cast<int>(fired.size()) > d * d * d) {
        throw Error("ontological assignment fired more than d^3 vertices");
    }
    for (const auto& [i, j] : g.edges) {
        if (in_set[static_cast<size_t>(i)] && in_set[static_cast<size_t>(j)]) {
            throw Error("ontological assignment fired two orthogonal projectors");
        }
    }
    return fired;
}

namespace {

// Exact maximum clique on the complement graph, Tomita-style: greedy
// sequential coloring gives the pruning bound, candidates are visited in
// reverse color order.
class ComplementCliqueSolver {
  public:
    ComplementCliqueSolver(const ExclusivityGraph& g, double budget_seconds)
        : n_(static_cast<int>(g.vertices.size())), words_((n_ + 63) / 64) {
        adj_.assign(static_cast<size_t>(n_) * words_, ~0ULL);
        for (int i = 0; i < n_; ++i) {
            clear_bit(&adj_[static_cast<size_t>(i) * words_], i);
            for (int w = n_; w < words_ * 64; ++w) {
                clear_bit(&adj_[static_cast<size_t>(i) * words_], w);
            }
        }
        for (const auto& [i, j] : g.edges) {
            clear_bit(&adj_[static_cast<size_t>(i) * words_], j);
            clear_bit(&adj_[static_cast<size_t>(j) * words_], i);
        }
        deadline_ = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(budget_seconds));
    }

    MisResult solve() {
        if (n_ == 0) return {0, {}, false};
        std::vector<uint64_t> all(static_cast<size_t>(words_), 0);
        for (int i = 0; i < n_; ++i) set_bit(all.data(), i);
        seed_greedy(all);
        expand(all);
        std::sort(best_.begin(), best_.end());
        return {static_cast<int>(best_.size()), best_, timed_out_};
    }

  private:
    static void set_bit(uint64_t* row, int i) { row[i >> 6] |= 1ULL << (i & 63); }
    static void clear_bit(uint64_t* row, int i) { row[i >> 6] &= ~(1ULL << (i & 63)); }

    const uint64_t* row(int i) const { return &adj_[static_cast<size_t>(i) * words_]; }

    // Greedy max-degree clique as the initial incumbent; a strong lower
    // bound fires the coloring prune far earlier.
    void seed_greedy(const std::vector<uint64_t>& all) {
        std::vector<uint64_t> pool = all;
        std::vector<int> clique;
        while (true) {
            int pick = -1, pick_degree = -1;
            for (int i = 0; i < n_; ++i) {
                if (!(pool[static_cast<size_t>(i >> 6)] >> (i & 63) & 1ULL)) continue;
                int degree = 0;
                const uint64_t* ri = row(i);
                for (int w = 0; w < words_; ++w) {
                    degree += std::popcount(pool[static_cast<size_t>(w)] & ri[w]);
                }
                if (degree > pick_degree) {
                    pick_degree = degree;
                    pick = i;
                }
            }
            if (pick < 0) break;
            clique.push_back(pick);
            const uint64_t* rp = row(pick);
            for (int w = 0; w < words_; ++w) pool[static_cast<size_t>(w)] &= rp[w];
        }
        best_ = std::move(clique);
    }

    bool out_of_time() {
        if (timed_out_) return true;
        if ((++ticks_ & 1023) == 0 && std::chrono::steady_clock::now() > deadline_) {
            timed_out_ = true;
        }
        return timed_out_;
    }

    void expand(const std::vector<uint64_t>& candidates) {
        if (out_of_time()) return;

        // Greedy coloring: classes are pairwise non-adjacent sets, so any
        // clique takes at most one vertex per class.
        std::vector<int> order, color_of;
        std::vector<uint64_t> pool = candidates;
        std::vector<uint64_t> cls(static_cast<size_t>(words_));
        int color = 0;
        while (true) {
            bool any = false;
            for (int w = 0; w < words_; ++w) {
                if (pool[static_cast<size_t>(w)]) {
                    any = true;
                    break;
                }
            }
            if (!any) break;
            ++color;
            cls = pool;
            while (true) {
                int v = -1;
                for (int w = 0; w < words_; ++w) {
                    if (cls[static_cast<size_t>(w)]) {
                        v = w * 64 + std::countr_zero(cls[static_cast<size_t>(w)]);
                        break;
                    }
                }
                if (v < 0) break;
                clear_bit(cls.data(), v);
                clear_bit(pool.data(), v);
                order.push_back(v);
                color_of.push_back(color);
                const uint64_t* rv = row(v);
                for (int w = 0; w < words_; ++w) cls[static_cast<size_t>(w)] &= ~rv[w];
            }
        }

        std::vector<uint64_t> remaining = candidates;
        std::vector<uint64_t> next(static_cast<size_t>(words_));
        for (int idx = static_cast<int>(order.size()) - 1; idx >= 0; --idx) {
            if (out_of_time()) return;
            if (static_cast<int>(current_.size()) + color_of[static_cast<size_t>(idx)] <=
                static_cast<int>(best_.size())) {
                return;
            }
            const int v = order[static_cast<size_t>(idx)];
            current_.push_back(v);
            const uint64_t* rv = row(v);
            bool empty = true;
            for (int w = 0; w < words_; ++w) {
                next[static_cast<size_t>(w)] = remaining[static_cast<size_t>(w)] & rv[w];
                if (next[static_cast<size_t>(w)]) empty = false;
            }
            if (empty) {
                if (current_.size() > best_.size()) best_ = current_;
            } else {
                expand(next);
            }
            current_.pop_back();
            clear_bit(remaining.data(), v);
        }
    }

    int n_;
    int words_;
    std::vector<uint64_t> adj_;  // complement adjacency
    std::chrono::steady_clock::time_point deadline_;
    bool timed_out_ = false;
    uint64_t ticks_ = 0;
    std::vector<int> best_, current_;
};

}  // namespace

MisResult max_independent_set(const ExclusivityGraph& g, double time_budget_seconds) {
    ComplementCliqueSolver solver(g, time_budget_seconds);
    MisResult result = solver.solve();

    std::vector<char> chosen(g.vertices.size(), 0);
    for (int i : result.certificate) chosen[static_cast<size_t>(i)] = 1;
    for (const auto& [i, j] : g.edges) {
        if (chosen[static_cast<size_t>(i)] && chosen[static_cast<size_t>(j)]) {
            throw Error("independent-set certificate failed verification");
        }
    }
    return result;
}

std::string graph_to_dimacs(const ExclusivityGraph& g) {
    std::string out = "p edge " + std::to_string(g.vertices.size()) + " " +
                      std::to_string(g.edges.size()) + "\n";
    for (const auto& [i, j] : g.edges) {
        out += "e " + std::to_string(i + 1) + " " + std::to_string(j + 1) + "\n";
    }
    return out;
}

std::string witness_report_to_json(const WitnessReport& r) {
    char value[40], bound[40];
    std::snprintf(value, sizeof value, "%.17g", r.value);
    std::snprintf(bound, sizeof bound, "%.17g", r.bound);
    std::string out = "{\"face\": [" + std::to_string(r.u) + ", " + std::to_string(r.v) +
                      "], \"value\": " + value + ", \"bound\": " + bound +
                      ", \"contextual\": " + (r.contextual ? "true" : "false") + "}";
    return out;
}

}  // namespace qmsd
