#include "qmsd/wigner.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>

#include "json.hpp"
#include "qmsd/errors.hpp"

namespace qmsd {

namespace {

std::complex<double> omega_pow(int d, long long k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(mod_reduce(k, d)) / d;
    return {std::cos(theta), std::sin(theta)};
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

long long ipow(int base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

void check_power(int d, int n_qudits, Eigen::Index dim, const char* who) {
    Prime check(d);
    if (n_qudits < 1) throw ShapeError(std::string(who) + ": need at least one qudit");
    if (dim != ipow(d, n_qudits)) {
        throw ShapeError(std::string(who) + ": matrix side " + std::to_string(dim) +
                         " is not d^n for d=" + std::to_string(d) + ", n=" + std::to_string(n_qudits));
    }
}

}  // namespace

WignerFunction uniform_wigner(Prime d, int n_qudits) {
    if (n_qudits < 1) throw ShapeError("uniform_wigner: need at least one qudit");
    WignerFunction w;
    w.d = d.value();
    w.n_qudits = n_qudits;
    const long long entries = ipow(d.value(), 2 * n_qudits);
    w.values.assign(static_cast<size_t>(entries), 1.0 / static_cast<double>(entries));
    return w;
}

int wigner_flat_index(int d, const std::vector<int>& z, const std::vector<int>& x) {
    if (z.size() != x.size()) throw DimensionMismatchError("wigner_flat_index: z/x length mismatch");
    long long idx = 0;
    for (size_t i = 0; i < z.size(); ++i) {
        idx = idx * d * d + static_cast<long long>(z[i]) * d + x[i];
    }
    return static_cast<int>(idx);
}

Eigen::MatrixXcd pauli_matrix(int d, int a, int b) {
    a = mod_reduce(a, d);
    b = mod_reduce(b, d);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const int row = (k + b) % d;
        m(row, k) = omega_pow(d, static_cast<long long>(a) * row);
    }
    return m;
}

Eigen::MatrixXcd pauli_matrix(const SymplecticVector& v) {
    Eigen::MatrixXcd m = pauli_matrix(v.d, v.a[0], v.b[0]);
    for (int i = 1; i < v.n_qudits(); ++i) {
        m = kron(m, pauli_matrix(v.d, v.a[i], v.b[i]));
    }
    return m;
}

const Eigen::MatrixXcd& phase_point_operator(int d, int u, int v) {
    Prime check(d);
    u = mod_reduce(u, d);
    v = mod_reduce(v, d);

    static std::map<long long, std::unique_ptr<const Eigen::MatrixXcd>> cache;
    static std::shared_mutex mtx;

    const long long key = (static_cast<long long>(d) << 16) | (u << 8) | v;
    {
        std::shared_lock lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }

    std::unique_lock lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    const long long key00 = static_cast<long long>(d) << 16;
    if (cache.find(key00) == cache.end()) {
        const int inv2 = mod_inverse(2, d);
        Eigen::MatrixXcd a0 = Eigen::MatrixXcd::Zero(d, d);
        for (int z = 0; z < d; ++z) {
            for (int x = 0; x < d; ++x) {
                a0 += omega_pow(d, -static_cast<long long>(inv2) * z * x) * pauli_matrix(d, z, x);
            }
        }
        cache.emplace(key00, std::make_unique<const Eigen::MatrixXcd>(std::move(a0)));
    }
    if (key == key00) return *cache.at(key00);

    const Eigen::MatrixXcd& a0 = *cache.at(key00);
    const Eigen::MatrixXcd p = pauli_matrix(d, u, v);
    Eigen::MatrixXcd a = p * a0 * p.adjoint();
    auto [pos, inserted] = cache.emplace(key, std::make_unique<const Eigen::MatrixXcd>(std::move(a)));
    return *pos->second;
}

WignerFunction wigner_from_density(const Eigen::MatrixXcd& rho, int d, int n_qudits) {
    check_power(d, n_qudits, rho.rows(), "wigner_from_density");
    if (rho.rows() != rho.cols()) throw ShapeError("wigner_from_density: matrix not square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8) {
        throw ShapeError("wigner_from_density: matrix not Hermitian");
    }
    if (std::abs(rho.trace() - std::complex<double>(1.0, 0.0)) > 1e-6) {
        throw ShapeError("wigner_from_density: trace must be 1");
    }

    WignerFunction w;
    w.d = d;
    w.n_qudits = n_qudits;
    const long long points = ipow(d, 2 * n_qudits);
    w.values.resize(static_cast<size_t>(points));
    const double norm = 1.0 / static_cast<double>(ipow(d, 2 * n_qudits));

    std::vector<int> digits(static_cast<size_t>(n_qudits), 0);
    for (long long p = 0; p < points; ++p) {
        long long rem = p;
        for (int i = n_qudits - 1; i >= 0; --i) {
            digits[i] = static_cast<int>(rem % (d * d));
            rem /= d * d;
        }
        Eigen::MatrixXcd a = phase_point_operator(d, digits[0] / d, digits[0] % d);
        for (int i = 1; i < n_qudits; ++i) {
            a = kron(a, phase_point_operator(d, digits[i] / d, digits[i] % d));
        }
        const std::complex<double> tr = (rho.transpose().cwiseProduct(a)).sum();
        w.values[static_cast<size_t>(p)] = tr.real() * norm;
    }
    return w;
}

Eigen::MatrixXcd density_from_wigner(const WignerFunction& w) {
    Prime check(w.d);
    const int d = w.d, n = w.n_qudits;
    const long long points = ipow(d, 2 * n);
    if (static_cast<long long>(w.values.size()) != points) {
        throw ShapeError("density_from_wigner: values length is not d^{2n}");
    }
    const long long dim = ipow(d, n);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<int> digits(static_cast<size_t>(n), 0);
    for (long long p = 0; p < points; ++p) {
        long long rem = p;
        for (int i = n - 1; i >= 0; --i) {
            digits[i] = static_cast<int>(rem % (d * d));
            rem /= d * d;
        }
        Eigen::MatrixXcd a = phase_point_operator(d, digits[0] / d, digits[0] % d);
        for (int i = 1; i < n; ++i) {
            a = kron(a, phase_point_operator(d, digits[i] / d, digits[i] % d));
        }
        rho += w.values[static_cast<size_t>(p)] * a;
    }
    rho /= static_cast<double>(dim);
    return rho;
}

WignerFunction tensor(const WignerFunction& lhs, const WignerFunction& rhs) {
    if (lhs.d != rhs.d) throw DimensionMismatchError("tensor: mixed moduli");
    WignerFunction out;
    out.d = lhs.d;
    out.n_qudits = lhs.n_qudits + rhs.n_qudits;
    out.values.resize(lhs.values.size() * rhs.values.size());
    size_t k = 0;
    for (double a : lhs.values) {
        for (double b : rhs.values) out.values[k++] = a * b;
    }
    return out;
}

PolytopeVerdict polytope_membership(const WignerFunction& w, double tol) {
    if (w.n_qudits != 1) throw ShapeError("polytope_membership: single-qudit input required");
    PolytopeVerdict out;
    std::vector<int> negative, boundary;
    for (int i = 0; i < w.size(); ++i) {
        if (w.values[i] < -tol) {
            negative.push_back(i);
        } else if (std::abs(w.values[i]) <= tol) {
            boundary.push_back(i);
        }
    }
    if (!negative.empty()) {
        out.kind = PolytopeVerdict::Kind::Outside;
        out.points = negative;
    } else if (!boundary.empty()) {
        out.kind = PolytopeVerdict::Kind::OnBoundary;
        out.points = boundary;
    } else {
        out.kind = PolytopeVerdict::Kind::Inside;
    }
    return out;
}

NuFamilyState to_nu_family(const WignerFunction& w) {
    if (w.n_qudits != 1) throw ShapeError("to_nu_family: single-qudit input required");
    int best = 0;
    for (int i = 1; i < w.size(); ++i) {
        if (w.values[i] < w.values[best]) best = i;
    }
    NuFamilyState s;
    s.d = w.d;
    s.nu = w.values[best];
    s.u = best / w.d;
    s.v = best % w.d;
    return s;
}

WignerFunction nu_family_wigner(Prime d, double nu, int u, int v) {
    const int dd = d.value();
    WignerFunction w;
    w.d = dd;
    w.n_qudits = 1;
    w.values.assign(static_cast<size_t>(dd) * dd, (1.0 - nu) / (dd * dd - 1));
    w.values[static_cast<size_t>(mod_reduce(u, dd)) * dd + mod_reduce(v, dd)] = nu;
    return w;
}

WignerFunction wigner_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("wigner JSON: ") + e.what());
    }
    try {
        WignerFunction w;
        w.d = j.at("d").get<int>();
        w.n_qudits = j.at("N").get<int>();
        Prime check(w.d);
        if (w.n_qudits < 1) throw ParseError("wigner JSON: N must be at least 1");
        const auto& vals = j.at("values");
        if (!vals.is_array() || static_cast<long long>(vals.size()) != ipow(w.d, 2 * w.n_qudits)) {
            throw ParseError("wigner JSON: values must have d^{2N} entries");
        }
        w.values.reserve(vals.size());
        for (const auto& v : vals) w.values.push_back(v.get<double>());
        return w;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("wigner JSON: ") + e.what());
    } catch (const Error& e) {
        throw ParseError(std::string("wigner JSON: ") + e.what());
    }
}

std::string wigner_to_json(const WignerFunction& w) {
    std::ostringstream out;
    out << "{\"d\":" << w.d << ",\"N\":" << w.n_qudits << ",\"values\":[";
    char buf[64];
    for (size_t i = 0; i < w.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", w.values[i]);
        out << (i ? "," : "") << buf;
    }
    out << "]}";
    return out.str();
}

Eigen::MatrixXcd density_from_json(const std::string& text, int* d_out, int* n_out) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("density JSON: ") + e.what());
    }
    try {
        const int d = j.at("d").get<int>();
        Prime check(d);
        const auto& re = j.at("re");
        const auto& im = j.at("im");
        if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty()) {
            throw ParseError("density JSON: re/im must be equal-size non-empty arrays");
        }
        const Eigen::Index dim = static_cast<Eigen::Index>(re.size());
        int n = 0;
        long long acc = 1;
        while (acc < dim) {
            acc *= d;
            ++n;
        }
        if (acc != dim || n < 1) throw ParseError("density JSON: matrix side is not a power of d");
        Eigen::MatrixXcd rho(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r) {
            const auto& rr = re.at(r);
            const auto& ri = im.at(r);
            if (static_cast<Eigen::Index>(rr.size()) != dim || static_cast<Eigen::Index>(ri.size()) != dim) {
                throw ParseError("density JSON: matrix rows must be square");
            }
            for (Eigen::Index c = 0; c < dim; ++c) {
                rho(r, c) = {rr.at(c).get<double>(), ri.at(c).get<double>()};
            }
        }
        if (d_out) *d_out = d;
        if (n_out) *n_out = n;
        return rho;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("density JSON: ") + e.what());
    } catch (const Error& e) {
        throw ParseError(std::string("density JSON: ") + e.what());
    }
}

}  // namespace qmsd
