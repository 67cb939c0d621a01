#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "qmsd/rng.hpp"
#include "qmsd/wigner.hpp"

using namespace qmsd;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXcd random_density(int dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXcd g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            g(r, c) = std::complex<double>(uniform_double(rng) - 0.5, uniform_double(rng) - 0.5);
    Eigen::MatrixXcd rho = g * g.adjoint();
    return rho / rho.trace().real();
}

// (|1> - |2>)/sqrt(2): the canonical maximally negative single-qutrit state.
Eigen::MatrixXcd h_i_density() {
    Eigen::VectorXcd ket = Eigen::VectorXcd::Zero(3);
    ket(1) = 1.0 / std::sqrt(2.0);
    ket(2) = -1.0 / std::sqrt(2.0);
    return ket * ket.adjoint();
}

}  // namespace

TEST_CASE("pauli matrices realize the Z and X actions") {
    const auto z = pauli_matrix(3, 1, 0);
    const auto x = pauli_matrix(3, 0, 1);
    const std::complex<double> w = std::exp(std::complex<double>(0, 2.0 * kPi / 3.0));
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXcd ket = Eigen::VectorXcd::Zero(3);
        ket(k) = 1.0;
        CHECK((z * ket - std::pow(w, k) * ket).norm() == doctest::Approx(0.0).epsilon(1e-12));
        Eigen::VectorXcd shifted = Eigen::VectorXcd::Zero(3);
        shifted((k + 1) % 3) = 1.0;
        CHECK((x * ket - shifted).norm() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("pauli matrices compose as Z^a X^b and are unitary") {
    for (int d : {3, 5}) {
        const auto z = pauli_matrix(d, 1, 0);
        const auto x = pauli_matrix(d, 0, 1);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                Eigen::MatrixXcd expect = Eigen::MatrixXcd::Identity(d, d);
                for (int i = 0; i < a; ++i) expect = z * expect;
                for (int i = 0; i < b; ++i) expect = expect * x;
                const auto p = pauli_matrix(d, a, b);
                CHECK((p - expect).cwiseAbs().maxCoeff() < 1e-12);
                CHECK((p * p.adjoint() - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("pauli operators commute up to the symplectic phase") {
    const int d = 3;
    const std::complex<double> w = std::exp(std::complex<double>(0, 2.0 * kPi / d));
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        SymplecticVector p{d, {int(uniform_below(rng, d)), int(uniform_below(rng, d))},
                              {int(uniform_below(rng, d)), int(uniform_below(rng, d))}};
        SymplecticVector q{d, {int(uniform_below(rng, d)), int(uniform_below(rng, d))},
                              {int(uniform_below(rng, d)), int(uniform_below(rng, d))}};
        const auto pm = pauli_matrix(p);
        const auto qm = pauli_matrix(q);
        const int s = symplectic_product(p, q);
        // PQ = w^{<p,q>} QP
        CHECK((pm * qm - std::pow(w, s) * qm * pm).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("phase point operators form an orthogonal Hermitian basis") {
    for (int d : {3, 5}) {
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
        for (int u = 0; u < d; ++u) {
            for (int v = 0; v < d; ++v) {
                const Eigen::MatrixXcd& a = phase_point_operator(d, u, v);
                CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
                CHECK(std::abs(a.trace() - std::complex<double>(d, 0)) < 1e-12);
                sum += a;
            }
        }
        CHECK((sum - double(d * d) * Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
        // Tr(A_p A_q) = d^3 delta_{pq}
        const Eigen::MatrixXcd& a00 = phase_point_operator(d, 0, 0);
        const Eigen::MatrixXcd& a12 = phase_point_operator(d, 1, 2);
        CHECK(std::abs((a00 * a00).trace().real() - d * d * d) < 1e-10);
        CHECK(std::abs((a00 * a12).trace().real()) < 1e-10);
    }
}

TEST_CASE("A_00 at d = 3 is three times the parity operator") {
    const Eigen::MatrixXcd& a = phase_point_operator(3, 0, 0);
    Eigen::MatrixXcd parity = Eigen::MatrixXcd::Zero(3, 3);
    for (int k = 0; k < 3; ++k) parity((3 - k) % 3, k) = 1.0;
    CHECK((a - 3.0 * parity).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("computational basis states occupy vertical lines") {
    for (int k = 0; k < 3; ++k) {
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
        rho(k, k) = 1.0;
        const WignerFunction w = wigner_from_density(rho, 3, 1);
        for (int z = 0; z < 3; ++z)
            for (int x = 0; x < 3; ++x)
                CHECK(w.at(z, x) == doctest::Approx(x == k ? 1.0 / 3.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("the maximally negative qutrit state has the pinned quasiprobabilities") {
    const WignerFunction w = wigner_from_density(h_i_density(), 3, 1);
    CHECK(std::abs(w.at(0, 0) - (-1.0 / 3.0)) < 1e-12);
    for (int z = 0; z < 3; ++z)
        for (int x = 0; x < 3; ++x)
            if (z != 0 || x != 0) CHECK(std::abs(w.at(z, x) - 1.0 / 6.0) < 1e-12);
}

TEST_CASE("wigner values sum to the trace and invert back to the density") {
    for (uint64_t seed : {1u, 2u, 3u}) {
        const Eigen::MatrixXcd rho = random_density(3, seed);
        const WignerFunction w = wigner_from_density(rho, 3, 1);
        double total = 0;
        for (double v : w.values) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((density_from_wigner(w) - rho).cwiseAbs().maxCoeff() < 1e-12);
    }
    // two-qudit round trip
    const Eigen::MatrixXcd rho2 = random_density(9, 77);
    const WignerFunction w2 = wigner_from_density(rho2, 3, 2);
    CHECK((density_from_wigner(w2) - rho2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("product states factorize point by point") {
    const Eigen::MatrixXcd rho_a = random_density(3, 5);
    const Eigen::MatrixXcd rho_b = random_density(3, 6);
    const WignerFunction wa = wigner_from_density(rho_a, 3, 1);
    const WignerFunction wb = wigner_from_density(rho_b, 3, 1);
    Eigen::MatrixXcd joint(9, 9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            joint.block(3 * r, 3 * c, 3, 3) = rho_a(r, c) * rho_b;
    const WignerFunction wj = wigner_from_density(joint, 3, 2);
    const WignerFunction wt = tensor(wa, wb);
    REQUIRE(wt.size() == 81);
    for (int i = 0; i < 81; ++i) CHECK(std::abs(wj.values[i] - wt.values[i]) < 1e-12);
    // flat layout: qudit 1 most significant
    CHECK(std::abs(wt.values[wigner_flat_index(3, {1, 2}, {0, 1})] - wa.at(1, 0) * wb.at(2, 1)) < 1e-15);
}

TEST_CASE("flat indices enumerate per-qudit digits most significant first") {
    CHECK(wigner_flat_index(3, {0}, {0}) == 0);
    CHECK(wigner_flat_index(3, {2}, {1}) == 7);
    CHECK(wigner_flat_index(3, {1, 0}, {0, 2}) == 3 * 9 + 2);
    CHECK(wigner_flat_index(5, {0, 1}, {4, 0}) == 4 * 25 + 5);
}

TEST_CASE("polytope membership separates interior, boundary and exterior") {
    CHECK(polytope_membership(uniform_wigner(Prime(3), 1)).kind == PolytopeVerdict::Kind::Inside);

    const WignerFunction neg = wigner_from_density(h_i_density(), 3, 1);
    const PolytopeVerdict out = polytope_membership(neg);
    CHECK(out.kind == PolytopeVerdict::Kind::Outside);
    REQUIRE(out.points.size() == 1);
    CHECK(out.points[0] == 0);

    const WignerFunction edge = nu_family_wigner(Prime(3), 0.0, 0, 0);
    const PolytopeVerdict on = polytope_membership(edge);
    CHECK(on.kind == PolytopeVerdict::Kind::OnBoundary);
}

TEST_CASE("nu family round-trips through the projection") {
    const WignerFunction neg = wigner_from_density(h_i_density(), 3, 1);
    const NuFamilyState s = to_nu_family(neg);
    CHECK(s.u == 0);
    CHECK(s.v == 0);
    CHECK(s.nu == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

    const WignerFunction fam = nu_family_wigner(Prime(3), -0.2, 1, 2);
    const NuFamilyState back = to_nu_family(fam);
    CHECK(back.u == 1);
    CHECK(back.v == 2);
    CHECK(back.nu == doctest::Approx(-0.2).epsilon(1e-12));
    double total = 0;
    for (double v : fam.values) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // ties break toward the smallest flat index
    const NuFamilyState flat = to_nu_family(uniform_wigner(Prime(3), 1));
    CHECK(flat.u == 0);
    CHECK(flat.v == 0);
}

TEST_CASE("wigner JSON round-trips bit-exactly") {
    const WignerFunction w = wigner_from_density(random_density(3, 9), 3, 1);
    const WignerFunction back = wigner_from_json(wigner_to_json(w));
    REQUIRE(back.size() == w.size());
    for (int i = 0; i < w.size(); ++i) CHECK(back.values[i] == w.values[i]);

    CHECK_THROWS_AS(wigner_from_json("{"), ParseError);
    CHECK_THROWS_AS(wigner_from_json(R"({"d": 3, "N": 1, "values": [0.5, 0.5]})"), ParseError);
    CHECK_THROWS_AS(wigner_from_json(R"({"d": 4, "N": 1, "values": []})"), ParseError);
}

TEST_CASE("dense matrix JSON reports dimensions and rejects bad shapes") {
    const Eigen::MatrixXcd rho = h_i_density();
    std::string text = R"({"d": 3, "re": [[0,0,0],[0,0.5,-0.5],[0,-0.5,0.5]], "im": [[0,0,0],[0,0,0],[0,0,0]]})";
    int d = 0, n = 0;
    const Eigen::MatrixXcd parsed = density_from_json(text, &d, &n);
    CHECK(d == 3);
    CHECK(n == 1);
    CHECK((parsed - rho).cwiseAbs().maxCoeff() < 1e-12);

    // side 4 is not a power of 3
    CHECK_THROWS_AS(density_from_json(R"({"d": 3, "re": [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]], "im": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]})", &d, &n),
                    ParseError);
}
