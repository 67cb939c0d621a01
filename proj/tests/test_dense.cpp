#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "qmsd/dense.hpp"
#include "qmsd/distill.hpp"
#include "qmsd/rng.hpp"

using namespace qmsd;

namespace {

StabilizerCode make_code(int d, int N, const std::vector<std::vector<int>>& rows,
                         const std::vector<int>& syndrome) {
    StabilizerCode c;
    c.d = d;
    c.N = N;
    c.m = ZdMatrix(d, N - 1, 2 * N);
    for (int r = 0; r < N - 1; ++r)
        for (int col = 0; col < 2 * N; ++col) c.m.at(r, col) = rows[r][col];
    c.syndrome = ZdVector{d, syndrome};
    return c;
}

StabilizerCode zz_code(int s = 0) { return make_code(3, 2, {{1, 1, 0, 0}}, {s}); }
StabilizerCode zi_code() { return make_code(3, 2, {{1, 0, 0, 0}}, {0}); }

Eigen::MatrixXcd random_density(int dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXcd g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            g(r, c) = std::complex<double>(uniform_double(rng) - 0.5, uniform_double(rng) - 0.5);
    Eigen::MatrixXcd rho = g * g.adjoint();
    return rho / rho.trace().real();
}

// Normalized quasidistribution with negative entries, as a density matrix.
Eigen::MatrixXcd random_quasi_density(uint64_t seed) {
    std::mt19937_64 rng(seed);
    WignerFunction w;
    w.d = 3;
    w.n_qudits = 1;
    w.values.resize(9);
    double total = 0;
    for (double& v : w.values) {
        v = uniform_double(rng) - 0.25;
        total += v;
    }
    for (double& v : w.values) v /= total;
    return density_from_wigner(w);
}

}  // namespace

TEST_CASE("dense state wrapping checks hermiticity, trace and flags quasi-states") {
    bool quasi = true;
    const DenseState good = make_dense_state(random_density(3, 1), 3, &quasi);
    CHECK(good.n_qudits == 1);
    CHECK_FALSE(quasi);

    // past the pure-state extreme at nu = -1/3 the matrix must lose positivity
    const DenseState soft =
        make_dense_state(density_from_wigner(nu_family_wigner(Prime(3), -0.4, 0, 0)), 3, &quasi);
    CHECK(soft.n_qudits == 1);
    CHECK(quasi);

    Eigen::MatrixXcd non_herm = random_density(3, 2);
    non_herm(0, 1) += std::complex<double>(0.1, 0.0);
    CHECK_THROWS_AS(make_dense_state(non_herm, 3), ShapeError);

    Eigen::MatrixXcd off_trace = random_density(3, 3) * 1.5;
    CHECK_THROWS_AS(make_dense_state(off_trace, 3), ShapeError);
}

TEST_CASE("the register budget is enforced") {
    const StabilizerCode big = random_code(Prime(3), 6, 7);  // 3^6 = 729 > 243
    CHECK_THROWS_AS(codespace_projector(big), BudgetExceededError);
    const DenseState rho = make_dense_state(random_density(3, 4), 3);
    CHECK_THROWS_AS(distill_dense(big, rho), BudgetExceededError);
}

TEST_CASE("codespace projectors are orthogonal projectors of rank d") {
    for (uint64_t seed : {51u, 52u, 53u}) {
        for (int N : {2, 3}) {
            StabilizerCode code = random_code(Prime(3), N, seed);
            code.syndrome.e[0] = static_cast<int>(seed % 3);
            const Eigen::MatrixXcd pi = codespace_projector(code);
            CHECK((pi - pi.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((pi * pi - pi).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(pi.trace().real() - 3.0) < 1e-10);
        }
    }
}

TEST_CASE("the Z(x)Z projector spans the expected kets") {
    // s = 0: k1 + k2 = 0;  s = 1: k1 + k2 = 1
    for (int s = 0; s < 2; ++s) {
        const Eigen::MatrixXcd pi = codespace_projector(zz_code(s));
        for (int k1 = 0; k1 < 3; ++k1) {
            for (int k2 = 0; k2 < 3; ++k2) {
                Eigen::VectorXcd ket = Eigen::VectorXcd::Zero(9);
                ket(3 * k1 + k2) = 1.0;
                const double kept = (pi * ket).norm();
                if ((k1 + k2) % 3 == s)
                    CHECK(kept == doctest::Approx(1.0).epsilon(1e-12));
                else
                    CHECK(kept < 1e-12);
            }
        }
    }
}

TEST_CASE("a trivial code is the identity channel on density matrices") {
    for (uint64_t seed : {61u, 62u}) {
        const DenseState rho = make_dense_state(random_density(3, seed), 3);
        const DenseDistillationResult out = distill_dense(zi_code(), rho);
        CHECK((out.rho_out.matrix - rho.matrix).cwiseAbs().maxCoeff() < 1e-12);
        // the projected qudit is measured in the Z basis: acceptance <0|rho|0>
        CHECK(std::abs(out.acceptance_probability - rho.matrix(0, 0).real()) < 1e-12);
    }
}

TEST_CASE("dense outputs are unit-trace Hermitian with acceptance d^{1-N}") {
    const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(3, 3) / 3.0;
    for (int N : {2, 3}) {
        const StabilizerCode code = random_code(Prime(3), N, 800 + N);
        const DenseDistillationResult out = distill_dense(code, make_dense_state(mixed, 3));
        CHECK((out.rho_out.matrix - out.rho_out.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(out.rho_out.matrix.trace().real() - 1.0) < 1e-10);
        // the maximally mixed state is a fixed point
        CHECK((out.rho_out.matrix - mixed).cwiseAbs().maxCoeff() < 1e-10);
        double expect_acc = 1.0;
        for (int i = 1; i < N; ++i) expect_acc /= 3.0;
        CHECK(std::abs(out.acceptance_probability - expect_acc) < 1e-10);
    }
}

TEST_CASE("the two distillation routes agree on random codes and states") {
    int checked = 0;
    for (uint64_t seed = 1; seed <= 12; ++seed) {
        const int N = 2 + static_cast<int>(seed % 2);
        StabilizerCode code = random_code(Prime(3), N, 7000 + seed);
        code.syndrome.e[0] = static_cast<int>(seed % 3);

        const Eigen::MatrixXcd rho = (seed % 3 == 0) ? random_quasi_density(seed) : random_density(3, seed);
        const WignerFunction w_in = wigner_from_density(rho, 3, 1);

        const DistillationResult phase = distill_exact(code, w_in);
        const DenseDistillationResult dense = distill_dense(code, make_dense_state(rho, 3));
        const WignerFunction w_dense = wigner_from_density(dense.rho_out.matrix, 3, 1);

        CHECK(std::abs(phase.acceptance_probability - dense.acceptance_probability) < 1e-9);
        for (int c = 0; c < 9; ++c) CHECK(std::abs(phase.w_out.values[c] - w_dense.values[c]) < 1e-9);
        ++checked;
    }
    CHECK(checked == 12);
}

TEST_CASE("both routes report zero acceptance for an orthogonal input") {
    // |1><1| forces x1 = x2 = 1, so x1 + x2 = 2 != 0
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
    rho(1, 1) = 1.0;
    CHECK_THROWS_AS(distill_dense(zz_code(), make_dense_state(rho, 3)), ZeroAcceptanceError);
    CHECK_THROWS_AS(distill_exact(zz_code(), wigner_from_density(rho, 3, 1)), ZeroAcceptanceError);
}
