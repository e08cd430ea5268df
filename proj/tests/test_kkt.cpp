#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "conewton/kkt.hpp"
#include "support/test_utils.hpp"

using namespace conewton;
using conewton::testing::dense_schur_oracle;
using conewton::testing::materialize;
using conewton::testing::random_element;
using conewton::testing::random_interior_element;
using conewton::testing::standard_cones;

namespace {

Eigen::SparseMatrix<double> dense_to_sparse(const Eigen::MatrixXd& m)
{
    return m.sparseView(0.0, 0.0);
}

ProblemData random_problem(const ConeSpec& cone, int m, std::mt19937_64& gen)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd a(m, cone.ambient_dim());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) = dist(gen);
    const Element xstar = random_interior_element(cone, gen);
    const Element sstar = random_interior_element(cone, gen);
    LinearMap map(cone, dense_to_sparse(a));
    Eigen::VectorXd lam(m);
    for (int i = 0; i < m; ++i) lam(i) = dist(gen);
    const Eigen::VectorXd b = map.apply(xstar);
    const Element c = add(map.adjoint_apply(lam), sstar);
    return make_problem(cone, dense_to_sparse(a), b, c, "random");
}

}  // namespace

TEST_CASE("linear map adjoint identity")
{
    std::mt19937_64 gen(3);
    for (const ConeSpec& cone : standard_cones()) {
        const int m = 3;
        std::normal_distribution<double> dist(0.0, 1.0);
        Eigen::MatrixXd a(m, cone.ambient_dim());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < a.cols(); ++j) a(i, j) = dist(gen);
        LinearMap map(cone, dense_to_sparse(a));
        for (int trial = 0; trial < 10; ++trial) {
            const Element x = random_element(cone, gen);
            Eigen::VectorXd v(m);
            for (int i = 0; i < m; ++i) v(i) = dist(gen);
            const double lhs = map.apply(x).dot(v);
            const double rhs = inner(cone, x, map.adjoint_apply(v));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("schur assembly fixed examples")
{
    // Orthant: A = [1 1], z = (1, 2) gives M = [1 + 4] = [5].
    const ConeSpec orth = ConeSpec::orthant(2);
    Eigen::MatrixXd a(1, 2);
    a << 1, 1;
    LinearMap map(orth, dense_to_sparse(a));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(1);
    const ProblemData prob =
        make_problem(orth, dense_to_sparse(a), map.apply(identity(orth)),
                     identity(orth), "fixture");
    Eigen::VectorXd zc(2);
    zc << 1, 2;
    // Build a state whose z equals (1, 2): central pair x = z, s = mu z^{-1}.
    const Element z = from_coords(orth, zc);
    const Element s = scalar_calculus(orth, ScalarFn::Inv, z);
    const SmoothingState st = compute_smoothing(orth, z, s, 1.0, 1.0);
    CHECK(norm(orth, sub(st.z, z)) <= 1e-12);
    const SchurHandle schur = assemble_schur(prob, st);
    CHECK(schur.m(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(schur.regularization_used == 0.0);
}

TEST_CASE("schur at the identity point equals the gram matrix")
{
    // W = identity operator at z = e (mu = rho = 1), so A W^{-1} A* = A A*.
    std::mt19937_64 gen(5);
    for (const ConeSpec& cone : standard_cones()) {
        const ProblemData prob = random_problem(cone, 3, gen);
        const Element e = identity(cone);
        const SmoothingState st =
            compute_smoothing(cone, e, scalar_calculus(cone, ScalarFn::Inv, e), 1.0, 1.0);
        const SchurHandle schur = assemble_schur(prob, st);
        CHECK((schur.m - prob.gram).cwiseAbs().maxCoeff() <=
              1e-12 * (1.0 + prob.gram.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("schur closed forms match the dense operator oracle")
{
    std::mt19937_64 gen(7);
    for (const ConeSpec& cone : standard_cones()) {
        for (int trial = 0; trial < 20; ++trial) {
            const ProblemData prob = random_problem(cone, 4, gen);
            const Element x = random_element(cone, gen);
            const Element s = random_element(cone, gen);
            const double mu = 0.05 + 0.4 * trial;
            const double rho = (trial % 2) ? 1.0 : 3.0;
            const SmoothingState st = compute_smoothing(cone, x, s, mu, rho);
            const SchurHandle schur = assemble_schur(prob, st);
            const Eigen::MatrixXd oracle = dense_schur_oracle(prob, st);
            CHECK((schur.m - oracle).cwiseAbs().maxCoeff() <=
                  1e-10 * (1.0 + oracle.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("newton step on homogeneous and fixed-point inputs")
{
    std::mt19937_64 gen(11);
    const ConeSpec cone = ConeSpec::orthant(3);
    const ProblemData prob = random_problem(cone, 2, gen);
    const Element x = random_interior_element(cone, gen);
    const Element s = random_interior_element(cone, gen);
    const SmoothingState st = compute_smoothing(cone, x, s, 1.0, 1.0);
    const SchurHandle schur = assemble_schur(prob, st);

    const NewtonDirection dir = newton_step(prob, st, schur, zero_element(cone));
    CHECK(norm(cone, dir.dx) <= 1e-13);
    CHECK(norm(cone, dir.ds) <= 1e-13);
    CHECK(dir.dlambda.norm() <= 1e-13);

    // 1-d LP at the exact central point: r = 0, so the step vanishes.
    const ConeSpec line = ConeSpec::orthant(1);
    Eigen::MatrixXd a(1, 1);
    a << 1;
    Eigen::VectorXd b(1);
    b << 1;
    Eigen::VectorXd c(1);
    c << 1;
    const ProblemData lp =
        make_problem(line, dense_to_sparse(a), b, riesz_element(line, c), "line");
    Eigen::VectorXd one(1);
    one << 1;
    const SmoothingState central =
        compute_smoothing(line, from_coords(line, one), from_coords(line, one), 1.0, 1.0);
    CHECK(norm(line, sub(central.z, central.x)) <= 1e-14);
    const SchurHandle sc = assemble_schur(lp, central);
    const NewtonDirection fixed =
        newton_step(lp, central, sc, sub(central.z, central.x));
    CHECK(norm(line, fixed.dx) <= 1e-13);
}

TEST_CASE("newton step against the dense three-block oracle")
{
    std::mt19937_64 gen(13);
    for (const ConeSpec& cone : standard_cones()) {
        const int m = 3;
        const ProblemData prob = random_problem(cone, m, gen);
        const int n = cone.ambient_dim();
        const Element x = random_element(cone, gen);
        const Element s = random_element(cone, gen);
        const SmoothingState st = compute_smoothing(cone, x, s, 0.7, 2.0);
        const SchurHandle schur = assemble_schur(prob, st);
        const Element r = random_element(cone, gen);
        const NewtonDirection dir = newton_step(prob, st, schur, r);

        CHECK(dir.system_residual <= 1e-9);
        CHECK(prob.map.apply(dir.dx).norm() <=
              1e-9 * (1.0 + prob.map.op_norm_estimate() * norm(cone, dir.dx)));

        // Dense oracle over (dx, ds, dlambda) coordinates.
        Eigen::MatrixXd amat = Eigen::MatrixXd(prob.map.matrix());
        Eigen::MatrixXd adj(n, m);
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
            e(j) = 1.0;
            adj.col(j) = to_coords(cone, prob.map.adjoint_apply(e));
        }
        const Eigen::MatrixXd hinvw = materialize(
            cone, [&](const Element& u) { return apply_Hinv(st, apply_W(st, u)); });
        const Eigen::MatrixXd hinv =
            materialize(cone, [&](const Element& u) { return apply_Hinv(st, u); });

        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(2 * n + m, 2 * n + m);
        full.block(0, 0, m, n) = amat;
        full.block(m, n, n, n).setIdentity();
        full.block(m, 2 * n, n, m) = adj;
        full.block(m + n, 0, n, n) = hinvw;
        full.block(m + n, n, n, n) = hinv / st.rho;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n + m);
        rhs.tail(n) = to_coords(cone, r);
        const Eigen::VectorXd sol = full.fullPivLu().solve(rhs);

        CHECK((to_coords(cone, dir.dx) - sol.head(n)).norm() <=
              1e-9 * (1.0 + sol.head(n).norm()));
        CHECK((to_coords(cone, dir.ds) - sol.segment(n, n)).norm() <=
              1e-9 * (1.0 + sol.segment(n, n).norm()));
        CHECK((dir.dlambda - sol.tail(m)).norm() <= 1e-9 * (1.0 + sol.tail(m).norm()));
    }
}

TEST_CASE("saddle solve consistency")
{
    std::mt19937_64 gen(17);
    for (const ConeSpec& cone : standard_cones()) {
        const ProblemData prob = random_problem(cone, 3, gen);
        const Element x = random_element(cone, gen);
        const Element s = random_element(cone, gen);
        const SmoothingState st = compute_smoothing(cone, x, s, 0.9, 1.0);
        const SchurHandle schur = assemble_schur(prob, st);

        // Zero right-hand side.
        const SaddleDirection z0 =
            saddle_solve(prob, st, schur, zero_element(cone), zero_element(cone));
        CHECK(norm(cone, z0.dx) <= 1e-13);
        CHECK(norm(cone, z0.ds) <= 1e-13);

        // Newton equivalence: g_x = -(c - y), g_s = -(z - x).
        const NewtonDirection nd = newton_step(prob, st, schur, sub(st.z, st.x));
        const SaddleDirection sd =
            saddle_solve(prob, st, schur, sub(st.y, prob.c), sub(st.x, st.z));
        CHECK(norm(cone, sub(sd.dx, nd.dx)) <= 1e-10 * (1.0 + norm(cone, nd.dx)));
        CHECK(norm(cone, sub(sd.ds, nd.ds)) <= 1e-10 * (1.0 + norm(cone, nd.ds)));

        // Generic right-hand side: defining equations hold.
        const Element gx = random_element(cone, gen);
        const Element gs = random_element(cone, gen);
        const SaddleDirection gd = saddle_solve(prob, st, schur, gx, gs);
        CHECK(prob.map.apply(gd.dx).norm() <=
              1e-9 * (1.0 + prob.map.op_norm_estimate() * norm(cone, gd.dx)));
        // rho W (dx + gs) - gx lies in range(A*): its kernel projection vanishes.
        const Element res = sub(
            scale(st.rho, apply_W(st, add(gd.dx, gs))), gx);
        CHECK(norm(cone, prob.project_kernel(res)) <= 1e-9 * (1.0 + norm(cone, gx)));
        // ds = -rho W dx - rho H gs by construction.
        const Element want_ds = scale(
            -st.rho, add(apply_W(st, gd.dx), apply_H(st, gs)));
        CHECK(norm(cone, sub(gd.ds, want_ds)) <= 1e-11 * (1.0 + norm(cone, want_ds)));
    }
}

TEST_CASE("s_norm properties")
{
    std::mt19937_64 gen(19);
    const ConeSpec cone = standard_cones()[3];
    const ProblemData prob = random_problem(cone, 3, gen);
    const Element x = random_element(cone, gen);
    const Element s = random_element(cone, gen);
    const SmoothingState st = compute_smoothing(cone, x, s, 0.4, 2.0);

    CHECK(s_norm(st, zero_element(cone), zero_element(cone)) == 0.0);

    const Element dx = prob.project_kernel(random_element(cone, gen));
    const Element ds = random_element(cone, gen);
    const double base = s_norm(st, dx, ds);
    CHECK(s_norm(st, scale(2.0, dx), scale(2.0, ds)) ==
          doctest::Approx(2.0 * base).epsilon(1e-12));
}
