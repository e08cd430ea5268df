#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "conewton/cone.hpp"
#include "support/test_utils.hpp"

using namespace conewton;
using conewton::testing::materialize;
using conewton::testing::random_element;
using conewton::testing::random_interior_element;
using conewton::testing::standard_cones;

namespace {

Element vec_element(const ConeSpec& cone, std::initializer_list<double> vals)
{
    Eigen::VectorXd v(static_cast<int>(vals.size()));
    int i = 0;
    for (double x : vals) v(i++) = x;
    return from_coords(cone, v);
}

}  // namespace

TEST_CASE("cone spec ranks and dimensions")
{
    ConeSpec cone{{{BlockKind::Orthant, 3}, {BlockKind::SecondOrder, 4}}};
    CHECK(cone.rank() == 5);
    CHECK(cone.ambient_dim() == 7);
    CHECK(rank(cone) == 5);

    ConeSpec psd = ConeSpec::psd(4);
    CHECK(psd.rank() == 4);
    CHECK(psd.ambient_dim() == 10);

    CHECK_THROWS_AS(ConeSpec::second_order(1).validate(), StructuralError);
    CHECK_THROWS_AS(ConeSpec{}.validate(), StructuralError);
    CHECK_THROWS_AS(ConeSpec::orthant(0).validate(), StructuralError);
}

TEST_CASE("jordan product on each family")
{
    const ConeSpec orth = ConeSpec::orthant(2);
    const Element p = jordan_product(orth, vec_element(orth, {1, 2}), vec_element(orth, {3, 4}));
    CHECK(p.blocks[0].v(0) == doctest::Approx(3.0));
    CHECK(p.blocks[0].v(1) == doctest::Approx(8.0));

    const ConeSpec soc = ConeSpec::second_order(2);
    const Element q = jordan_product(soc, vec_element(soc, {1, 0}), vec_element(soc, {0, 1}));
    CHECK(q.blocks[0].v(0) == doctest::Approx(0.0));
    CHECK(q.blocks[0].v(1) == doctest::Approx(1.0));

    std::mt19937_64 gen(7);
    for (const ConeSpec& cone : standard_cones()) {
        const Element x = random_element(cone, gen);
        const Element xe = jordan_product(cone, x, identity(cone));
        CHECK(norm(cone, sub(xe, x)) <= 1e-14 * (1.0 + norm(cone, x)));
    }
}

TEST_CASE("jordan product rejects shape mismatches")
{
    const ConeSpec a = ConeSpec::orthant(2);
    const ConeSpec b = ConeSpec::orthant(3);
    std::mt19937_64 gen(1);
    CHECK_THROWS_AS(jordan_product(a, random_element(a, gen), random_element(b, gen)),
                    StructuralError);
}

TEST_CASE("spectral decomposition fixed examples")
{
    const ConeSpec soc = ConeSpec::second_order(3);
    const auto dec = spectral_decompose(soc, vec_element(soc, {3, 4, 0}));
    CHECK(dec[0].eigenvalues(0) == doctest::Approx(7.0));
    CHECK(dec[0].eigenvalues(1) == doctest::Approx(-1.0));
    CHECK(dec[0].idempotents[0].v.isApprox(Eigen::Vector3d(0.5, 0.5, 0.0)));
    CHECK(dec[0].idempotents[1].v.isApprox(Eigen::Vector3d(0.5, -0.5, 0.0)));

    // Degenerate frame: xbar = 0 picks the first coordinate direction.
    const auto deg = spectral_decompose(soc, vec_element(soc, {2, 0, 0}));
    CHECK(deg[0].idempotents[0].v.isApprox(Eigen::Vector3d(0.5, 0.5, 0.0)));

    const ConeSpec orth = ConeSpec::orthant(2);
    const auto od = spectral_decompose(orth, vec_element(orth, {5, -2}));
    CHECK(od[0].eigenvalues(0) == doctest::Approx(5.0));
    CHECK(od[0].eigenvalues(1) == doctest::Approx(-2.0));

    const ConeSpec psd = ConeSpec::psd(2);
    Element z = zero_element(psd);
    z.blocks[0].m << 2, 0, 0, 3;
    const auto pd = spectral_decompose(psd, z);
    CHECK(pd[0].eigenvalues(0) == doctest::Approx(3.0));
    CHECK(pd[0].eigenvalues(1) == doctest::Approx(2.0));
    CHECK(pd[0].idempotents[0].m(1, 1) == doctest::Approx(1.0));
    CHECK(pd[0].idempotents[1].m(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("spectral frame identities on random elements")
{
    std::mt19937_64 gen(11);
    for (const ConeSpec& cone : standard_cones()) {
        for (int trial = 0; trial < 20; ++trial) {
            const Element x = random_element(cone, gen);
            const auto dec = spectral_decompose(cone, x);
            Element recon = zero_element(cone);
            for (int b = 0; b < cone.num_blocks(); ++b) {
                const BlockSpectral& sp = dec[b];
                Element sum_idem = zero_element(cone);
                for (int i = 0; i < sp.eigenvalues.size(); ++i) {
                    Element vi = zero_element(cone);
                    vi.blocks[b] = sp.idempotents[i];
                    recon = axpy(recon, sp.eigenvalues(i), vi);
                    sum_idem = add(sum_idem, vi);
                    // idempotency
                    const Element sq = jordan_product(cone, vi, vi);
                    CHECK(norm(cone, sub(sq, vi)) <= 1e-12);
                    // pairwise orthogonality
                    for (int jj = i + 1; jj < sp.eigenvalues.size(); ++jj) {
                        Element vj = zero_element(cone);
                        vj.blocks[b] = sp.idempotents[jj];
                        CHECK(norm(cone, jordan_product(cone, vi, vj)) <= 1e-12);
                    }
                }
                // frame sums to the block identity
                Element eb = zero_element(cone);
                eb.blocks[b] = identity(cone).blocks[b];
                CHECK(norm(cone, sub(sum_idem, eb)) <= 1e-12);
            }
            CHECK(norm(cone, sub(recon, x)) <= 1e-12 * (1.0 + norm(cone, x)));
        }
    }
}

TEST_CASE("scalar calculus fixed examples")
{
    const ConeSpec orth = ConeSpec::orthant(2);
    const Element r = scalar_calculus(orth, ScalarFn::Sqrt, vec_element(orth, {4, 9}));
    CHECK(r.blocks[0].v.isApprox(Eigen::Vector2d(2, 3)));

    const ConeSpec soc = ConeSpec::second_order(3);
    const Element inv = scalar_calculus(soc, ScalarFn::Inv, vec_element(soc, {3, 4, 0}));
    CHECK(inv.blocks[0].v(0) == doctest::Approx(-3.0 / 7.0));
    CHECK(inv.blocks[0].v(1) == doctest::Approx(4.0 / 7.0));
    CHECK(inv.blocks[0].v(2) == doctest::Approx(0.0));
    // inverse property: x o x^{-1} = e
    const Element prod = jordan_product(soc, vec_element(soc, {3, 4, 0}), inv);
    CHECK(norm(soc, sub(prod, identity(soc))) <= 1e-14);

    const ConeSpec psd = ConeSpec::psd(3);
    const Element logi = scalar_calculus(psd, ScalarFn::Log, identity(psd));
    CHECK(logi.blocks[0].m.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("scalar calculus domain errors")
{
    const ConeSpec orth = ConeSpec::orthant(2);
    CHECK_THROWS_AS(scalar_calculus(orth, ScalarFn::Sqrt, vec_element(orth, {-1, 1})),
                    DomainError);
    CHECK_THROWS_AS(scalar_calculus(orth, ScalarFn::Log, vec_element(orth, {0, 1})),
                    DomainError);
    CHECK_THROWS_AS(scalar_calculus(orth, ScalarFn::Inv, vec_element(orth, {0, 1})),
                    DomainError);
    // sqrt tolerates tiny negative eigenvalues
    const Element ok = scalar_calculus(orth, ScalarFn::Sqrt, vec_element(orth, {-1e-13, 4}));
    CHECK(ok.blocks[0].v(0) == 0.0);
}

TEST_CASE("determinant and interior tests")
{
    const ConeSpec soc = ConeSpec::second_order(3);
    CHECK(det(soc, vec_element(soc, {3, 4, 0})) == doctest::Approx(-7.0));
    CHECK_FALSE(in_interior(soc, vec_element(soc, {1, 1, 0})));

    const ConeSpec orth = ConeSpec::orthant(2);
    CHECK(det(orth, vec_element(orth, {2, 5})) == doctest::Approx(10.0));
    CHECK(in_interior(orth, vec_element(orth, {1e-300, 1})));

    for (const ConeSpec& cone : standard_cones()) {
        CHECK(in_interior(cone, identity(cone)));
        const Eigen::VectorXd dets = det_blocks(cone, identity(cone));
        for (int b = 0; b < dets.size(); ++b) CHECK(dets(b) == doctest::Approx(1.0));
    }
}

TEST_CASE("barrier fixed examples")
{
    const ConeSpec orth = ConeSpec::orthant(2);
    const Element x = vec_element(orth, {2, 4});
    CHECK(barrier_value(orth, x) == doctest::Approx(-std::log(8.0)));
    const Element g = barrier_gradient(orth, x);
    CHECK(g.blocks[0].v(0) == doctest::Approx(-0.5));
    CHECK(g.blocks[0].v(1) == doctest::Approx(-0.25));

    for (const ConeSpec& cone : standard_cones()) {
        CHECK(barrier_value(cone, identity(cone)) == doctest::Approx(0.0));
        const Element ge = barrier_gradient(cone, identity(cone));
        CHECK(norm(cone, add(ge, identity(cone))) <= 1e-13);
    }

    const ConeSpec psd = ConeSpec::psd(2);
    Element d = zero_element(psd);
    d.blocks[0].m << 1, 0, 0, std::exp(1.0);
    CHECK(barrier_value(psd, d) == doctest::Approx(-1.0));

    CHECK_THROWS_AS(barrier_value(orth, vec_element(orth, {1, -1})), DomainError);
    CHECK_THROWS_AS(barrier_gradient(orth, vec_element(orth, {1, 0})), DomainError);
}

TEST_CASE("hessian fixed example and inverse roundtrip")
{
    const ConeSpec orth = ConeSpec::orthant(2);
    const Element z = vec_element(orth, {1, 2});
    const Element h = vec_element(orth, {1, 1});
    const Element hz = hessian_apply(orth, z, h);
    CHECK(hz.blocks[0].v(0) == doctest::Approx(1.0));
    CHECK(hz.blocks[0].v(1) == doctest::Approx(0.25));
    const Element back = hessian_inv_apply(orth, z, hz);
    CHECK(back.blocks[0].v.isApprox(h.blocks[0].v, 1e-13));

    std::mt19937_64 gen(23);
    for (const ConeSpec& cone : standard_cones()) {
        for (int trial = 0; trial < 10; ++trial) {
            const Element zz = random_interior_element(cone, gen);
            const Element hh = random_element(cone, gen);
            const Element round =
                hessian_inv_apply(cone, zz, hessian_apply(cone, zz, hh));
            CHECK(norm(cone, sub(round, hh)) <= 1e-12 * (1.0 + norm(cone, hh)));
        }
    }
}

TEST_CASE("second-order hessian against dense 3x3 oracle")
{
    const ConeSpec soc = ConeSpec::second_order(3);
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Element z = random_interior_element(soc, gen);
        const Eigen::MatrixXd H =
            materialize(soc, [&](const Element& u) { return hessian_apply(soc, z, u); });
        const Eigen::MatrixXd Hinv = materialize(
            soc, [&](const Element& u) { return hessian_inv_apply(soc, z, u); });
        CHECK((H * Hinv - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-11);
        // Hessian at the identity element is the identity operator.
        const Eigen::MatrixXd He = materialize(
            soc, [&](const Element& u) { return hessian_apply(soc, identity(soc), u); });
        CHECK((He - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("barrier nu identity on random interior points")
{
    std::mt19937_64 gen(31);
    for (const ConeSpec& cone : standard_cones()) {
        for (int trial = 0; trial < 25; ++trial) {
            const Element z = random_interior_element(cone, gen);
            const Element g = barrier_gradient(cone, z);
            const double val = inner(cone, g, hessian_inv_apply(cone, z, g));
            CHECK(val == doctest::Approx(static_cast<double>(cone.rank())).epsilon(1e-10));
        }
    }
}

TEST_CASE("hessian symmetry and jordan inner-product compatibility")
{
    std::mt19937_64 gen(37);
    for (const ConeSpec& cone : standard_cones()) {
        for (int trial = 0; trial < 10; ++trial) {
            const Element z = random_interior_element(cone, gen);
            const Element h1 = random_element(cone, gen);
            const Element h2 = random_element(cone, gen);
            const double lhs = inner(cone, h1, hessian_apply(cone, z, h2));
            const double rhs = inner(cone, h2, hessian_apply(cone, z, h1));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));

            const Element w = random_element(cone, gen);
            const double a1 = inner(cone, jordan_product(cone, z, h1), w);
            const double a2 = inner(cone, h1, jordan_product(cone, z, w));
            CHECK(std::abs(a1 - a2) <= 1e-12 * (1.0 + std::abs(a1)));
        }
    }
}

TEST_CASE("barrier derivatives against finite differences")
{
    std::mt19937_64 gen(41);
    for (const ConeSpec& cone : standard_cones()) {
        const Element z = random_interior_element(cone, gen);
        const Element h = random_element(cone, gen, 0.1);
        const double step = 1e-5 * (1.0 + norm(cone, z));

        const double fd_dir = (barrier_value(cone, axpy(z, step, h)) -
                               barrier_value(cone, axpy(z, -step, h))) /
                              (2.0 * step);
        const double closed = inner(cone, barrier_gradient(cone, z), h);
        CHECK(fd_dir == doctest::Approx(closed).epsilon(1e-6));

        const Element fd_grad = scale(1.0 / (2.0 * step),
                                      sub(barrier_gradient(cone, axpy(z, step, h)),
                                          barrier_gradient(cone, axpy(z, -step, h))));
        const Element closed_h = hessian_apply(cone, z, h);
        CHECK(norm(cone, sub(fd_grad, closed_h)) <=
              1e-5 * (1.0 + norm(cone, closed_h)));
    }
}

TEST_CASE("orthant self-concordance spot check")
{
    std::mt19937_64 gen(43);
    const ConeSpec cone = ConeSpec::orthant(6);
    for (int trial = 0; trial < 50; ++trial) {
        const Element z = random_interior_element(cone, gen);
        const Element h = random_element(cone, gen);
        double d3 = 0.0;
        for (int i = 0; i < 6; ++i)
            d3 -= 2.0 * std::pow(h.blocks[0].v(i), 3) / std::pow(z.blocks[0].v(i), 3);
        const double d2 = inner(cone, h, hessian_apply(cone, z, h));
        CHECK(std::abs(d3) <= 2.0 * std::pow(d2, 1.5) * (1.0 + 1e-12));
    }
}

TEST_CASE("rank, identity, inner fixed examples")
{
    ConeSpec mix{{{BlockKind::Orthant, 3}, {BlockKind::SecondOrder, 4}}};
    CHECK(rank(mix) == 5);

    const ConeSpec q3 = ConeSpec::second_order(3);
    CHECK(identity(q3).blocks[0].v.isApprox(Eigen::Vector3d(1, 0, 0)));

    ConeSpec rp{{{BlockKind::Orthant, 2}, {BlockKind::Psd, 2}}};
    CHECK(inner(rp, identity(rp), identity(rp)) == doctest::Approx(4.0));

    // Trace normalization: <e, e> = rank on every cone.
    for (const ConeSpec& cone : standard_cones())
        CHECK(inner(cone, identity(cone), identity(cone)) ==
              doctest::Approx(static_cast<double>(cone.rank())));
}

TEST_CASE("coordinates round trip and metric weights")
{
    std::mt19937_64 gen(53);
    for (const ConeSpec& cone : standard_cones()) {
        const Element x = random_element(cone, gen);
        const Element y = random_element(cone, gen);
        CHECK(norm(cone, sub(from_coords(cone, to_coords(cone, x)), x)) <= 1e-15);
        // weighted coordinate dot realizes the ambient inner product
        const Eigen::VectorXd w = metric_weights(cone);
        const double via_coords =
            to_coords(cone, x).cwiseProduct(w).dot(to_coords(cone, y));
        CHECK(via_coords == doctest::Approx(inner(cone, x, y)).epsilon(1e-13));
        // riesz embedding represents the plain-coefficient functional
        const Eigen::VectorXd coeffs = to_coords(cone, y);
        const Element rep = riesz_element(cone, coeffs);
        CHECK(inner(cone, rep, x) == doctest::Approx(coeffs.dot(to_coords(cone, x))));
        CHECK(functional_coords(cone, rep).isApprox(coeffs));
    }
}

TEST_CASE("positive part clamps spectra")
{
    const ConeSpec soc = ConeSpec::second_order(3);
    const Element x = vec_element(soc, {3, 4, 0});  // eigenvalues 7, -1
    const Element p = positive_part(soc, x);
    const auto dec = spectral_decompose(soc, p);
    CHECK(dec[0].eigenvalues(0) == doctest::Approx(7.0));
    CHECK(dec[0].eigenvalues(1) == doctest::Approx(0.0));
}
