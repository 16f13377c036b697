#include "support.hpp"

#include "doctest.h"

using namespace discfactor;
using namespace testsupport;

namespace {
Settings small_settings() {
    Settings st;
    st.order = 64;
    st.grid = 1024;
    return st;
}

MatFun shear_upper(const DiscFunction& p) {
    return MatFun{DiscFunction(1.0), p, DiscFunction(0.0), DiscFunction(1.0)};
}
}  // namespace

TEST_CASE("mat_mul: identity, shear cancellation, pointwise oracle") {
    std::mt19937_64 rng(5);
    MatFun m = random_shear_product(rng, 4, 3, 0.8);
    MatFun mi = mat_mul(m, MatFun::identity());
    CHECK(boundary_distance(m, mi, 128) < 1e-14);

    DiscFunction z = monomial(1);
    MatFun cancel = mat_mul(shear_upper(z), shear_upper(-z));
    CHECK(boundary_distance(cancel, MatFun::identity(), 128) < 1e-15);

    MatFun a = random_shear_product(rng, 4, 3, 0.8);
    MatFun b = random_shear_product(rng, 4, 3, 0.8);
    MatFun ab = mat_mul(a, b);
    for (int k = 0; k < 64; ++k) {
        const double th = 2.0 * kPi * k / 64.0;
        const Complex zk(std::cos(th), std::sin(th));
        const PointMatrix diff = eval(ab, zk) - eval(a, zk) * eval(b, zk);
        CHECK(frobenius(diff) <= 1e-12 * std::max(1.0, frobenius(eval(ab, zk))));
    }
}

TEST_CASE("det_trace: identity, rotation generator, unipotent shear") {
    auto [d1, t1] = det_trace(MatFun::identity());
    CHECK(std::abs(d1.at(0) - Complex(1.0)) == 0.0);
    CHECK(std::abs(t1.at(0) - Complex(2.0)) == 0.0);

    MatFun rot{DiscFunction(0.0), DiscFunction(1.0), DiscFunction(-1.0),
               DiscFunction(0.0)};
    auto [d2, t2] = det_trace(rot);
    CHECK(std::abs(d2.at(0) - Complex(1.0)) == 0.0);
    CHECK(std::abs(t2.at(0)) == 0.0);

    std::mt19937_64 rng(6);
    MatFun sh = shear_upper(random_poly(rng, 5));
    auto [d3, t3] = det_trace(sh);
    CHECK(std::abs(d3.at(0) - Complex(1.0)) < 1e-15);
    for (std::size_t k = 1; k < d3.order(); ++k) CHECK(std::abs(d3.at(k)) == 0.0);
    CHECK(std::abs(t3.at(0) - Complex(2.0)) < 1e-15);
}

TEST_CASE("mat_inverse: identity, shear, and residual on a random unit") {
    Settings st = small_settings();
    MatFun i_inv = mat_inverse(MatFun::identity(), st);
    CHECK(boundary_distance(i_inv, MatFun::identity(), 128) < 1e-14);

    std::mt19937_64 rng(8);
    DiscFunction h = random_poly(rng, 4);
    MatFun e = shear_upper(h);
    MatFun e_inv = mat_inverse(e, st);
    CHECK(boundary_distance(e_inv, shear_upper(-h), 256) < 1e-12);

    // random matrix with certified-unit determinant
    MatFun p{random_unit(rng, 6), random_poly(rng, 6) * 0.1,
             random_poly(rng, 6) * 0.1, random_unit(rng, 6)};
    MatFun pi = mat_inverse(p, st);
    MatFun prod = mat_mul(p, pi, st.order);
    CHECK(boundary_distance(prod, MatFun::identity(), st.grid) <= 1e-10);

    MatFun sing{monomial(1), DiscFunction(0.0), DiscFunction(0.0),
                monomial(1)};
    CHECK_THROWS_AS(mat_inverse(sing, st), NotInvertibleError);
}

TEST_CASE("exp_traceless: zero, diagonal, quarter rotation") {
    Settings st = small_settings();
    MatFun ez = exp_traceless(MatFun::zero(), st);
    CHECK(boundary_distance(ez, MatFun::identity(), 128) < 1e-14);

    const Complex t(0.7, 0.3);
    MatFun diag = MatFun::diagonal(t, -t);
    MatFun ed = exp_traceless(diag, st);
    CHECK(std::abs(eval(ed.a, Complex(0.5)) - std::exp(t)) < 1e-13);
    CHECK(std::abs(eval(ed.d, Complex(0.5)) - std::exp(-t)) < 1e-13);

    MatFun rot{DiscFunction(0.0), DiscFunction(kPi / 2.0),
               DiscFunction(-kPi / 2.0), DiscFunction(0.0)};
    MatFun er = exp_traceless(rot, st);
    MatFun expect{DiscFunction(0.0), DiscFunction(1.0), DiscFunction(-1.0),
                  DiscFunction(0.0)};
    CHECK(boundary_distance(er, expect, 128) < 1e-13);

    CHECK_THROWS_AS(exp_traceless(MatFun::identity(), st), ContractError);
}

TEST_CASE("exp_pointwise: identity, diagonal, traceless closed form") {
    PointMatrix e0 = exp_pointwise(PointMatrix{});
    CHECK(frobenius(e0 - PointMatrix::identity()) < 1e-15);

    PointMatrix d{1.0, 0.0, 0.0, -1.0};
    PointMatrix ed = exp_pointwise(d);
    CHECK(std::abs(ed.a - std::exp(1.0)) < 1e-14);
    CHECK(std::abs(ed.d - std::exp(-1.0)) < 1e-15);

    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        PointMatrix m = random_traceless_det1(rng, 3.0);
        // closed form: s = -det = 1, exp(m) = cos(1) I + sin(1) m ... with
        // det m = 1: m^2 = -I, so exp(t m) = cos(t) I + sin(t) m at t = 1
        PointMatrix expect = Complex(std::cos(1.0)) * PointMatrix::identity() +
                             Complex(std::sin(1.0)) * m;
        CHECK(frobenius(exp_pointwise(m) - expect) < 1e-12);
    }
}

TEST_CASE("exp_traceless agrees with the pointwise oracle on the boundary") {
    // order 256: the entire series for cosh/sinh of these masses has
    // fully decayed well before the truncation degree
    Settings st = small_settings();
    st.order = 256;
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        DiscFunction u = random_poly(rng, 8, 0.25);
        DiscFunction v = random_poly(rng, 8, 0.25);
        DiscFunction w = random_poly(rng, 8, 0.25);
        MatFun m{u, v, w, -u};
        MatFun em = exp_traceless(m, st);

        auto [dt, tr] = det_trace(em, st.order);
        (void)tr;
        double det_defect = 0.0;
        for (const auto& s : boundary_samples(dt, 512))
            det_defect = std::max(det_defect, std::abs(s - Complex(1.0)));
        CHECK(det_defect <= 1e-10);

        for (int k = 0; k < 64; ++k) {
            const double th = 2.0 * kPi * k / 64.0;
            const Complex z(std::cos(th), std::sin(th));
            CHECK(frobenius(eval(em, z) - exp_pointwise(eval(m, z))) <= 1e-11);
        }
    }
}

TEST_CASE("Cayley-Hamilton on truncations: M^2 = -I for traceless det-1") {
    Settings st = small_settings();
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        // build a traceless det-1 MatFun: [[u, v], [w, -u]] with
        // w = -(1 + u^2) / v for a unit v
        DiscFunction u = random_poly(rng, 4, 0.4);
        DiscFunction v = random_unit(rng, 4);
        DiscFunction num =
            -(DiscFunction(1.0) + mul_trunc(u, u, st.order));
        DiscFunction w = mul_trunc(num, invert(v, st), st.order);
        MatFun m{u, v, w, -u};
        MatFun m2 = mat_mul(m, m, st.order);
        MatFun minus_i = mat_scale(MatFun::identity(), Complex(-1.0));
        CHECK(boundary_distance(m2, minus_i, 512) <= 1e-10);
    }
}

TEST_CASE("conjugation preserves trace and det, and commutes with exp") {
    Settings st = small_settings();
    std::mt19937_64 rng(15);
    MatFun m = random_shear_product(rng, 3, 3, 0.5, false);
    MatFun p{random_unit(rng, 3), random_poly(rng, 3) * 0.1,
             random_poly(rng, 3) * 0.1, random_unit(rng, 3)};

    MatFun c = conjugate(m, MatFun::identity(), st);
    CHECK(boundary_distance(c, m, 128) < 1e-12);

    MatFun cm = conjugate(m, p, st);
    auto [dm, tm] = det_trace(m, st.order);
    auto [dc, tc] = det_trace(cm, st.order);
    double worst = 0.0;
    for (std::size_t k = 0; k < st.order; ++k) {
        worst = std::max(worst, std::abs(tm.at(k) - tc.at(k)));
        worst = std::max(worst, std::abs(dm.at(k) - dc.at(k)));
    }
    CHECK(worst <= 1e-10 * std::max(1.0, l1_norm(tm) + l1_norm(dm)));

    // exp(Ad_P N) = Ad_P exp(N)
    DiscFunction u = random_poly(rng, 4, 0.4);
    DiscFunction v = random_poly(rng, 4, 0.4);
    DiscFunction w = random_poly(rng, 4, 0.4);
    MatFun n{u, v, w, -u};
    MatFun lhs = conjugate(exp_traceless(n, st), p, st);
    MatFun rhs = exp_traceless(traceless_part(conjugate(n, p, st)), st);
    CHECK(boundary_distance(lhs, rhs, 256) <= 1e-9);
}
