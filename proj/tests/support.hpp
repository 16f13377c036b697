// Test-only oracles and corpus builders. Everything here is independent of
// the implementation paths it checks: direct convolution, closed-form
// series, root counts known by construction, and seeded random corpora.
#pragma once

#include "discfactor/factor.hpp"

#include <random>

namespace testsupport {

using namespace discfactor;

// Direct O(n^2) convolution oracle for ring multiplication.
inline std::vector<Complex> convolve_direct(const std::vector<Complex>& f,
                                            const std::vector<Complex>& g) {
    std::vector<Complex> out(f.size() + g.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) out[i + j] += f[i] * g[j];
    return out;
}

inline Complex random_in_disc(std::mt19937_64& rng, double radius = 1.0) {
    std::uniform_real_distribution<double> box(-radius, radius);
    for (;;) {
        Complex z(box(rng), box(rng));
        if (std::abs(z) <= radius) return z;
    }
}

inline DiscFunction random_poly(std::mt19937_64& rng, std::size_t degree,
                                double coeff_radius = 1.0) {
    std::vector<Complex> cs(degree + 1);
    for (auto& c : cs) c = random_in_disc(rng, coeff_radius);
    return DiscFunction(std::move(cs));
}

// Monic polynomial with prescribed roots; the interior root count is the
// winding-number oracle.
inline DiscFunction poly_from_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> cs{Complex(1.0)};
    for (const Complex& r : roots) {
        std::vector<Complex> next(cs.size() + 1, Complex(0.0));
        for (std::size_t k = 0; k < cs.size(); ++k) {
            next[k + 1] += cs[k];
            next[k] -= r * cs[k];
        }
        cs = std::move(next);
    }
    return DiscFunction(std::move(cs));
}

// Random certified unit: a polynomial whose roots all sit at modulus
// >= rho_min outside the closed disc, so 1/f, log f, sqrt f all have
// Taylor coefficients decaying like rho_min^{-n}. Pick rho_min so that
// rho_min^{-order} is far below the tolerance under test. The result is
// normalized to O(1) coefficients: absolute tolerances on round trips are
// only meaningful when the data is scaled to unit size (for a degree-16
// draw with roots near modulus 3 the raw coefficients reach 1e8, which
// would drown any fixed absolute tolerance in representation noise).
inline DiscFunction random_unit(std::mt19937_64& rng, std::size_t degree,
                                double rho_min = 1.5) {
    std::uniform_int_distribution<int> count(1, static_cast<int>(degree));
    std::uniform_real_distribution<double> modulus(rho_min, rho_min + 2.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::vector<Complex> roots(count(rng));
    for (auto& r : roots)
        r = modulus(rng) * std::exp(Complex(0.0, phase(rng)));
    std::uniform_real_distribution<double> cmod(0.5, 2.0);
    DiscFunction f = poly_from_roots(roots);
    double peak = 0.0;
    for (const Complex& c : f.coeffs) peak = std::max(peak, std::abs(c));
    return f * (cmod(rng) * std::exp(Complex(0.0, phase(rng))) / peak);
}

// Exact-det-1 matrices as products of upper/lower shears with random
// polynomial off-diagonal entries. Parabolic draws are rejected so the
// generic pipeline is what gets exercised.
inline MatFun random_shear_product(std::mt19937_64& rng, int max_shears = 6,
                                   std::size_t degree = 4,
                                   double coeff_radius = 1.0,
                                   bool reject_parabolic = true) {
    std::uniform_int_distribution<int> nshears(2, max_shears);
    std::uniform_int_distribution<int> coin(0, 1);
    for (;;) {
        MatFun m = MatFun::identity();
        const int n = nshears(rng);
        for (int i = 0; i < n; ++i) {
            DiscFunction p = random_poly(rng, degree, coeff_radius);
            MatFun s = coin(rng) ? MatFun{DiscFunction(1.0), p,
                                          DiscFunction(0.0), DiscFunction(1.0)}
                                 : MatFun{DiscFunction(1.0), DiscFunction(0.0),
                                          p, DiscFunction(1.0)};
            m = mat_mul(m, s);
        }
        if (!reject_parabolic || detect_parabolic(m) == ParabolicSign::none)
            return m;
    }
}

// Random constant traceless matrix with det 1 and all entries of modulus
// at most `bound` (so B^2 = -I).
inline PointMatrix random_traceless_det1(std::mt19937_64& rng,
                                         double bound = 3.0) {
    for (;;) {
        const Complex u = random_in_disc(rng, bound);
        const Complex v = random_in_disc(rng, bound);
        if (std::abs(v) < 1e-3) continue;
        const Complex w = -(Complex(1.0) + u * u) / v;
        if (std::abs(w) <= bound) return PointMatrix{u, v, w, -u};
    }
}

// Random constant SL2(C) matrix (product of constant shears).
inline PointMatrix random_sl2_point(std::mt19937_64& rng) {
    PointMatrix m = PointMatrix::identity();
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < 4; ++i) {
        const Complex p = random_in_disc(rng, 2.0);
        PointMatrix s = coin(rng) ? PointMatrix{1.0, p, 0.0, 1.0}
                                  : PointMatrix{1.0, 0.0, p, 1.0};
        m = m * s;
    }
    return m;
}

// Taylor truncation of exp(4 pi i z) to the given degree.
inline DiscFunction exp_4pi_i_truncation(std::size_t degree) {
    std::vector<Complex> cs(degree + 1);
    Complex term(1.0);
    const Complex rate(0.0, 4.0 * kPi);
    cs[0] = term;
    for (std::size_t k = 1; k <= degree; ++k) {
        term *= rate / static_cast<double>(k);
        cs[k] = term;
    }
    return DiscFunction(std::move(cs));
}

// The sharpness fixture [[1, 1], [0, exp(4 pi i z)]].
inline MatFun sharpness_fixture(std::size_t degree = 60) {
    return MatFun{DiscFunction(1.0), DiscFunction(1.0), DiscFunction(0.0),
                  exp_4pi_i_truncation(degree)};
}

// DiscFunction with certified boundary inf |t| > 2: rotated dominant
// constant plus an l1-controlled perturbation.
inline DiscFunction random_large_trace(std::mt19937_64& rng,
                                       std::size_t degree = 8) {
    std::uniform_real_distribution<double> kdist(3.0, 6.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const double k = kdist(rng);
    DiscFunction p = random_poly(rng, degree);
    double mass = 0.0;
    for (std::size_t j = 1; j < p.order(); ++j) mass += std::abs(p.coeffs[j]);
    const double scale = (mass > 0.0) ? 0.8 * (k - 2.2) / mass : 0.0;
    DiscFunction t = p * scale;
    t.coeffs[0] = Complex(k);
    return t * std::exp(Complex(0.0, phase(rng)));
}

}  // namespace testsupport
