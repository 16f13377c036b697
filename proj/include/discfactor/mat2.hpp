// 2x2 matrices over DiscFunction: ring operations, determinant/trace,
// adjugate inversion, the closed-form exponential of traceless matrices via
// the entire functions cosh(sqrt(s)) and sinh(sqrt(s))/sqrt(s), and a
// pointwise scaling-and-squaring matrix exponential used as an independent
// oracle.
#pragma once

#include "discfactor/holofun.hpp"

#include <array>

namespace discfactor {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct MatFun {
    DiscFunction a, b, c, d;  // row-major entries

    static MatFun identity() {
        return MatFun{DiscFunction(1.0), DiscFunction(0.0), DiscFunction(0.0),
                      DiscFunction(1.0)};
    }
    static MatFun zero() { return MatFun{}; }
    static MatFun diagonal(Complex top, Complex bottom) {
        return MatFun{DiscFunction(top), DiscFunction(0.0), DiscFunction(0.0),
                      DiscFunction(bottom)};
    }
};

struct PointMatrix {
    Complex a{0.0}, b{0.0}, c{0.0}, d{0.0};

    static PointMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

// ---------------------------------------------------------------------------
// Pointwise helpers
// ---------------------------------------------------------------------------

inline PointMatrix operator*(const PointMatrix& x, const PointMatrix& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline PointMatrix operator+(const PointMatrix& x, const PointMatrix& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

inline PointMatrix operator-(const PointMatrix& x, const PointMatrix& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
}

inline PointMatrix operator*(Complex s, const PointMatrix& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
}

inline Complex det(const PointMatrix& x) { return x.a * x.d - x.b * x.c; }
inline Complex trace(const PointMatrix& x) { return x.a + x.d; }

inline PointMatrix inverse(const PointMatrix& x) {
    const Complex dt = det(x);
    if (std::abs(dt) == 0.0)
        throw DomainError("inverse: singular constant matrix");
    const Complex s = Complex(1.0) / dt;
    return {s * x.d, -s * x.b, -s * x.c, s * x.a};
}

inline double frobenius(const PointMatrix& x) {
    return std::sqrt(std::norm(x.a) + std::norm(x.b) + std::norm(x.c) +
                     std::norm(x.d));
}

inline PointMatrix eval(const MatFun& m, Complex z) {
    return {eval(m.a, z), eval(m.b, z), eval(m.c, z), eval(m.d, z)};
}

// ---------------------------------------------------------------------------
// Matrix ring operations
// ---------------------------------------------------------------------------

inline MatFun mat_add(const MatFun& m, const MatFun& n) {
    return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
}

inline MatFun mat_sub(const MatFun& m, const MatFun& n) {
    return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
}

inline MatFun mat_scale(const MatFun& m, Complex s) {
    return {m.a * s, m.b * s, m.c * s, m.d * s};
}

inline MatFun mat_scale(const MatFun& m, const DiscFunction& s,
                        std::size_t order = 0) {
    return {mul_trunc(m.a, s, order), mul_trunc(m.b, s, order),
            mul_trunc(m.c, s, order), mul_trunc(m.d, s, order)};
}

// Entry-wise convolution product, truncated to `order` coefficients
// (0 = exact).
inline MatFun mat_mul(const MatFun& m, const MatFun& n, std::size_t order = 0) {
    return {mul_trunc(m.a, n.a, order) + mul_trunc(m.b, n.c, order),
            mul_trunc(m.a, n.b, order) + mul_trunc(m.b, n.d, order),
            mul_trunc(m.c, n.a, order) + mul_trunc(m.d, n.c, order),
            mul_trunc(m.c, n.b, order) + mul_trunc(m.d, n.d, order)};
}

inline std::pair<DiscFunction, DiscFunction> det_trace(const MatFun& m,
                                                       std::size_t order = 0) {
    return {mul_trunc(m.a, m.d, order) - mul_trunc(m.b, m.c, order),
            m.a + m.d};
}

inline MatFun mat_truncate(const MatFun& m, std::size_t n) {
    return {truncate(m.a, n), truncate(m.b, n), truncate(m.c, n),
            truncate(m.d, n)};
}

// Max coefficient modulus of the trace; the "traceless tag" check.
inline double traceless_defect(const MatFun& m) {
    DiscFunction t = m.a + m.d;
    double worst = 0.0;
    for (const auto& c : t.coeffs) worst = std::max(worst, std::abs(c));
    return worst;
}

inline void require_traceless(const MatFun& m, const char* who,
                              double tol = 1e-12) {
    const double defect = traceless_defect(m);
    if (defect > tol)
        throw ContractError(std::string(who) +
                            ": matrix fails the traceless check (max trace "
                            "coefficient " + std::to_string(defect) + ")");
}

// Projects onto the traceless subspace (subtracts half the trace from the
// diagonal). Used after conjugation chains whose trace is zero analytically
// but carries roundoff.
inline MatFun traceless_part(const MatFun& m) {
    DiscFunction anew = (m.a - m.d) * 0.5;
    return {anew, m.b, m.c, -anew};  // trace is exactly zero by construction
}

// Boundary sup of ||M(z) - N(z)||_F over the grid's roots of unity.
inline double boundary_distance(const MatFun& m, const MatFun& n,
                                std::size_t grid) {
    auto sa = boundary_samples(m.a, grid), sb = boundary_samples(m.b, grid);
    auto sc = boundary_samples(m.c, grid), sd = boundary_samples(m.d, grid);
    auto ta = boundary_samples(n.a, grid), tb = boundary_samples(n.b, grid);
    auto tc = boundary_samples(n.c, grid), td = boundary_samples(n.d, grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid; ++k) {
        const double r = std::sqrt(
            std::norm(sa[k] - ta[k]) + std::norm(sb[k] - tb[k]) +
            std::norm(sc[k] - tc[k]) + std::norm(sd[k] - td[k]));
        worst = std::max(worst, r);
    }
    return worst;
}

struct NotInvertibleError : Error {
    Certificate certificate;
    NotInvertibleError(const std::string& what, Certificate cert)
        : Error(what), certificate(cert) {}
};

// Adjugate divided by the determinant; requires a certified-unit det.
inline MatFun mat_inverse(const MatFun& m, const Settings& st) {
    auto [dt, tr] = det_trace(m, st.order);
    (void)tr;
    Certificate cert = unit_certificate(dt, st.grid);
    if (!cert.unit(std::max(st.unit_floor, 10.0 * dt.tail)))
        throw NotInvertibleError(
            "mat_inverse: determinant is not a certified unit", cert);
    DiscFunction di = invert(dt, st);
    return {mul_trunc(m.d, di, st.order), mul_trunc(-m.b, di, st.order),
            mul_trunc(-m.c, di, st.order), mul_trunc(m.a, di, st.order)};
}

// P M P^{-1}. Trace and determinant are similarity invariants, preserved to
// truncation tolerance.
inline MatFun conjugate(const MatFun& m, const MatFun& p, const Settings& st) {
    return mat_mul(mat_mul(p, m, st.order), mat_inverse(p, st), st.order);
}

// ---------------------------------------------------------------------------
// Exponentials
// ---------------------------------------------------------------------------

namespace detail {

// Entire series sum_k s^k / (2k + shift)! composed with the DiscFunction s
// by Horner. Number of terms chosen from the factorial-decay tail bound at
// the boundary sup of s.
inline DiscFunction even_entire_series(const DiscFunction& s, int shift,
                                       const Settings& st) {
    auto [lo, hi] = boundary_extrema(s, std::min<std::size_t>(st.grid, 512));
    (void)lo;
    const double sup = hi + s.tail;
    // coefficients 1/(2k+shift)!
    std::vector<double> coef;
    double fact = (shift == 0) ? 1.0 : 1.0;  // 0! and 1! are both 1
    coef.push_back(1.0 / fact);
    double term = 1.0;
    for (std::size_t k = 1; k < 400; ++k) {
        const double a = 2.0 * static_cast<double>(k) - 1.0 +
                         static_cast<double>(shift);
        const double b = 2.0 * static_cast<double>(k) +
                         static_cast<double>(shift);
        fact *= a * b;
        coef.push_back(1.0 / fact);
        term = std::pow(std::max(sup, 1.0), static_cast<double>(k)) / fact;
        if (term < 1e-16 * std::cosh(std::sqrt(std::max(sup, 1.0))) &&
            static_cast<double>(k) > std::sqrt(sup))
            break;
    }
    DiscFunction acc(Complex(coef.back()));
    for (std::size_t k = coef.size() - 1; k-- > 0;) {
        acc = mul_trunc(acc, s, st.order);
        acc = acc + DiscFunction(Complex(coef[k]));
    }
    return acc;
}

}  // namespace detail

// exp(M) for traceless M via Cayley-Hamilton: M^2 = -det(M) I, so
// exp(M) = C(s) I + S(s) M with s = -det(M), C = cosh(sqrt(s)),
// S = sinh(sqrt(s))/sqrt(s), both entire in s.
inline MatFun exp_traceless(const MatFun& m, const Settings& st,
                            double trace_tol = 1e-12) {
    require_traceless(m, "exp_traceless", trace_tol);
    auto [dt, tr] = det_trace(m, st.order);
    (void)tr;
    DiscFunction s = -dt;
    DiscFunction C = detail::even_entire_series(s, 0, st);  // cosh(sqrt s)
    DiscFunction S = detail::even_entire_series(s, 1, st);  // sinh(sqrt s)/sqrt s
    return {C + mul_trunc(S, m.a, st.order), mul_trunc(S, m.b, st.order),
            mul_trunc(S, m.c, st.order), C + mul_trunc(S, m.d, st.order)};
}

// Numeric matrix exponential of a constant 2x2 matrix by scaling and
// squaring with the diagonal Pade approximant of order [8/8]. Deliberately
// does not use the traceless closed form, so it can serve as an independent
// verification oracle.
inline PointMatrix exp_pointwise(const PointMatrix& x) {
    double norm1 = std::max(std::abs(x.a) + std::abs(x.c),
                            std::abs(x.b) + std::abs(x.d));
    int squarings = 0;
    while (norm1 > 0.5 && squarings < 60) {
        norm1 *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    const PointMatrix a = Complex(scale) * x;

    // Pade [8/8] coefficients b_k = (16-k)! 8! / (16! k! (8-k)!)
    std::array<double, 9> b{};
    b[0] = 1.0;
    for (int k = 1; k <= 8; ++k)
        b[static_cast<std::size_t>(k)] =
            b[static_cast<std::size_t>(k - 1)] *
            static_cast<double>(8 - k + 1) /
            (static_cast<double>(16 - k + 1) * static_cast<double>(k));

    const PointMatrix a2 = a * a;
    const PointMatrix a4 = a2 * a2;
    const PointMatrix a6 = a4 * a2;
    const PointMatrix a8 = a6 * a2;
    const PointMatrix id = PointMatrix::identity();
    // even part u, odd part a*v of the numerator
    PointMatrix u = Complex(b[0]) * id + Complex(b[2]) * a2 +
                    Complex(b[4]) * a4 + Complex(b[6]) * a6 +
                    Complex(b[8]) * a8;
    PointMatrix v = Complex(b[1]) * id + Complex(b[3]) * a2 +
                    Complex(b[5]) * a4 + Complex(b[7]) * a6;
    const PointMatrix av = a * v;
    const PointMatrix num = u + av;
    const PointMatrix den = u - av;
    PointMatrix r = inverse(den) * num;
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

}  // namespace discfactor
