// Numeric kernel for disc-algebra elements represented as truncated
// Taylor polynomials: ring arithmetic, boundary sampling, argument-principle
// zero counting, and certified reciprocal / logarithm / square root /
// exponential on the coefficient vector.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace discfactor {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

// Boundary winding count cannot be trusted (modulus too close to zero
// relative to the accumulated truncation tail, or refinement exhausted).
struct UncertifiableError : Error {
    using Error::Error;
};

struct ContractError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

// Grid evidence backing a "unit of the disc algebra" claim: winding 0 on the
// boundary plus a positive lower bound for the boundary modulus.
struct Certificate {
    int winding = 0;
    double min_boundary_modulus = 0.0;
    double max_boundary_modulus = 0.0;
    std::size_t grid_size = 0;

    bool unit(double floor) const {
        return winding == 0 && min_boundary_modulus > floor;
    }
};

struct NotAUnitError : Error {
    Certificate certificate;
    NotAUnitError(const std::string& what, Certificate cert)
        : Error(what), certificate(cert) {}
};

// ---------------------------------------------------------------------------
// Settings
// ---------------------------------------------------------------------------

struct Settings {
    std::size_t order = 256;    // working truncation order (coefficient count)
    std::size_t grid = 4096;    // boundary sample count
    double unit_floor = 1e-8;   // minimal certified boundary modulus
    double det_tol = 1e-10;     // sup |det - 1| budget for SL2 inputs
    unsigned seed = 20240817;   // interior sampling / search seed
    std::size_t residual_boundary = 256;  // points for stored pipeline residuals
    std::size_t residual_interior = 64;
};

// ---------------------------------------------------------------------------
// DiscFunction
// ---------------------------------------------------------------------------

// A disc-algebra element as the Taylor polynomial c0 + c1 z + ... at 0.
// trunc_order == coeffs.size() by construction. `tail` accumulates the l1
// mass discarded by retruncations plus measured residuals of iterative
// constructions; it is reporting metadata, not a rigorous bound.
struct DiscFunction {
    std::vector<Complex> coeffs;
    double tail = 0.0;

    // Optional boundary cache: values at the grid-th roots of unity.
    std::shared_ptr<const std::vector<Complex>> boundary;
    std::size_t boundary_grid = 0;

    DiscFunction() : coeffs(1, Complex(0.0)) {}
    explicit DiscFunction(Complex c) : coeffs(1, c) {}
    explicit DiscFunction(double c) : coeffs(1, Complex(c)) {}
    explicit DiscFunction(std::vector<Complex> c) : coeffs(std::move(c)) {
        if (coeffs.empty()) coeffs.assign(1, Complex(0.0));
    }

    std::size_t order() const { return coeffs.size(); }
    Complex at(std::size_t k) const {
        return k < coeffs.size() ? coeffs[k] : Complex(0.0);
    }
};

inline DiscFunction monomial(std::size_t degree, Complex c = Complex(1.0)) {
    std::vector<Complex> v(degree + 1, Complex(0.0));
    v[degree] = c;
    return DiscFunction(std::move(v));
}

inline double l1_norm(const DiscFunction& f) {
    double s = 0.0;
    for (const auto& c : f.coeffs) s += std::abs(c);
    return s;
}

inline DiscFunction truncate(const DiscFunction& f, std::size_t n) {
    if (n == 0) n = 1;
    if (f.order() <= n) return f;
    DiscFunction g;
    g.coeffs.assign(f.coeffs.begin(), f.coeffs.begin() + static_cast<long>(n));
    g.tail = f.tail;
    for (std::size_t k = n; k < f.order(); ++k) g.tail += std::abs(f.coeffs[k]);
    return g;
}

// ---------------------------------------------------------------------------
// Evaluation and boundary sampling
// ---------------------------------------------------------------------------

inline Complex eval(const DiscFunction& f, Complex z) {
    if (std::abs(z) > 1.0 + 1e-12)
        throw DomainError("eval: point outside the closed unit disc");
    Complex acc(0.0);
    for (std::size_t k = f.order(); k-- > 0;) acc = acc * z + f.coeffs[k];
    return acc;
}

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT, a.size() a power of two.
inline void fft(std::vector<Complex>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len);
        const Complex wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                Complex u = a[i + k];
                Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Inverse FFT of boundary samples at a power-of-two grid; keeps the first
// n Taylor coefficients and reports the boundary sup of the dropped bins
// (an estimate of truncation plus aliasing error). The sup is measured by
// transforming the dropped bins back to the grid: an l1 bound would
// overstate noise-like dropped mass by roughly the square root of the bin
// count.
inline std::vector<Complex> coeffs_from_boundary(std::vector<Complex> s,
                                                 std::size_t n,
                                                 double* dropped = nullptr) {
    const std::size_t m = s.size();
    for (auto& v : s) v = std::conj(v);
    fft(s);
    for (std::size_t k = 0; k < m; ++k)
        s[k] = std::conj(s[k]) / static_cast<double>(m);
    if (dropped) {
        *dropped = 0.0;
        if (n < m) {
            std::vector<Complex> rest(m, Complex(0.0));
            for (std::size_t k = n; k < m; ++k) rest[k] = s[k];
            fft(rest);
            for (const auto& v : rest)
                *dropped = std::max(*dropped, std::abs(v));
        }
    }
    s.resize(std::max<std::size_t>(n, 1), Complex(0.0));
    return s;
}

// Smallest power-of-two grid that oversamples the working order (at least
// 2x), reusing the configured grid when it already qualifies.
inline std::size_t pow2_grid(std::size_t grid, std::size_t order) {
    std::size_t m = 256;
    while (m < 2 * order) m <<= 1;
    if (is_pow2(grid) && grid >= m) return grid;
    return m;
}

}  // namespace detail

// Values of f at the m-th roots of unity e^{2*pi*i*k/m}, k = 0..m-1.
// Uses an FFT when m is a power of two covering the coefficient vector,
// Horner evaluation otherwise.
inline std::vector<Complex> boundary_samples(const DiscFunction& f,
                                             std::size_t m) {
    if (m < 2) throw DomainError("boundary_samples: grid must be >= 2");
    if (f.boundary && f.boundary_grid == m) return *f.boundary;
    std::vector<Complex> out;
    if (detail::is_pow2(m) && f.order() <= m) {
        out = f.coeffs;
        out.resize(m, Complex(0.0));
        detail::fft(out);
    } else {
        out.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double th = 2.0 * kPi * static_cast<double>(k) /
                              static_cast<double>(m);
            out[k] = eval(f, Complex(std::cos(th), std::sin(th)));
        }
    }
    return out;
}

// Populate the boundary cache (m >= 2 * order keeps the samples lossless
// in the sense that the coefficients stay recoverable from them).
inline void prime_boundary(DiscFunction& f, std::size_t m) {
    f.boundary =
        std::make_shared<const std::vector<Complex>>(boundary_samples(f, m));
    f.boundary_grid = m;
}

// Recomputable invariant: cached samples match direct evaluation.
inline bool boundary_cache_consistent(const DiscFunction& f,
                                      double rel_tol = 1e-13) {
    if (!f.boundary) return true;
    double scale = std::max(1.0, l1_norm(f));
    for (std::size_t k = 0; k < f.boundary_grid; k += 1 + f.boundary_grid / 64) {
        const double th = 2.0 * kPi * static_cast<double>(k) /
                          static_cast<double>(f.boundary_grid);
        Complex direct = eval(f, Complex(std::cos(th), std::sin(th)));
        if (std::abs(direct - (*f.boundary)[k]) > rel_tol * scale) return false;
    }
    return true;
}

// Grid min and max of |f| over the boundary; by the maximum principle the
// sup is a disc sup for holomorphic f, up to grid resolution.
inline std::pair<double, double> boundary_extrema(const DiscFunction& f,
                                                  std::size_t grid) {
    auto s = boundary_samples(f, grid);
    double lo = std::abs(s[0]), hi = lo;
    for (const auto& v : s) {
        const double a = std::abs(v);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Ring operations
// ---------------------------------------------------------------------------

inline DiscFunction operator+(const DiscFunction& f, const DiscFunction& g) {
    DiscFunction h;
    h.coeffs.assign(std::max(f.order(), g.order()), Complex(0.0));
    for (std::size_t k = 0; k < h.order(); ++k) h.coeffs[k] = f.at(k) + g.at(k);
    h.tail = f.tail + g.tail;
    return h;
}

inline DiscFunction operator-(const DiscFunction& f, const DiscFunction& g) {
    DiscFunction h;
    h.coeffs.assign(std::max(f.order(), g.order()), Complex(0.0));
    for (std::size_t k = 0; k < h.order(); ++k) h.coeffs[k] = f.at(k) - g.at(k);
    h.tail = f.tail + g.tail;
    return h;
}

inline DiscFunction operator-(const DiscFunction& f) {
    DiscFunction h = f;
    for (auto& c : h.coeffs) c = -c;
    return h;
}

inline DiscFunction operator*(const DiscFunction& f, Complex s) {
    DiscFunction h = f;
    h.boundary.reset();
    h.boundary_grid = 0;
    for (auto& c : h.coeffs) c *= s;
    h.tail *= std::abs(s);
    return h;
}

inline DiscFunction operator*(Complex s, const DiscFunction& f) { return f * s; }
inline DiscFunction operator*(const DiscFunction& f, double s) {
    return f * Complex(s);
}
inline DiscFunction operator*(double s, const DiscFunction& f) {
    return f * Complex(s);
}

// Full convolution truncated to max_order coefficients (0 = keep everything).
inline DiscFunction mul_trunc(const DiscFunction& f, const DiscFunction& g,
                              std::size_t max_order = 0) {
    const std::size_t full = f.order() + g.order() - 1;
    const std::size_t n = (max_order == 0) ? full : std::min(full, max_order);
    DiscFunction h;
    h.coeffs.assign(n, Complex(0.0));
    double discarded = 0.0;
    for (std::size_t i = 0; i < f.order(); ++i) {
        if (f.coeffs[i] == Complex(0.0)) continue;
        for (std::size_t j = 0; j < g.order(); ++j) {
            const Complex t = f.coeffs[i] * g.coeffs[j];
            if (i + j < n)
                h.coeffs[i + j] += t;
            else
                discarded += std::abs(t);
        }
    }
    // propagate accumulated error estimates with boundary sups rather than
    // l1 masses: the l1 norm overestimates the sup by the dynamic range of
    // the function, which makes long pipelines reject certifiable units
    if (f.tail > 0.0 || g.tail > 0.0) {
        auto sup64 = [](const DiscFunction& x) {
            double hi = 0.0;
            for (int k = 0; k < 64; ++k) {
                const double th = 2.0 * kPi * k / 64.0;
                Complex acc(0.0);
                const Complex z(std::cos(th), std::sin(th));
                for (std::size_t j = x.order(); j-- > 0;)
                    acc = acc * z + x.coeffs[j];
                hi = std::max(hi, std::abs(acc));
            }
            return hi;
        };
        h.tail = f.tail * (sup64(g) + g.tail) + g.tail * sup64(f) + discarded;
    } else {
        h.tail = discarded;
    }
    return h;
}

inline DiscFunction operator*(const DiscFunction& f, const DiscFunction& g) {
    return mul_trunc(f, g, 0);
}

inline DiscFunction derivative(const DiscFunction& f) {
    DiscFunction h;
    h.coeffs.assign(std::max<std::size_t>(f.order() - 1, 1), Complex(0.0));
    for (std::size_t k = 1; k < f.order(); ++k)
        h.coeffs[k - 1] = static_cast<double>(k) * f.coeffs[k];
    h.tail = f.tail;  // not meaningful for derivatives; kept for propagation
    return h;
}

inline DiscFunction antiderivative(const DiscFunction& f) {
    DiscFunction h;
    h.coeffs.assign(f.order() + 1, Complex(0.0));
    for (std::size_t k = 0; k < f.order(); ++k)
        h.coeffs[k + 1] = f.coeffs[k] / static_cast<double>(k + 1);
    h.tail = f.tail;
    return h;
}

// ---------------------------------------------------------------------------
// Winding number and unit certification
// ---------------------------------------------------------------------------

namespace detail {

inline double arg_step(const DiscFunction& f, double th0, double th1,
                       Complex v0, Complex v1, double floor, int depth) {
    const double d = std::arg(v1 / v0);
    if (std::abs(d) <= 1.0) return d;
    if (depth >= 40)
        throw UncertifiableError(
            "winding_number: argument step refinement exhausted");
    const double tm = 0.5 * (th0 + th1);
    const Complex vm = eval(f, Complex(std::cos(tm), std::sin(tm)));
    if (std::abs(vm) <= floor)
        throw UncertifiableError(
            "winding_number: boundary modulus below threshold during "
            "refinement");
    return arg_step(f, th0, tm, v0, vm, floor, depth + 1) +
           arg_step(f, tm, th1, vm, v1, floor, depth + 1);
}

}  // namespace detail

// Total change of continuous argument of f along the sampled unit circle
// divided by 2*pi. Equals the number of zeros of f in the open disc for
// polynomial f without boundary zeros. Segments with a large phase step are
// bisected until each step is resolved.
inline int winding_number(const DiscFunction& f, std::size_t grid) {
    auto s = boundary_samples(f, grid);
    double lo = std::abs(s[0]);
    for (const auto& v : s) lo = std::min(lo, std::abs(v));
    const double floor = std::max(10.0 * f.tail, 1e-300);
    if (lo <= floor)
        throw UncertifiableError(
            "winding_number: boundary modulus " + std::to_string(lo) +
            " below certification threshold " + std::to_string(floor));
    double total = 0.0;
    for (std::size_t k = 0; k < grid; ++k) {
        const std::size_t k1 = (k + 1) % grid;
        const double th0 = 2.0 * kPi * static_cast<double>(k) /
                           static_cast<double>(grid);
        const double th1 = 2.0 * kPi * static_cast<double>(k + 1) /
                           static_cast<double>(grid);
        total += detail::arg_step(f, th0, th1, s[k], s[k1], floor, 0);
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

// Bundles winding and boundary extrema. A passing certificate (winding 0,
// min modulus above the floor) is this artifact's notion of "unit".
inline Certificate unit_certificate(const DiscFunction& f, std::size_t grid) {
    Certificate cert;
    cert.grid_size = grid;
    auto [lo, hi] = boundary_extrema(f, grid);
    cert.min_boundary_modulus = lo;
    cert.max_boundary_modulus = hi;
    if (lo > std::max(10.0 * f.tail, 1e-300))
        cert.winding = winding_number(f, grid);
    else
        cert.winding = -1;  // uncertifiable; never reads as a unit with lo ~ 0
    return cert;
}

inline Certificate require_unit(const DiscFunction& f, const Settings& st,
                                const char* who) {
    Certificate cert = unit_certificate(f, st.grid);
    if (!cert.unit(std::max(st.unit_floor, 10.0 * f.tail)))
        throw NotAUnitError(std::string(who) + ": operand is not a certified "
                            "unit of the disc algebra (winding " +
                            std::to_string(cert.winding) + ", min modulus " +
                            std::to_string(cert.min_boundary_modulus) + ")",
                            cert);
    return cert;
}

// ---------------------------------------------------------------------------
// Reciprocal, logarithm, square root, exponential
// ---------------------------------------------------------------------------

// Reciprocal of a certified unit. Two candidates are computed: the Newton
// iteration g <- g(2 - f g) in coefficient space (exact formal arithmetic,
// but its rounding scales with the l1 masses involved) and the pointwise
// boundary reciprocal transformed back by an inverse FFT (rounding scales
// with the sup of 1/f). The candidate with the smaller measured boundary
// residual wins; the residual is recorded in the tail.
inline DiscFunction invert(const DiscFunction& f, const Settings& st) {
    require_unit(f, st, "invert");
    const std::size_t n = std::max(st.order, std::size_t(1));
    const std::size_t m = detail::pow2_grid(st.grid, n);
    auto sf = boundary_samples(f, m);

    auto measure = [&](const DiscFunction& g) {
        auto sg = boundary_samples(g, m);
        double r = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            r = std::max(r, std::abs(sf[k] * sg[k] - Complex(1.0)));
        return r;
    };

    DiscFunction gn(Complex(1.0) / f.coeffs[0]);
    std::size_t w = 1;
    while (w < n) {
        w = std::min(2 * w, n);
        DiscFunction fg = mul_trunc(truncate(f, w), gn, w);
        gn = mul_trunc(gn, DiscFunction(Complex(2.0)) - fg, w);
    }
    gn.tail = 0.0;
    const double rn = measure(gn);

    std::vector<Complex> sg(m);
    for (std::size_t k = 0; k < m; ++k) sg[k] = Complex(1.0) / sf[k];
    DiscFunction gg(detail::coeffs_from_boundary(std::move(sg), n));
    const double rg = measure(gg);

    DiscFunction out = (rg < rn) ? std::move(gg) : std::move(gn);
    out.tail = f.tail + std::min(rn, rg);
    return out;
}

// exp(f) via the coefficient recurrence for g' = f' g, g(0) = exp(c0).
inline DiscFunction exp_series(const DiscFunction& f, const Settings& st) {
    const std::size_t n = std::max(st.order, f.order());
    DiscFunction g;
    g.coeffs.assign(n, Complex(0.0));
    g.coeffs[0] = std::exp(f.coeffs[0]);
    for (std::size_t k = 1; k < n; ++k) {
        Complex acc(0.0);
        const std::size_t jmax = std::min(k, f.order() - 1);
        for (std::size_t j = 1; j <= jmax; ++j)
            acc += static_cast<double>(j) * f.coeffs[j] * g.coeffs[k - j];
        g.coeffs[k] = acc / static_cast<double>(k);
    }
    g.tail = f.tail * std::exp(f.tail);  // first-order propagation only
    return g;
}

// Logarithm of a certified unit, normalized to the principal logarithm of
// the constant term. Two candidates: the antiderivative of f'/f, and the
// phase-unwrapped boundary logarithm transformed back by an inverse FFT
// (the certified winding 0 guarantees a continuous branch exists). The
// candidate whose pointwise exponential matches f better wins; that
// residual is folded into the tail record.
inline DiscFunction holomorphic_log(const DiscFunction& f, const Settings& st) {
    require_unit(f, st, "holomorphic_log");
    const std::size_t n = std::max(st.order, std::size_t(2));
    const std::size_t m = detail::pow2_grid(st.grid, n);
    auto sf = boundary_samples(f, m);

    auto measure = [&](const DiscFunction& g) {
        auto sg = boundary_samples(g, m);
        double r = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            r = std::max(r, std::abs(std::exp(sg[k]) - sf[k]));
        return r;
    };

    DiscFunction fi = invert(f, st);
    DiscFunction q = mul_trunc(derivative(truncate(f, n)), fi, n - 1);
    DiscFunction ga = truncate(antiderivative(q), n);
    ga.coeffs[0] = std::log(f.coeffs[0]);
    ga.tail = 0.0;
    double ra = measure(ga);

    std::vector<Complex> u(m);
    double theta = std::arg(sf[0]);
    u[0] = Complex(std::log(std::abs(sf[0])), theta);
    bool unwrap_ok = true;
    for (std::size_t k = 1; k < m; ++k) {
        const double step = std::arg(sf[k] / sf[k - 1]);
        if (std::abs(step) > 2.5) unwrap_ok = false;
        theta += step;
        u[k] = Complex(std::log(std::abs(sf[k])), theta);
    }
    if (std::abs(theta + std::arg(sf[0] / sf[m - 1]) - std::arg(sf[0])) > 1.0)
        unwrap_ok = false;  // the branch failed to close up

    double rg = std::numeric_limits<double>::infinity();
    DiscFunction gg;
    if (unwrap_ok) {
        gg = DiscFunction(detail::coeffs_from_boundary(std::move(u), n));
        const double turns = std::round(
            (gg.coeffs[0].imag() - std::log(f.coeffs[0]).imag()) /
            (2.0 * kPi));
        gg.coeffs[0] -= Complex(0.0, 2.0 * kPi * turns);
        rg = measure(gg);
    }

    DiscFunction out = (rg < ra) ? std::move(gg) : std::move(ga);
    out.tail = f.tail + std::min(ra, rg);
    return out;
}

// Principal square root of a certified unit: exp(log(f)/2), with the
// exponential taken either as a series or pointwise on the boundary,
// whichever squares back to f more accurately.
inline DiscFunction holomorphic_sqrt(const DiscFunction& f,
                                     const Settings& st) {
    require_unit(f, st, "holomorphic_sqrt");
    const std::size_t n = std::max(st.order, std::size_t(2));
    const std::size_t m = detail::pow2_grid(st.grid, n);
    auto sf = boundary_samples(f, m);

    auto measure = [&](const DiscFunction& r) {
        auto sr = boundary_samples(r, m);
        double worst = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            worst = std::max(worst, std::abs(sr[k] * sr[k] - sf[k]));
        return worst;
    };

    DiscFunction g = holomorphic_log(f, st);
    DiscFunction ra = exp_series(g * 0.5, st);
    ra.tail = 0.0;
    const double wa = measure(ra);

    auto sg = boundary_samples(g, m);
    std::vector<Complex> sr(m);
    for (std::size_t k = 0; k < m; ++k) sr[k] = std::exp(0.5 * sg[k]);
    DiscFunction rg(detail::coeffs_from_boundary(std::move(sr), n));
    const double wg = measure(rg);

    DiscFunction out = (wg < wa) ? std::move(rg) : std::move(ra);
    out.tail = f.tail + std::min(wa, wg);
    return out;
}

// Alternative exponential via Newton iteration on the logarithm,
// g <- g (1 + f - log g). Cross-checked against exp_series in tests.
inline DiscFunction exp_series_newton(const DiscFunction& f,
                                      const Settings& st) {
    const std::size_t n = std::max(st.order, f.order());
    DiscFunction g(std::exp(f.coeffs[0]));
    std::size_t m = 1;
    while (m < n) {
        m = std::min(2 * m, n);
        // log of the current iterate, order m (g is a unit by construction:
        // nonzero constant term and correct lower-order coefficients).
        DiscFunction gm = truncate(g, m);
        Settings stm = st;
        stm.order = m;
        DiscFunction gi = invert(gm, stm);
        DiscFunction lg = antiderivative(mul_trunc(derivative(gm), gi, m - 1));
        lg = truncate(lg, m);
        lg.coeffs[0] = std::log(gm.coeffs[0]);
        DiscFunction corr =
            DiscFunction(Complex(1.0)) + truncate(f, m) - lg;
        g = mul_trunc(gm, corr, m);
        // intermediate iterates are our own construction; their boundary
        // residuals are quadratically squashed by the next step, so the
        // pessimistic tail bookkeeping above does not apply to them
        g.tail = 0.0;
    }
    g.tail = f.tail * std::exp(f.tail);
    return g;
}

}  // namespace discfactor
