// Independent certification of factorizations: pointwise residual
// evaluation against the scaling-and-squaring exponential oracle,
// traceless/determinant defect checks, and the report record consumed by
// the CLI. The verifier never calls exp_traceless, so its agreement with
// the pipeline is evidence rather than tautology.
#pragma once

#include "discfactor/mat2.hpp"

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace discfactor {

struct Report {
    double residual_sup = 0.0;
    std::vector<std::pair<Complex, double>> residual_grid;  // (z, residual)
    double traceless_defect = 0.0;  // max trace coefficient of both factors
    double det_defect = 0.0;        // boundary sup |det(input) - 1|
    std::vector<Certificate> certificates;
    std::string branch;
    std::map<std::string, double> timings;  // seconds per stage
};

inline double traceless_check(const MatFun& m) { return traceless_defect(m); }

// Re-exported here because every "is a unit" claim in the pipeline is
// certified through this bundle.
inline Certificate certify_unit(const DiscFunction& f, std::size_t grid) {
    return unit_certificate(f, grid);
}

// Sample points: `boundary_pts` roots of unity followed by `interior_pts`
// pseudo-random points with |z| <= 0.99 (seeded; boundary-truncation
// artifacts would otherwise be double counted at |z| = 1).
inline std::vector<Complex> residual_sample_points(std::size_t boundary_pts,
                                                   std::size_t interior_pts,
                                                   unsigned seed) {
    std::vector<Complex> pts;
    pts.reserve(boundary_pts + interior_pts);
    for (std::size_t k = 0; k < boundary_pts; ++k) {
        const double th = 2.0 * kPi * static_cast<double>(k) /
                          static_cast<double>(boundary_pts);
        pts.emplace_back(std::cos(th), std::sin(th));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    while (pts.size() < boundary_pts + interior_pts) {
        const Complex z(unit(rng), unit(rng));
        if (std::abs(z) <= 0.99) pts.push_back(z);
    }
    return pts;
}

// Frobenius residual of exp(m1(z)) exp(m2(z)) - A(z) over the sample set,
// exponentiated with the pointwise oracle.
inline Report residual_report(const MatFun& a, const MatFun& m1,
                              const MatFun& m2, std::size_t boundary_pts,
                              std::size_t interior_pts, unsigned seed) {
    Report rep;
    auto pts = residual_sample_points(boundary_pts, interior_pts, seed);
    rep.residual_grid.reserve(pts.size());
    for (const Complex& z : pts) {
        const PointMatrix lhs =
            exp_pointwise(eval(m1, z)) * exp_pointwise(eval(m2, z));
        const double r = frobenius(lhs - eval(a, z));
        rep.residual_grid.emplace_back(z, r);
        rep.residual_sup = std::max(rep.residual_sup, r);
    }
    rep.traceless_defect =
        std::max(traceless_check(m1), traceless_check(m2));
    auto [dt, tr] = det_trace(a);
    (void)tr;
    double dd = 0.0;
    auto s = boundary_samples(dt, std::max<std::size_t>(boundary_pts, 64));
    for (const auto& v : s) dd = std::max(dd, std::abs(v - Complex(1.0)));
    rep.det_defect = dd;
    return rep;
}

inline double max_residual(const MatFun& a, const MatFun& m1,
                           const MatFun& m2, std::size_t boundary_pts,
                           std::size_t interior_pts, unsigned seed) {
    double worst = 0.0;
    for (const Complex& z :
         residual_sample_points(boundary_pts, interior_pts, seed)) {
        const PointMatrix lhs =
            exp_pointwise(eval(m1, z)) * exp_pointwise(eval(m2, z));
        worst = std::max(worst, frobenius(lhs - eval(a, z)));
    }
    return worst;
}

}  // namespace discfactor
