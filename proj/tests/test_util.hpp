#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "pwlab/constants.hpp"
#include "pwlab/decomposition.hpp"
#include "pwlab/functions.hpp"
#include "pwlab/geometry.hpp"
#include "pwlab/quadrature.hpp"
#include "pwlab/verifier.hpp"

// Shared fixtures for the test suites.

namespace fixtures {

using namespace pwlab;

inline constexpr std::uint64_t kSeed = 0x5eedc0deULL;
inline constexpr double kPi = std::numbers::pi;

inline Domain unit_disk() { return Domain(Ball(Point(0.0, 0.0), 1.0)); }

inline Polygon2D unit_square_poly() {
    return Polygon2D({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

inline Domain unit_square() { return Domain(unit_square_poly()); }

// L-shaped hexagon: [0,2]x[0,1] union [0,1]x[0,2].
inline Polygon2D l_hexagon() {
    return Polygon2D({{0.0, 0.0}, {2.0, 0.0}, {2.0, 1.0}, {1.0, 1.0}, {1.0, 2.0}, {0.0, 2.0}});
}

// U-shaped octagon: [0,3]x[0,3] minus the notch (1,2)x(1,3].
inline Polygon2D u_polygon() {
    return Polygon2D({{0.0, 0.0},
                      {3.0, 0.0},
                      {3.0, 3.0},
                      {2.0, 3.0},
                      {2.0, 1.0},
                      {1.0, 1.0},
                      {1.0, 3.0},
                      {0.0, 3.0}});
}

// Small quadrature specs for unit tests (acceptance uses bigger ones).
inline QuadratureSpec quick_spec() {
    QuadratureSpec q;
    q.outer_samples = 1200;
    q.inner_samples = 160;
    q.seed = kSeed;
    return q;
}

inline QuadratureSpec medium_spec() {
    QuadratureSpec q;
    q.outer_samples = 4000;
    q.inner_samples = 320;
    q.seed = kSeed;
    return q;
}

inline Chain disk_chain(double body_radius = 1.0, double kernel_radius = 0.5) {
    return single_piece_chain(Domain(Ball(Point(0.0, 0.0), body_radius)),
                              Ball(Point(0.0, 0.0), kernel_radius), 8, 64, kSeed);
}

// Three unit disks in a row with half-radius kernels; prefix overlaps are
// exact lens areas.
inline Chain three_disk_chain(double spacing = 1.5) {
    std::vector<StarPiece> pieces;
    for (int i = 0; i < 3; ++i) {
        const Point c(spacing * i, 0.0);
        Domain body(Ball(c, 1.0));
        Ball kernel(c, 0.5);
        const StarCheckResult chk = check_starshaped(body, kernel, 6, 48, 16, kSeed + i);
        pieces.push_back(StarPiece{std::move(body), std::move(kernel), chk.certificate});
    }
    return order_chain(std::move(pieces), 40000, kSeed);
}

inline Chain l_chain() {
    DecompositionParams params;
    params.target_pieces = 2;
    params.min_kernel_radius_fraction = 0.02;
    params.mc_budget = 40000;
    params.seed = kSeed;
    return decompose(l_hexagon(), params);
}

inline VariableExponent exp_const2() { return VariableExponent::constant(2.0); }

// p(x) = 1 + |x|
inline VariableExponent exp_radial() {
    RadialProfile prof;
    prof.r = {0.0, 16.0};
    prof.p = {1.0, 17.0};
    return VariableExponent::radial(Point(0.0, 0.0), std::move(prof));
}

// 1.2 on the left half (big rectangle x <= 0), default 3.0
inline VariableExponent exp_piecewise() {
    Polygon2D left({{-8.0, -8.0}, {0.0, -8.0}, {0.0, 8.0}, {-8.0, 8.0}});
    std::vector<std::pair<Domain, double>> regions;
    regions.emplace_back(Domain(std::move(left)), 1.2);
    return VariableExponent::piecewise(std::move(regions), 3.0);
}

inline TestFunction f_linear_x() { return make_polynomial({{1.0, {1, 0}}}); }
inline TestFunction f_linear_y() { return make_polynomial({{1.0, {0, 1}}}); }
inline TestFunction f_quadratic() {
    return make_polynomial({{1.0, {2, 0}}, {0.5, {0, 1}}});
}
inline TestFunction f_trig() {
    return make_trig({{0.8, {1.1, 0.3}, 0.4}, {0.5, {-0.4, 0.9}, 1.3}});
}
inline TestFunction f_bump() { return scaled(0.7, bump(0.5, 3)); }

inline std::vector<TestFunction> suite_functions() {
    return {f_linear_x(), f_quadratic(), f_trig(), f_bump()};
}

} // namespace fixtures
