#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pwlab/constants.hpp"
#include "pwlab/decomposition.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/functions.hpp"
#include "pwlab/geometry.hpp"
#include "pwlab/quadrature.hpp"
#include "pwlab/rng.hpp"

// End-to-end inequality checks, the counterexample sweep for the naive
// modular inequality, and the empirical best-constant search.

namespace pwlab {

struct VerificationReport {
    std::string fixture;
    IntegralResult lhs;
    IntegralResult rhs;
    double constant = 0.0;
    double slack = 0.0; // constant * rhs - lhs
    bool pass = false;  // slack >= -(err_lhs + constant * err_rhs)
    std::uint64_t seed = 0;
};

inline VerificationReport make_report(std::string fixture, IntegralResult lhs,
                                      IntegralResult rhs, double constant, std::uint64_t seed) {
    VerificationReport r;
    r.fixture = std::move(fixture);
    r.lhs = lhs;
    r.rhs = rhs;
    r.constant = constant;
    r.slack = constant * rhs.value - lhs.value;
    r.pass = r.slack >= -(lhs.error + constant * rhs.error);
    r.seed = seed;
    return r;
}

// Main inequality on a chain domain: modular deviation vs C times the
// singular-kernel double integral.
inline VerificationReport verify_main(const Chain& chain, const VariableExponent& p,
                                      const TestFunction& f, const QuadratureSpec& q,
                                      std::string fixture = "main") {
    const ConstantsReport consts = constant_C(chain, p);
    const IntegralResult lhs = modular_lhs(f, p, chain.omega, q);
    const IntegralResult rhs = kernel_rhs(f, p, chain.omega, q);
    return make_report(std::move(fixture), lhs, rhs, consts.C, q.seed);
}

inline bool is_convex_domain(const Domain& d) {
    if (d.is_ball()) return true;
    if (d.is_polygon()) return d.polygon().is_convex();
    return false;
}

// Convex-domain inequality with the x-dependent diameter factor inside the
// outer integral and constant 1/|Omega|.
inline VerificationReport verify_convex(const Domain& omega, const VariableExponent& p,
                                        const TestFunction& f, const QuadratureSpec& q,
                                        std::string fixture = "convex") {
    if (!is_convex_domain(omega))
        throw NotConvex("verify_convex: domain is not convex");
    const int n = omega.dim();
    const double diam = omega.diameter();
    const IntegralResult lhs = modular_lhs(f, p, omega, q);
    auto weight = [&](const Point&, double px) {
        return std::pow(diam, n + px - 1.0) / (n + px - 1.0);
    };
    const IntegralResult rhs = kernel_rhs_weighted(f, p, omega, q, weight);
    return make_report(std::move(fixture), lhs, rhs, 1.0 / omega.measure(), q.seed);
}

// Classical constant-exponent inequality with C~ from the chain constants.
inline VerificationReport verify_classical(const Chain& chain, double p_const,
                                           const TestFunction& f, const QuadratureSpec& q,
                                           std::string fixture = "classical") {
    const ConstantsReport consts = constant_C(chain, VariableExponent::constant(p_const));
    const VariableExponent p = VariableExponent::constant(p_const);
    const IntegralResult lhs = modular_lhs(f, p, chain.omega, q);
    const IntegralResult rhs = classical_rhs(f, p_const, chain.omega, q);
    return make_report(std::move(fixture), lhs, rhs, consts.C_tilde, q.seed);
}

// Convenience overload: builds the one-piece chain for a ball or a polygon
// with non-empty kernel.
inline Chain implicit_chain(const Domain& omega, std::uint64_t seed = 0x5eedULL);

inline VerificationReport verify_classical(const Domain& omega, double p_const,
                                           const TestFunction& f, const QuadratureSpec& q,
                                           std::string fixture = "classical") {
    return verify_classical(implicit_chain(omega, q.seed), p_const, f, q, std::move(fixture));
}

// Morrey-type pointwise checks on a certified star piece: for x in the
// kernel the deviation integral runs over the body, for x outside the kernel
// it runs over the kernel.
inline std::vector<VerificationReport> morrey_check(const StarPiece& piece,
                                                    const VariableExponent& p,
                                                    const TestFunction& f, int x_samples,
                                                    const QuadratureSpec& q) {
    std::vector<VerificationReport> out;
    const Domain& body = piece.body;
    const Domain kernel_dom{Ball(piece.kernel.center, piece.kernel.radius)};
    const int n = body.dim();
    const double diam = body.diameter();

    Rng rng(sub_seed(q.seed, 0x3044ULL));
    const int n_kernel = std::max(1, x_samples / 2);
    const int n_outside = x_samples - n_kernel;

    auto check_at = [&](const Point& x, const Domain& lhs_domain, const char* tag, int index) {
        const double px = p.eval(x);
        const double fx = f.eval(x);
        auto h = [&](const Point& y) { return std::pow(std::abs(fx - f.eval(y)), px); };
        const IntegralResult lhs =
            integrate_single(h, lhs_domain, q, sub_seed(q.seed, 0x10f5ULL, static_cast<std::uint64_t>(index)));
        auto g = [&](const Point& z) { return std::pow(f.grad_norm(z), px); };
        QuadratureSpec qi = q;
        qi.inner_samples = detail_quad::clamp_budget(q.outer_samples * q.inner_samples, 1000, 2000000);
        const IntegralResult rhs = detail_quad::inner_kernel(
            g, body, x, qi, sub_seed(q.seed, 0x144e4ULL, static_cast<std::uint64_t>(index)));
        const double w = std::pow(diam, n + px - 1.0) / (n + px - 1.0);
        out.push_back(make_report(std::string(tag) + "#" + std::to_string(index), lhs, rhs, w, q.seed));
    };

    Point x;
    for (int i = 0; i < n_kernel; ++i) {
        sample_ball(piece.kernel, rng, x);
        check_at(x, body, "morrey-kernel", i);
    }
    for (int i = 0; i < n_outside; ++i) {
        bool found = false;
        for (int tries = 0; tries < 4096; ++tries) {
            sample_domain(body, rng, x);
            if (distance(x, piece.kernel.center) > piece.kernel.radius) {
                found = true;
                break;
            }
        }
        if (!found) break; // kernel nearly fills the body; variant (ii) is void
        check_at(x, kernel_dom, "morrey-outside", n_kernel + i);
    }
    return out;
}

// Star-shaped piece inequality: double modular vs alpha times the weighted
// kernel integral.
inline VerificationReport verify_starshaped(const StarPiece& piece, const VariableExponent& p,
                                            const TestFunction& f, const QuadratureSpec& q,
                                            std::string fixture = "starshaped") {
    const Domain& body = piece.body;
    const int n = body.dim();
    const double diam = body.diameter();
    const double pp = p.p_plus(body);
    const double alpha = alpha_constant(pp, piece.kernel, body);
    const IntegralResult lhs = double_modular(f, p, body, q);
    auto weight = [&](const Point&, double px) {
        return std::pow(diam, n + px - 1.0) / (n + px - 1.0);
    };
    const IntegralResult rhs = kernel_rhs_weighted(f, p, body, q, weight);
    return make_report(std::move(fixture), lhs, rhs, alpha, q.seed);
}

inline Chain implicit_chain(const Domain& omega, std::uint64_t seed) {
    if (omega.is_ball()) {
        const Ball& b = omega.ball();
        return single_piece_chain(omega, Ball(b.center, 0.5 * b.radius), 8, 64, seed);
    }
    if (omega.is_polygon()) {
        const std::optional<Ball> kb = kernel_ball(omega.polygon(), seed);
        if (!kb)
            throw InvalidGeometry(
                "implicit_chain: polygon has an empty kernel; decompose it first");
        return single_piece_chain(omega, *kb, 8, 64, seed);
    }
    throw InvalidGeometry("implicit_chain: union domains need an explicit chain");
}

// ---------------------------------------------------------------------------
// Counterexample sweep
// ---------------------------------------------------------------------------

struct SweepReport {
    std::vector<double> lambda_grid; // strictly decreasing
    std::vector<double> quotients;   // gradient modular / deviation modular over B_{1-alpha}
    std::vector<double> quotients_full_denominator; // denominator over all of Omega
    std::vector<double> kernel_quotients;           // kernel_rhs / modular_lhs
    double fitted_slope = 0.0;                      // log-log fit on the last 4 grid points
    double theoretical_exponent = 0.0;              // p(1) - p(1-alpha)
    double kernel_quotient_min = 0.0;
    double C = 0.0;
    bool monotone_decreasing = false;
    std::uint64_t seed = 0;
};

// Rayleigh-quotient sweep for f_lambda = lambda * bump(alpha, k) on
// Omega = B_{1+alpha}. The denominator of the classical quotient is taken
// over B_{1-alpha} (the conservative reading); the full-domain denominator is
// recorded alongside.
inline SweepReport counterexample_sweep(double alpha, const VariableExponent& profile,
                                        std::vector<double> lambda_grid,
                                        const QuadratureSpec& q, int bump_order = 3) {
    if (lambda_grid.size() < 4)
        throw GridTooCoarse("counterexample_sweep: need at least 4 lambda values");
    std::sort(lambda_grid.begin(), lambda_grid.end(), std::greater<double>());
    lambda_grid.erase(std::unique(lambda_grid.begin(), lambda_grid.end()), lambda_grid.end());
    if (lambda_grid.size() < 4)
        throw GridTooCoarse("counterexample_sweep: need at least 4 distinct lambda values");
    for (double l : lambda_grid)
        if (!(l > 0.0) || !(l < 1.0))
            throw InvalidGeometry("counterexample_sweep: lambda values must lie in (0,1)");
    if (!profile.is_radial() && !profile.is_constant())
        throw InvalidGeometry("counterexample_sweep: exponent must be radial or constant");

    const Point origin(0.0, 0.0);
    const Domain omega{Ball(origin, 1.0 + alpha)};
    const Domain inner_ball{Ball(origin, 1.0 - alpha)};
    const Chain chain = single_piece_chain(omega, Ball(origin, 0.5 * (1.0 + alpha)), 8, 64, q.seed);
    const ConstantsReport consts = constant_C(chain, profile);
    const TestFunction eta = bump(alpha, bump_order);

    SweepReport rep;
    rep.lambda_grid = lambda_grid;
    rep.C = consts.C;
    rep.seed = q.seed;
    rep.theoretical_exponent =
        profile.eval(Point(1.0, 0.0)) - profile.eval(Point(1.0 - alpha, 0.0));

    for (double lambda : lambda_grid) {
        const TestFunction f = scaled(lambda, eta);
        const double mean = mean_value(f, omega, q).value;
        const IntegralResult num = gradient_modular(f, profile, omega, q);
        const IntegralResult den_inner = modular_deviation(f, profile, inner_ball, mean, q, 0xde11ULL);
        const IntegralResult den_full = modular_deviation(f, profile, omega, mean, q, 0xdefULL);
        const IntegralResult kr = kernel_rhs(f, profile, omega, q);
        rep.quotients.push_back(num.value / den_inner.value);
        rep.quotients_full_denominator.push_back(num.value / den_full.value);
        rep.kernel_quotients.push_back(kr.value / den_full.value);
    }

    rep.monotone_decreasing = true;
    for (std::size_t i = 0; i + 1 < rep.quotients.size(); ++i)
        if (!(rep.quotients[i + 1] < rep.quotients[i])) rep.monotone_decreasing = false;

    // least-squares slope of log(quotient) vs log(lambda) on the last 4 points
    const std::size_t n_fit = 4;
    const std::size_t first = rep.quotients.size() - n_fit;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = first; i < rep.quotients.size(); ++i) {
        const double x = std::log(rep.lambda_grid[i]);
        const double y = std::log(rep.quotients[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.fitted_slope = (n_fit * sxy - sx * sy) / (n_fit * sxx - sx * sx);

    rep.kernel_quotient_min = *std::min_element(rep.kernel_quotients.begin(),
                                                rep.kernel_quotients.end());
    return rep;
}

// ---------------------------------------------------------------------------
// Empirical best constant
// ---------------------------------------------------------------------------

namespace detail_opt {

// Plain Nelder-Mead minimization with an evaluation cap.
template <class F>
std::pair<std::vector<double>, double> nelder_mead(F&& f, std::vector<double> start, double step,
                                                   long max_evals, long& evals_used) {
    const std::size_t d = start.size();
    std::vector<std::vector<double>> simplex(d + 1, start);
    std::vector<double> value(d + 1);
    for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += step;
    long evals = 0;
    for (std::size_t i = 0; i <= d; ++i) {
        value[i] = f(simplex[i]);
        ++evals;
    }

    auto order = [&]() {
        std::vector<std::size_t> idx(d + 1);
        for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> v2;
        for (std::size_t i : idx) {
            s2.push_back(simplex[i]);
            v2.push_back(value[i]);
        }
        simplex = std::move(s2);
        value = std::move(v2);
    };

    while (evals < max_evals) {
        order();
        // convergence on simplex spread
        double spread = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            spread = std::max(spread, std::abs(simplex.back()[i] - simplex.front()[i]));
        if (spread < 1e-7 * (1.0 + std::abs(simplex.front()[0]))) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(d);

        auto combine = [&](double t) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j)
                x[j] = centroid[j] + t * (simplex.back()[j] - centroid[j]);
            return x;
        };

        std::vector<double> xr = combine(-1.0);
        const double fr = f(xr);
        ++evals;
        if (fr < value.front()) {
            std::vector<double> xe = combine(-2.0);
            const double fe = f(xe);
            ++evals;
            if (fe < fr) {
                simplex.back() = xe;
                value.back() = fe;
            } else {
                simplex.back() = xr;
                value.back() = fr;
            }
        } else if (fr < value[d - 1]) {
            simplex.back() = xr;
            value.back() = fr;
        } else {
            std::vector<double> xc = combine(0.5);
            const double fc = f(xc);
            ++evals;
            if (fc < value.back()) {
                simplex.back() = xc;
                value.back() = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t j = 0; j < d; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    value[i] = f(simplex[i]);
                    ++evals;
                    if (evals >= max_evals) break;
                }
            }
        }
    }
    order();
    evals_used += evals;
    return {simplex.front(), value.front()};
}

} // namespace detail_opt

struct OptimizeResult {
    double ratio = 0.0;
    std::vector<double> coefficients;
    long evaluations = 0;
    bool budget_exhausted = false;
};

// Maximizes modular_lhs / kernel_rhs over coefficient vectors of the basis by
// staged Nelder-Mead: stage k optimizes the first k coefficients starting
// from the stage k-1 optimum, so nested prefix families are monotone by
// construction under the same seed schedule. Returns the largest ratio found,
// an empirical lower bound for the optimal constant.
inline OptimizeResult empirical_best_constant(const Chain& chain, const VariableExponent& p,
                                              const std::vector<TestFunction>& basis, long budget,
                                              const QuadratureSpec& q) {
    if (basis.empty()) throw InvalidGeometry("empirical_best_constant: empty basis");
    const std::size_t dims = basis.size();
    const long stage_budget = std::max<long>(budget / static_cast<long>(dims), 8);

    OptimizeResult out;
    long evals = 0;

    auto ratio_of = [&](const std::vector<double>& c) {
        double scale = 0.0;
        for (double ci : c) scale = std::max(scale, std::abs(ci));
        if (scale < 1e-12) return 0.0;
        const TestFunction f = linear_combination(c, basis);
        const IntegralResult lhs = modular_lhs(f, p, chain.omega, q);
        const IntegralResult rhs = kernel_rhs(f, p, chain.omega, q);
        if (!(rhs.value > 1e-300)) return 0.0;
        return lhs.value / rhs.value;
    };

    std::vector<double> best_c;
    for (std::size_t k = 1; k <= dims; ++k) {
        if (evals >= budget) {
            out.budget_exhausted = true;
            break;
        }
        std::vector<double> warm(best_c);
        warm.resize(k, 0.0);
        if (k == 1 || warm == std::vector<double>(k, 0.0)) warm[k - 1] = 1.0;
        std::vector<double> fresh(k, 0.0);
        fresh[k - 1] = 1.0;

        const long per_start = std::max<long>(stage_budget / 2, 4);
        for (const std::vector<double>& start : {warm, fresh}) {
            auto neg = [&](const std::vector<double>& c) { return -ratio_of(c); };
            auto [x, v] = detail_opt::nelder_mead(neg, start, 0.5, per_start, evals);
            if (-v > out.ratio) {
                out.ratio = -v;
                best_c = x;
                best_c.resize(dims, 0.0);
                out.coefficients = best_c;
                best_c.resize(k);
            }
            if (evals >= budget && k < dims) {
                out.budget_exhausted = true;
                break;
            }
        }
        if (out.budget_exhausted) break;
        best_c = out.coefficients;
        best_c.resize(k);
    }
    out.evaluations = evals;
    if (out.coefficients.empty()) out.coefficients.assign(dims, 0.0);
    out.coefficients.resize(dims, 0.0);
    return out;
}

} // namespace pwlab
