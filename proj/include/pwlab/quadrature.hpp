#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "pwlab/errors.hpp"
#include "pwlab/functions.hpp"
#include "pwlab/geometry.hpp"
#include "pwlab/rng.hpp"

// Integration of means, modulars, the weakly singular double integral and the
// Newton potential over the domain variants, for n in {1,2,3}.
//
// Budget convention: single integrals spend outer_samples * inner_samples
// evaluations; double integrals place outer_samples outer nodes with
// inner_samples evaluations each, so both spend the same total budget.

namespace pwlab {

enum class QuadMethod { MonteCarlo, StratifiedMC, TensorGaussOnCells };
enum class SingularRule { PolarLocal, DuffySplit };

struct QuadratureSpec {
    QuadMethod method = QuadMethod::StratifiedMC;
    long outer_samples = 8000;
    long inner_samples = 400;
    SingularRule singular = SingularRule::PolarLocal;
    double singular_radius_fraction = 1.0;
    std::uint64_t seed = 0x5eedf00dULL;
    double target_rel_tol = 0.01;

    void validate() const {
        if (outer_samples <= 0 || inner_samples <= 0)
            throw InvalidGeometry("QuadratureSpec: sample counts must be positive");
        if (!(target_rel_tol > 0.0) || !(target_rel_tol < 1.0))
            throw InvalidGeometry("QuadratureSpec: tolerance must lie in (0,1)");
        if (!(singular_radius_fraction > 0.0))
            throw InvalidGeometry("QuadratureSpec: singular radius fraction must be positive");
    }
};

struct IntegralResult {
    double value = 0.0;
    double error = 0.0; // standard error (MC) or Richardson-style estimate
    long samples = 0;
};

namespace detail_quad {

// 4-point Gauss-Legendre rule on [0,1].
inline constexpr double kGaussNode[4] = {
    0.5 - 0.4305681557970263, 0.5 - 0.16999052179242813,
    0.5 + 0.16999052179242813, 0.5 + 0.4305681557970263};
inline constexpr double kGaussWeight[4] = {
    0.5 * 0.3478548451374538, 0.5 * 0.6521451548625461,
    0.5 * 0.6521451548625461, 0.5 * 0.3478548451374538};

inline long clamp_budget(long n, long lo = 1000, long hi = 50000000) {
    return std::clamp(n, lo, hi);
}

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    long n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        const double m = mean();
        return std::max(0.0, sum_sq / static_cast<double>(n) - m * m);
    }
    double std_error() const {
        return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

// direct-sampling Monte Carlo: |d| * mean(h)
template <class H>
IntegralResult mc_single(H&& h, const Domain& d, long n, std::uint64_t seed) {
    Rng rng(seed);
    Accumulator acc;
    Point x;
    for (long i = 0; i < n; ++i) {
        sample_domain(d, rng, x);
        acc.add(h(static_cast<const Point&>(x)));
    }
    IntegralResult r;
    r.value = d.measure() * acc.mean();
    r.error = d.measure() * acc.std_error() + d.measure_std_error() * std::abs(acc.mean());
    r.samples = n;
    return r;
}

inline int strata_per_axis(long budget, int n, long min_per_stratum) {
    const double s = std::pow(static_cast<double>(budget) / static_cast<double>(min_per_stratum),
                              1.0 / n);
    const int cap = (n == 1) ? 4096 : (n == 2 ? 256 : 48);
    return std::clamp(static_cast<int>(s), 1, cap);
}

// stratified indicator-form Monte Carlo over the bounding box, fixed
// stratum-order reduction with per-stratum sub-seeds
template <class H>
IntegralResult stratified_single(H&& h, const Domain& d, long budget, std::uint64_t seed) {
    const int n = d.dim();
    const BoundingBox& bb = d.bounding_box();
    const int s = strata_per_axis(budget, n, 16);
    long cells = 1;
    for (int i = 0; i < n; ++i) cells *= s;
    const long m = std::max<long>(4, budget / cells);

    double cell_vol = 1.0;
    std::vector<double> width(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        width[static_cast<std::size_t>(i)] =
            (bb.hi[static_cast<std::size_t>(i)] - bb.lo[static_cast<std::size_t>(i)]) / s;
        cell_vol *= width[static_cast<std::size_t>(i)];
    }

    double value = 0.0, var_acc = 0.0;
    long used = 0;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Point x(std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (long cell = 0; cell < cells; ++cell) {
        Rng rng(sub_seed(seed, static_cast<std::uint64_t>(cell)));
        Accumulator acc;
        for (long k = 0; k < m; ++k) {
            for (int i = 0; i < n; ++i) {
                x[i] = bb.lo[static_cast<std::size_t>(i)] +
                       (idx[static_cast<std::size_t>(i)] + rng.uniform()) * width[static_cast<std::size_t>(i)];
            }
            acc.add(d.contains(x) ? h(static_cast<const Point&>(x)) : 0.0);
        }
        value += cell_vol * acc.mean();
        var_acc += cell_vol * cell_vol * acc.variance() / static_cast<double>(m);
        used += m;
        int i = 0;
        while (i < n && ++idx[static_cast<std::size_t>(i)] == s) {
            idx[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
    }
    return {value, std::sqrt(var_acc), used};
}

template <class H>
double gauss_pass(H&& h, const Domain& d, int cells_per_axis, long& evals) {
    const int n = d.dim();
    const BoundingBox& bb = d.bounding_box();
    std::vector<double> width(static_cast<std::size_t>(n));
    double cell_vol = 1.0;
    for (int i = 0; i < n; ++i) {
        width[static_cast<std::size_t>(i)] =
            (bb.hi[static_cast<std::size_t>(i)] - bb.lo[static_cast<std::size_t>(i)]) / cells_per_axis;
        cell_vol *= width[static_cast<std::size_t>(i)];
    }
    long cells = 1;
    for (int i = 0; i < n; ++i) cells *= cells_per_axis;

    double total = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<int> node(static_cast<std::size_t>(n), 0);
    Point x(std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (long cell = 0; cell < cells; ++cell) {
        for (;;) {
            double w = cell_vol;
            for (int i = 0; i < n; ++i) {
                const std::size_t ii = static_cast<std::size_t>(i);
                x[i] = bb.lo[ii] + (idx[ii] + kGaussNode[node[ii]]) * width[ii];
                w *= kGaussWeight[node[ii]];
            }
            ++evals;
            if (d.contains(x)) total += w * h(static_cast<const Point&>(x));
            int i = 0;
            while (i < n && ++node[static_cast<std::size_t>(i)] == 4) {
                node[static_cast<std::size_t>(i)] = 0;
                ++i;
            }
            if (i == n) break;
        }
        int i = 0;
        while (i < n && ++idx[static_cast<std::size_t>(i)] == cells_per_axis) {
            idx[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
    }
    return total;
}

// tensor Gauss on a cell grid; error from comparing against the half
// resolution pass
template <class H>
IntegralResult gauss_single(H&& h, const Domain& d, long budget, std::uint64_t) {
    const int n = d.dim();
    int m = static_cast<int>(std::floor(std::pow(static_cast<double>(budget), 1.0 / n) / 4.0));
    m = std::max(m, 1);
    long evals = 0;
    const double fine = gauss_pass(h, d, m, evals);
    const double coarse = gauss_pass(h, d, std::max(1, m / 2), evals);
    IntegralResult r;
    r.value = fine;
    r.error = std::abs(fine - coarse);
    r.samples = evals;
    return r;
}

} // namespace detail_quad

// ∫_d h(x) dx with the method and budget of the spec.
template <class H>
IntegralResult integrate_single(H&& h, const Domain& d, const QuadratureSpec& q,
                                std::uint64_t tag = 0) {
    q.validate();
    if (d.dim() < 1 || d.dim() > 3)
        throw UnsupportedDimension("integrate_single: quadrature supports n in {1,2,3}");
    const long budget = detail_quad::clamp_budget(q.outer_samples * q.inner_samples);
    const std::uint64_t seed = sub_seed(q.seed, 0x516e91eULL, tag);
    switch (q.method) {
        case QuadMethod::MonteCarlo: return detail_quad::mc_single(h, d, budget, seed);
        case QuadMethod::StratifiedMC: return detail_quad::stratified_single(h, d, budget, seed);
        case QuadMethod::TensorGaussOnCells: return detail_quad::gauss_single(h, d, budget, seed);
    }
    throw InvalidGeometry("integrate_single: unknown method");
}

// ---------------------------------------------------------------------------
// Weakly singular inner integral  I(x) = ∫_d g(z) / |z-x|^{n-1} dz
// ---------------------------------------------------------------------------

namespace detail_quad {

// Polar / Duffy local patch plus a regular far remainder. The near patch is a
// ball (polar) or a cube (Duffy) of size delta around x, where the kernel
// singularity is removed by the coordinate transform.
template <class G>
IntegralResult inner_kernel(G&& g, const Domain& d, const Point& x, const QuadratureSpec& q,
                            std::uint64_t seed) {
    const int n = d.dim();
    const long budget = std::max<long>(q.inner_samples, 32);

    if (n == 1) {
        // |z-x|^{n-1} = 1: no singularity
        auto h = [&](const Point& z) { return g(z); };
        return mc_single(h, d, budget, seed);
    }

    const int m_lin = std::max<int>(1, static_cast<int>(std::llround(
                                           std::pow(static_cast<double>(budget), 1.0 / n))));
    const double delta = q.singular_radius_fraction * d.diameter() / m_lin;

    IntegralResult near{};
    if (q.singular == SingularRule::PolarLocal) {
        // ∫_{B_delta(x)} g/r^{n-1} = ∫_0^delta ∫_{S^{n-1}} g(x + r sigma) dsigma dr
        const long n_near = std::max<long>(16, budget / 4);
        Rng rng(sub_seed(seed, 0xaea3ULL));
        Accumulator acc;
        std::vector<double> dir;
        Point z(std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (long i = 0; i < n_near; ++i) {
            const double r = delta * rng.uniform();
            sample_direction(n, rng, dir);
            for (int k = 0; k < n; ++k) z[k] = x[k] + r * dir[static_cast<std::size_t>(k)];
            acc.add(d.contains(z) ? g(static_cast<const Point&>(z)) : 0.0);
        }
        const double factor = delta * unit_sphere_area(n);
        near.value = factor * acc.mean();
        near.error = factor * acc.std_error();
        near.samples = n_near;
    } else {
        // Duffy: per corner box of [x-delta, x+delta]^n, map the singular
        // corner away; two passes at different orders give the error estimate.
        auto duffy_pass = [&](int qn, long& evals) {
            std::vector<double> nodes(static_cast<std::size_t>(qn)), weights(static_cast<std::size_t>(qn));
            // composite of the 4-point rule
            const int blocks = (qn + 3) / 4;
            nodes.clear();
            weights.clear();
            for (int b = 0; b < blocks; ++b) {
                for (int k = 0; k < 4; ++k) {
                    nodes.push_back((b + kGaussNode[k]) / blocks);
                    weights.push_back(kGaussWeight[k] / blocks);
                }
            }
            const int nn = static_cast<int>(nodes.size());
            double total = 0.0;
            Point z(std::vector<double>(static_cast<std::size_t>(n), 0.0));
            const int corners = 1 << n;
            for (int c = 0; c < corners; ++c) {
                double sgn[3];
                for (int i = 0; i < n; ++i) sgn[i] = (c >> i) & 1 ? 1.0 : -1.0;
                if (n == 2) {
                    for (int piece = 0; piece < 2; ++piece) {
                        for (int a = 0; a < nn; ++a) {
                            for (int b = 0; b < nn; ++b) {
                                const double u = nodes[static_cast<std::size_t>(a)];
                                const double v = nodes[static_cast<std::size_t>(b)];
                                const double lu = u, lv = u * v;
                                const double z0 = (piece == 0) ? lu : lv;
                                const double z1 = (piece == 0) ? lv : lu;
                                z[0] = x[0] + sgn[0] * delta * z0;
                                z[1] = x[1] + sgn[1] * delta * z1;
                                ++evals;
                                if (!d.contains(z)) continue;
                                // Jacobian u, kernel (delta u sqrt(1+v^2))^{-1}, cell scale delta^2
                                const double w = weights[static_cast<std::size_t>(a)] *
                                                 weights[static_cast<std::size_t>(b)] * delta /
                                                 std::sqrt(1.0 + v * v);
                                total += w * g(static_cast<const Point&>(z));
                            }
                        }
                    }
                } else {
                    for (int piece = 0; piece < 3; ++piece) {
                        for (int a = 0; a < nn; ++a)
                            for (int b = 0; b < nn; ++b)
                                for (int e = 0; e < nn; ++e) {
                                    const double u = nodes[static_cast<std::size_t>(a)];
                                    const double v = nodes[static_cast<std::size_t>(b)];
                                    const double t = nodes[static_cast<std::size_t>(e)];
                                    double lz[3] = {u, u * v, u * t};
                                    std::swap(lz[0], lz[piece]);
                                    z[0] = x[0] + sgn[0] * delta * lz[0];
                                    z[1] = x[1] + sgn[1] * delta * lz[1];
                                    z[2] = x[2] + sgn[2] * delta * lz[2];
                                    ++evals;
                                    if (!d.contains(z)) continue;
                                    // Jacobian u^2, kernel (delta u)^{-2} (1+v^2+t^2)^{-1}
                                    const double w = weights[static_cast<std::size_t>(a)] *
                                                     weights[static_cast<std::size_t>(b)] *
                                                     weights[static_cast<std::size_t>(e)] * delta /
                                                     (1.0 + v * v + t * t);
                                    total += w * g(static_cast<const Point&>(z));
                                }
                    }
                }
            }
            return total;
        };
        long evals = 0;
        const double fine = duffy_pass(n == 2 ? 8 : 4, evals);
        const double coarse = duffy_pass(4, evals);
        near.value = fine;
        near.error = std::abs(fine - coarse);
        near.samples = evals;
    }

    // regular remainder over d minus the near patch
    const bool cube_patch = (q.singular == SingularRule::DuffySplit);
    const long n_far = std::max<long>(16, budget - near.samples);
    Rng rng(sub_seed(seed, 0xfa4ULL));
    Accumulator acc;
    Point z;
    for (long i = 0; i < n_far; ++i) {
        sample_domain(d, rng, z);
        double dist;
        if (cube_patch) {
            double mx = 0.0;
            for (int k = 0; k < n; ++k) mx = std::max(mx, std::abs(z[k] - x[k]));
            dist = mx;
            if (mx <= delta) {
                acc.add(0.0);
                continue;
            }
            double r2 = 0.0;
            for (int k = 0; k < n; ++k) r2 += (z[k] - x[k]) * (z[k] - x[k]);
            dist = std::sqrt(r2);
        } else {
            double r2 = 0.0;
            for (int k = 0; k < n; ++k) r2 += (z[k] - x[k]) * (z[k] - x[k]);
            dist = std::sqrt(r2);
            if (dist <= delta) {
                acc.add(0.0);
                continue;
            }
        }
        acc.add(g(static_cast<const Point&>(z)) / std::pow(dist, n - 1));
    }
    IntegralResult far;
    far.value = d.measure() * acc.mean();
    far.error = d.measure() * acc.std_error() + d.measure_std_error() * std::abs(acc.mean());
    far.samples = n_far;

    return {near.value + far.value, near.error + far.error, near.samples + far.samples};
}

// Shared outer-node driver for double integrals. The callback receives the
// outer point and a node counter (for inner sub-seeding) and returns the
// inner value together with its error estimate.
template <class V>
IntegralResult integrate_outer(V&& v, const Domain& d, const QuadratureSpec& q,
                               std::uint64_t tag) {
    const int n = d.dim();
    const std::uint64_t seed = sub_seed(q.seed, 0x0d7eULL, tag);
    const long m_outer = std::max<long>(q.outer_samples, 8);

    if (q.method == QuadMethod::MonteCarlo) {
        Rng rng(seed);
        Accumulator acc;
        double inner_err = 0.0;
        long used = 0;
        Point x;
        for (long i = 0; i < m_outer; ++i) {
            sample_domain(d, rng, x);
            const IntegralResult r = v(static_cast<const Point&>(x), static_cast<std::uint64_t>(i));
            acc.add(r.value);
            inner_err += r.error;
            used += r.samples + 1;
        }
        IntegralResult out;
        out.value = d.measure() * acc.mean();
        out.error = d.measure() * acc.std_error() +
                    d.measure() * inner_err / static_cast<double>(m_outer) +
                    d.measure_std_error() * std::abs(acc.mean());
        out.samples = used;
        return out;
    }

    if (q.method == QuadMethod::StratifiedMC) {
        const BoundingBox& bb = d.bounding_box();
        const int s = strata_per_axis(m_outer, n, 4);
        long cells = 1;
        for (int i = 0; i < n; ++i) cells *= s;
        const long m = std::max<long>(2, m_outer / cells);
        std::vector<double> width(static_cast<std::size_t>(n));
        double cell_vol = 1.0;
        for (int i = 0; i < n; ++i) {
            width[static_cast<std::size_t>(i)] =
                (bb.hi[static_cast<std::size_t>(i)] - bb.lo[static_cast<std::size_t>(i)]) / s;
            cell_vol *= width[static_cast<std::size_t>(i)];
        }
        double value = 0.0, var_acc = 0.0, inner_err = 0.0;
        long used = 0;
        std::uint64_t counter = 0;
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        Point x(std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (long cell = 0; cell < cells; ++cell) {
            Rng rng(sub_seed(seed, static_cast<std::uint64_t>(cell)));
            Accumulator acc;
            for (long k = 0; k < m; ++k) {
                for (int i = 0; i < n; ++i)
                    x[i] = bb.lo[static_cast<std::size_t>(i)] +
                           (idx[static_cast<std::size_t>(i)] + rng.uniform()) * width[static_cast<std::size_t>(i)];
                ++counter;
                if (d.contains(x)) {
                    const IntegralResult r = v(static_cast<const Point&>(x), counter);
                    acc.add(r.value);
                    inner_err += cell_vol * r.error / static_cast<double>(m);
                    used += r.samples;
                } else {
                    acc.add(0.0);
                }
                ++used;
            }
            value += cell_vol * acc.mean();
            var_acc += cell_vol * cell_vol * acc.variance() / static_cast<double>(m);
            int i = 0;
            while (i < n && ++idx[static_cast<std::size_t>(i)] == s) {
                idx[static_cast<std::size_t>(i)] = 0;
                ++i;
            }
        }
        return {value, std::sqrt(var_acc) + inner_err, used};
    }

    // TensorGaussOnCells: Gauss nodes as outer points, two resolutions.
    const BoundingBox& bb = d.bounding_box();
    int m_cells = static_cast<int>(std::floor(std::pow(static_cast<double>(m_outer), 1.0 / n) / 4.0));
    m_cells = std::max(m_cells, 1);
    long used = 0;
    double inner_err = 0.0;
    std::uint64_t counter = 0;
    auto pass = [&](int cells_per_axis) {
        std::vector<double> width(static_cast<std::size_t>(n));
        double cell_vol = 1.0;
        for (int i = 0; i < n; ++i) {
            width[static_cast<std::size_t>(i)] =
                (bb.hi[static_cast<std::size_t>(i)] - bb.lo[static_cast<std::size_t>(i)]) / cells_per_axis;
            cell_vol *= width[static_cast<std::size_t>(i)];
        }
        long cells = 1;
        for (int i = 0; i < n; ++i) cells *= cells_per_axis;
        double total = 0.0;
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        std::vector<int> node(static_cast<std::size_t>(n), 0);
        Point x(std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (long cell = 0; cell < cells; ++cell) {
            for (;;) {
                double w = cell_vol;
                for (int i = 0; i < n; ++i) {
                    const std::size_t ii = static_cast<std::size_t>(i);
                    x[i] = bb.lo[ii] + (idx[ii] + kGaussNode[node[ii]]) * width[ii];
                    w *= kGaussWeight[node[ii]];
                }
                ++counter;
                ++used;
                if (d.contains(x)) {
                    const IntegralResult r = v(static_cast<const Point&>(x), counter);
                    total += w * r.value;
                    inner_err += w * r.error;
                    used += r.samples;
                }
                int i = 0;
                while (i < n && ++node[static_cast<std::size_t>(i)] == 4) {
                    node[static_cast<std::size_t>(i)] = 0;
                    ++i;
                }
                if (i == n) break;
            }
            int i = 0;
            while (i < n && ++idx[static_cast<std::size_t>(i)] == cells_per_axis) {
                idx[static_cast<std::size_t>(i)] = 0;
                ++i;
            }
        }
        return total;
    };
    const double fine = pass(m_cells);
    const double coarse = pass(std::max(1, m_cells / 2));
    return {fine, std::abs(fine - coarse) + inner_err, used};
}

} // namespace detail_quad

// ---------------------------------------------------------------------------
// Spec operations
// ---------------------------------------------------------------------------

// (1/|d|) ∫_d f
inline IntegralResult mean_value(const TestFunction& f, const Domain& d, const QuadratureSpec& q) {
    if (!(d.measure() > 0.0)) throw ZeroMeasure("mean_value: domain has zero measure");
    auto h = [&](const Point& x) { return f.eval(x); };
    IntegralResult r = integrate_single(h, d, q, 0x3eaULL);
    const double m = d.measure();
    const double integral = r.value;
    r.value = integral / m;
    r.error = r.error / m + std::abs(integral) / (m * m) * d.measure_std_error();
    return r;
}

// ∫_dom |f(x) - m|^{p(x)} dx for a given reference value m (the mean of f
// over the inequality domain, which may differ from dom).
inline IntegralResult modular_deviation(const TestFunction& f, const VariableExponent& p,
                                        const Domain& dom, double m, const QuadratureSpec& q,
                                        std::uint64_t tag = 0x10d5ULL) {
    auto h = [&](const Point& x) {
        return std::pow(std::abs(f.eval(x) - m), p.eval(x));
    };
    return integrate_single(h, dom, q, tag);
}

// ∫_d |f(x) - <f>_d|^{p(x)} dx
inline IntegralResult modular_lhs(const TestFunction& f, const VariableExponent& p,
                                  const Domain& d, const QuadratureSpec& q) {
    const IntegralResult mean = mean_value(f, d, q);
    IntegralResult r = modular_deviation(f, p, d, mean.value, q);
    // sensitivity of the modular to the mean estimate: ∫ p |f - m|^{p-1}
    if (mean.error > 0.0) {
        QuadratureSpec qs = q;
        qs.method = QuadMethod::MonteCarlo;
        qs.outer_samples = 4000;
        qs.inner_samples = 1;
        auto hs = [&](const Point& x) {
            const double px = p.eval(x);
            return px * std::pow(std::abs(f.eval(x) - mean.value), px - 1.0);
        };
        const IntegralResult sens = integrate_single(hs, d, qs, 0x5e5ULL);
        r.error += mean.error * std::abs(sens.value);
        r.samples += sens.samples;
    }
    r.samples += mean.samples;
    return r;
}

// ∫_d |∇f(x)|^{p(x)} dx
inline IntegralResult gradient_modular(const TestFunction& f, const VariableExponent& p,
                                       const Domain& d, const QuadratureSpec& q) {
    auto h = [&](const Point& x) { return std::pow(f.grad_norm(x), p.eval(x)); };
    return integrate_single(h, d, q, 0x96adULL);
}

// ∫_d |∇f|^p dx with a constant exponent
inline IntegralResult classical_rhs(const TestFunction& f, double p_const, const Domain& d,
                                    const QuadratureSpec& q) {
    return gradient_modular(f, VariableExponent::constant(p_const), d, q);
}

// ∫_d 1 / |z - x|^{n-1} dx  (z may lie inside d; the singularity is handled
// by the local patch)
inline IntegralResult newton_potential(const Point& z, const Domain& d, const QuadratureSpec& q) {
    if (d.dim() < 2) throw UnsupportedDimension("newton_potential: requires n >= 2");
    QuadratureSpec qi = q;
    qi.inner_samples = detail_quad::clamp_budget(q.outer_samples * q.inner_samples, 1000, 4000000);
    auto one = [](const Point&) { return 1.0; };
    return detail_quad::inner_kernel(one, d, z, qi, sub_seed(q.seed, 0x4e3ULL));
}

// ∫_d w(x, p(x)) |∇f(z)|^{p(x)} / |z-x|^{n-1} dz dx
template <class W>
IntegralResult kernel_rhs_weighted(const TestFunction& f, const VariableExponent& p,
                                   const Domain& d, const QuadratureSpec& q, W&& weight) {
    q.validate();
    if (d.dim() < 1 || d.dim() > 3)
        throw UnsupportedDimension("kernel_rhs: quadrature supports n in {1,2,3}");
    auto v = [&](const Point& x, std::uint64_t node) {
        const double px = p.eval(x);
        auto g = [&](const Point& z) { return std::pow(f.grad_norm(z), px); };
        IntegralResult inner =
            detail_quad::inner_kernel(g, d, x, q, sub_seed(q.seed, 0x188e4ULL, node));
        const double w = weight(x, px);
        inner.value *= w;
        inner.error *= std::abs(w);
        return inner;
    };
    return detail_quad::integrate_outer(v, d, q, 0xfe44ULL);
}

inline IntegralResult kernel_rhs(const TestFunction& f, const VariableExponent& p,
                                 const Domain& d, const QuadratureSpec& q) {
    return kernel_rhs_weighted(f, p, d, q, [](const Point&, double) { return 1.0; });
}

// ∫_d ∫_d |f(x) - f(y)|^{p(x)} dy dx
inline IntegralResult double_modular(const TestFunction& f, const VariableExponent& p,
                                     const Domain& d, const QuadratureSpec& q) {
    q.validate();
    auto v = [&](const Point& x, std::uint64_t node) {
        const double px = p.eval(x);
        const double fx = f.eval(x);
        Rng rng(sub_seed(q.seed, 0xdb17ULL, node));
        detail_quad::Accumulator acc;
        Point y;
        for (long i = 0; i < q.inner_samples; ++i) {
            sample_domain(d, rng, y);
            acc.add(std::pow(std::abs(fx - f.eval(y)), px));
        }
        IntegralResult r;
        r.value = d.measure() * acc.mean();
        r.error = d.measure() * acc.std_error() + d.measure_std_error() * std::abs(acc.mean());
        r.samples = q.inner_samples;
        return r;
    };
    return detail_quad::integrate_outer(v, d, q, 0xd0bULL);
}

} // namespace pwlab
