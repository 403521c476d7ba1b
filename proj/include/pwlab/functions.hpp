#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pwlab/errors.hpp"
#include "pwlab/geometry.hpp"

// Variable exponents p(x) >= 1 with exact essential suprema, and C^1 test
// functions with analytic gradients.

namespace pwlab {

// ---------------------------------------------------------------------------
// Variable exponents
// ---------------------------------------------------------------------------

// Piecewise-linear strictly increasing map [0, inf) -> [1, inf). Nodes start
// at r = 0; beyond the last node the final slope is extended.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> p;

    void validate() const {
        if (r.size() < 2 || r.size() != p.size())
            throw InvalidGeometry("RadialProfile: need matching node lists with >= 2 nodes");
        if (r.front() != 0.0)
            throw InvalidGeometry("RadialProfile: first node must be at r = 0");
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
            if (!(r[i + 1] > r[i]) || !(p[i + 1] > p[i]))
                throw InvalidGeometry("RadialProfile: nodes must be strictly increasing");
        if (p.front() < 1.0)
            throw InvalidGeometry("RadialProfile: exponent values must be >= 1");
    }

    double operator()(double rad) const {
        if (rad <= 0.0) return p.front();
        std::size_t i = 1;
        while (i + 1 < r.size() && rad > r[i]) ++i;
        const double slope = (p[i] - p[i - 1]) / (r[i] - r[i - 1]);
        if (rad <= r[i]) return p[i - 1] + slope * (rad - r[i - 1]);
        return p[i] + slope * (rad - r[i]); // extend final slope
    }
};

struct ConstantExponent {
    double p = 2.0;
};

struct RadialIncreasingExponent {
    Point center;
    RadialProfile profile;
};

struct PiecewiseConstantExponent {
    std::vector<std::pair<Domain, double>> regions; // first match wins
    double default_p = 2.0;
};

// Exact intersection predicate for ball/polygon variants; unions recurse.
inline bool domains_intersect(const Domain& a, const Domain& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("domains_intersect: dimension mismatch");
    if (a.is_union()) {
        for (const StarPiece& sp : a.union_pieces().pieces)
            if (domains_intersect(sp.body, b)) return true;
        return false;
    }
    if (b.is_union()) return domains_intersect(b, a);
    if (a.is_ball() && b.is_ball())
        return distance(a.ball().center, b.ball().center) < a.ball().radius + b.ball().radius;
    if (a.is_ball() && b.is_polygon()) {
        const Vec2 c = to_vec2(a.ball().center);
        return b.polygon().contains(c, 0.0) ||
               b.polygon().boundary_distance(c) < a.ball().radius;
    }
    if (a.is_polygon() && b.is_ball()) return domains_intersect(b, a);
    const Polygon2D& pa = a.polygon();
    const Polygon2D& pb = b.polygon();
    if (pa.contains(pb.vertices().front(), 0.0)) return true;
    if (pb.contains(pa.vertices().front(), 0.0)) return true;
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j)
            if (segments_cross(pa.vertices()[i], pa.vertices()[(i + 1) % pa.size()],
                               pb.vertices()[j], pb.vertices()[(j + 1) % pb.size()], 0.0))
                return true;
    return false;
}

class VariableExponent {
public:
    using Variant =
        std::variant<ConstantExponent, RadialIncreasingExponent, PiecewiseConstantExponent>;

    VariableExponent() : v_(ConstantExponent{}) {}
    explicit VariableExponent(Variant v) : v_(std::move(v)) { validate(); }

    static VariableExponent constant(double p) {
        return VariableExponent(ConstantExponent{p});
    }
    static VariableExponent radial(Point center, RadialProfile profile) {
        return VariableExponent(RadialIncreasingExponent{std::move(center), std::move(profile)});
    }
    static VariableExponent piecewise(std::vector<std::pair<Domain, double>> regions,
                                      double default_p) {
        return VariableExponent(PiecewiseConstantExponent{std::move(regions), default_p});
    }

    const Variant& variant() const { return v_; }
    bool is_constant() const { return std::holds_alternative<ConstantExponent>(v_); }
    bool is_radial() const { return std::holds_alternative<RadialIncreasingExponent>(v_); }

    double eval(const Point& x) const {
        if (const auto* c = std::get_if<ConstantExponent>(&v_)) return c->p;
        if (const auto* r = std::get_if<RadialIncreasingExponent>(&v_))
            return r->profile(distance(x, r->center));
        const auto& pc = std::get<PiecewiseConstantExponent>(v_);
        for (const auto& [region, p] : pc.regions)
            if (region.contains(x)) return p;
        return pc.default_p;
    }

    // Essential supremum of p over d. Constant and radial variants are exact;
    // the piecewise variant takes the values of all regions meeting d plus the
    // default when a coverage probe finds uncovered points.
    double p_plus(const Domain& d) const {
        if (const auto* c = std::get_if<ConstantExponent>(&v_)) return c->p;
        if (const auto* r = std::get_if<RadialIncreasingExponent>(&v_)) {
            std::vector<std::pair<Point, double>> supp;
            d.support_points(supp);
            double rmax = 0.0;
            for (const auto& [pt, pad] : supp)
                rmax = std::max(rmax, distance(pt, r->center) + pad);
            return r->profile(rmax);
        }
        const auto& pc = std::get<PiecewiseConstantExponent>(v_);
        double best = 0.0;
        bool any = false;
        for (const auto& [region, p] : pc.regions) {
            if (domains_intersect(region, d)) {
                best = std::max(best, p);
                any = true;
            }
        }
        if (!covered_by_regions(d)) {
            best = std::max(best, pc.default_p);
            any = true;
        }
        return any ? best : pc.default_p;
    }

private:
    Variant v_;

    void validate() const {
        if (const auto* c = std::get_if<ConstantExponent>(&v_)) {
            if (!(c->p >= 1.0) || !std::isfinite(c->p))
                throw InvalidGeometry("VariableExponent: constant p must be finite and >= 1");
        } else if (const auto* r = std::get_if<RadialIncreasingExponent>(&v_)) {
            r->profile.validate();
        } else {
            const auto& pc = std::get<PiecewiseConstantExponent>(v_);
            if (!(pc.default_p >= 1.0))
                throw InvalidGeometry("VariableExponent: default p must be >= 1");
            for (const auto& [region, p] : pc.regions)
                if (!(p >= 1.0))
                    throw InvalidGeometry("VariableExponent: region p must be >= 1");
        }
    }

    // Deterministic grid probe for "d subset of union of regions".
    bool covered_by_regions(const Domain& d) const {
        const auto& pc = std::get<PiecewiseConstantExponent>(v_);
        const BoundingBox& bb = d.bounding_box();
        const int n = d.dim();
        const int grid = (n == 1) ? 512 : (n == 2 ? 48 : 16);
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        Point x(std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (;;) {
            for (int i = 0; i < n; ++i) {
                const double t = (idx[static_cast<std::size_t>(i)] + 0.5) / grid;
                x[i] = bb.lo[static_cast<std::size_t>(i)] +
                       t * (bb.hi[static_cast<std::size_t>(i)] - bb.lo[static_cast<std::size_t>(i)]);
            }
            if (d.contains(x)) {
                bool in_region = false;
                for (const auto& [region, p] : pc.regions) {
                    (void)p;
                    if (region.contains(x)) {
                        in_region = true;
                        break;
                    }
                }
                if (!in_region) return false;
            }
            int i = 0;
            while (i < n && ++idx[static_cast<std::size_t>(i)] == grid) {
                idx[static_cast<std::size_t>(i)] = 0;
                ++i;
            }
            if (i == n) break;
        }
        return true;
    }
};

inline double eval_exponent(const VariableExponent& p, const Point& x) { return p.eval(x); }
inline double p_plus(const VariableExponent& p, const Domain& d) { return p.p_plus(d); }

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

class TestFunction;

struct PolynomialTerm {
    double coeff = 0.0;
    std::vector<int> powers;
};

struct Polynomial {
    std::vector<PolynomialTerm> terms;
};

// Sum of plane waves a * sin(k.x + phase).
struct TrigWaveTerm {
    double amplitude = 0.0;
    std::vector<double> wave;
    double phase = 0.0;
};

struct TrigWaves {
    std::vector<TrigWaveTerm> terms;
};

// Radial plateau function: 1 on B_1(center), 0 outside B_{1+alpha}(center),
// polynomial smoothstep of smoothness C^{k-1} in between.
struct RadialBump {
    double alpha = 0.5;
    int order = 3; // k
    Point center;  // empty -> origin of the evaluation dimension
};

struct ScaledFunction {
    double lambda = 1.0;
    std::shared_ptr<const TestFunction> inner;
};

struct LinearCombination {
    std::vector<std::pair<double, std::shared_ptr<const TestFunction>>> terms;
};

namespace detail {

inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

// General smoothstep S_N: [0,1] -> [0,1] with N vanishing derivatives at both
// ends; S_N(1/2) = 1/2 by symmetry.
inline double smoothstep(int N, double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double s = 0.0;
    for (int j = 0; j <= N; ++j)
        s += binom(N + j, j) * binom(2 * N + 1, N - j) * std::pow(-u, j);
    return std::pow(u, N + 1) * s;
}

inline double smoothstep_derivative(int N, double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    // d/du [ u^{N+1} sum_j c_j (-u)^j ] with c_j as above
    double s = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double c = binom(N + j, j) * binom(2 * N + 1, N - j);
        s += c * std::pow(-1.0, j) * (N + 1 + j) * std::pow(u, N + j);
    }
    return s;
}

} // namespace detail

class TestFunction {
public:
    using Variant =
        std::variant<Polynomial, TrigWaves, RadialBump, ScaledFunction, LinearCombination>;

    TestFunction() : v_(Polynomial{}) {}
    explicit TestFunction(Variant v) : v_(std::move(v)) {}

    const Variant& variant() const { return v_; }

    double eval(const Point& x) const {
        return std::visit([&](const auto& f) { return eval_impl(f, x); }, v_);
    }

    // Analytic gradient.
    void grad(const Point& x, std::vector<double>& out) const {
        out.assign(static_cast<std::size_t>(x.dim()), 0.0);
        std::visit([&](const auto& f) { grad_impl(f, x, out); }, v_);
    }

    std::vector<double> grad(const Point& x) const {
        std::vector<double> g;
        grad(x, g);
        return g;
    }

    double grad_norm(const Point& x) const {
        thread_local std::vector<double> g;
        grad(x, g);
        double s = 0.0;
        for (double c : g) s += c * c;
        return std::sqrt(s);
    }

private:
    Variant v_;

    static double eval_impl(const Polynomial& f, const Point& x) {
        double s = 0.0;
        for (const auto& t : f.terms) {
            double m = t.coeff;
            for (std::size_t i = 0; i < t.powers.size(); ++i) {
                for (int e = 0; e < t.powers[i]; ++e) m *= x[static_cast<int>(i)];
            }
            s += m;
        }
        return s;
    }

    static void grad_impl(const Polynomial& f, const Point& x, std::vector<double>& out) {
        for (const auto& t : f.terms) {
            for (std::size_t i = 0; i < t.powers.size() && i < out.size(); ++i) {
                const int e = t.powers[i];
                if (e == 0) continue;
                double m = t.coeff * e;
                for (std::size_t j = 0; j < t.powers.size(); ++j) {
                    const int ej = (j == i) ? t.powers[j] - 1 : t.powers[j];
                    for (int k = 0; k < ej; ++k) m *= x[static_cast<int>(j)];
                }
                out[i] += m;
            }
        }
    }

    static double phase_of(const TrigWaveTerm& t, const Point& x) {
        double ph = t.phase;
        for (std::size_t i = 0; i < t.wave.size(); ++i) ph += t.wave[i] * x[static_cast<int>(i)];
        return ph;
    }

    static double eval_impl(const TrigWaves& f, const Point& x) {
        double s = 0.0;
        for (const auto& t : f.terms) s += t.amplitude * std::sin(phase_of(t, x));
        return s;
    }

    static void grad_impl(const TrigWaves& f, const Point& x, std::vector<double>& out) {
        for (const auto& t : f.terms) {
            const double c = t.amplitude * std::cos(phase_of(t, x));
            for (std::size_t i = 0; i < t.wave.size() && i < out.size(); ++i)
                out[i] += c * t.wave[i];
        }
    }

    static double radius_of(const RadialBump& f, const Point& x) {
        if (f.center.dim() == 0) return norm(x);
        return distance(x, f.center);
    }

    static double eval_impl(const RadialBump& f, const Point& x) {
        const double r = radius_of(f, x);
        if (r <= 1.0) return 1.0;
        if (r >= 1.0 + f.alpha) return 0.0;
        return 1.0 - detail::smoothstep(f.order - 1, (r - 1.0) / f.alpha);
    }

    static void grad_impl(const RadialBump& f, const Point& x, std::vector<double>& out) {
        const double r = radius_of(f, x);
        if (r <= 1.0 || r >= 1.0 + f.alpha || r == 0.0) return;
        const double d_r = -detail::smoothstep_derivative(f.order - 1, (r - 1.0) / f.alpha) / f.alpha;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double ci = (f.center.dim() == 0) ? 0.0 : f.center[static_cast<int>(i)];
            out[i] = d_r * (x[static_cast<int>(i)] - ci) / r;
        }
    }

    static double eval_impl(const ScaledFunction& f, const Point& x) {
        return f.lambda * f.inner->eval(x);
    }

    static void grad_impl(const ScaledFunction& f, const Point& x, std::vector<double>& out) {
        f.inner->grad(x, out);
        for (double& c : out) c *= f.lambda;
    }

    static double eval_impl(const LinearCombination& f, const Point& x) {
        double s = 0.0;
        for (const auto& [c, g] : f.terms) s += c * g->eval(x);
        return s;
    }

    static void grad_impl(const LinearCombination& f, const Point& x, std::vector<double>& out) {
        std::vector<double> tmp;
        for (const auto& [c, g] : f.terms) {
            g->grad(x, tmp);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * tmp[i];
        }
    }
};

// Factories ------------------------------------------------------------------

inline TestFunction make_polynomial(std::vector<PolynomialTerm> terms) {
    return TestFunction(Polynomial{std::move(terms)});
}

inline TestFunction make_trig(std::vector<TrigWaveTerm> terms) {
    return TestFunction(TrigWaves{std::move(terms)});
}

// The plateau family of the counterexample: C^{k-1}, values in [0,1],
// identically 1 on B_1 and 0 outside B_{1+alpha}.
inline TestFunction bump(double alpha, int k, Point center = Point{}) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw InvalidGeometry("bump: alpha must lie in (0,1)");
    if (k < 2) throw InvalidGeometry("bump: smoothstep order must be >= 2");
    return TestFunction(RadialBump{alpha, k, std::move(center)});
}

inline TestFunction scaled(double lambda, TestFunction inner) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw InvalidGeometry("scaled: lambda must lie in (0,1]");
    return TestFunction(ScaledFunction{lambda, std::make_shared<TestFunction>(std::move(inner))});
}

inline TestFunction linear_combination(const std::vector<double>& coeffs,
                                       const std::vector<TestFunction>& basis) {
    LinearCombination lc;
    for (std::size_t i = 0; i < coeffs.size() && i < basis.size(); ++i)
        lc.terms.emplace_back(coeffs[i], std::make_shared<TestFunction>(basis[i]));
    return TestFunction(std::move(lc));
}

} // namespace pwlab
