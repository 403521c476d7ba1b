#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "pwlab/errors.hpp"
#include "pwlab/rng.hpp"

// Domains (balls, simple 2D polygons, finite unions of star-shaped pieces),
// the star-shapedness predicate, and the geometric quantities (measure,
// diameter, overlaps) that feed the explicit constants.

namespace pwlab {

// ---------------------------------------------------------------------------
// Points and small vector helpers
// ---------------------------------------------------------------------------

struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c) : coords(std::move(c)) {}
    Point(double x, double y) : coords{x, y} {}
    Point(double x, double y, double z) : coords{x, y, z} {}

    int dim() const { return static_cast<int>(coords.size()); }
    double operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return coords[static_cast<std::size_t>(i)]; }
};

inline Point point1(double x) { return Point(std::vector<double>{x}); }

inline bool finite(const Point& p) {
    for (double c : p.coords)
        if (!std::isfinite(c)) return false;
    return true;
}

inline double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(const Point& a, const Point& b) {
    return std::sqrt(squared_distance(a, b));
}

inline double norm(const Point& p) {
    double s = 0.0;
    for (double c : p.coords) s += c * c;
    return std::sqrt(s);
}

// Lebesgue measure of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// Surface measure of the unit sphere S^{n-1}; for n = 1 this is the counting
// measure of {-1, +1}.
inline double unit_sphere_area(int n) {
    return n * unit_ball_volume(n);
}

// 2D helpers used by polygon code.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline Vec2 to_vec2(const Point& p) { return {p[0], p[1]}; }
inline Point to_point(Vec2 v) { return Point(v.x, v.y); }

inline double orient2d(Vec2 a, Vec2 b, Vec2 c) {
    return cross(b - a, c - a);
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return norm(p - a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

// Proper crossing of open segments (a,b) and (c,d): interiors intersect
// transversally. Touching within eps does not count.
inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps) {
    const double d1 = orient2d(c, d, a);
    const double d2 = orient2d(c, d, b);
    const double d3 = orient2d(a, b, c);
    const double d4 = orient2d(a, b, d);
    return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
           ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

// ---------------------------------------------------------------------------
// Ball and Polygon2D
// ---------------------------------------------------------------------------

struct Ball {
    Point center;
    double radius = 0.0;

    Ball() = default;
    Ball(Point c, double r) : center(std::move(c)), radius(r) {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw InvalidGeometry("Ball: radius must be positive and finite");
        if (center.dim() < 1 || !finite(center))
            throw InvalidGeometry("Ball: center must be finite with dimension >= 1");
    }

    int dim() const { return center.dim(); }
    double measure() const { return unit_ball_volume(dim()) * std::pow(radius, dim()); }
};

class Polygon2D {
public:
    Polygon2D() = default;

    // Vertices must be listed counterclockwise and form a simple polygon.
    explicit Polygon2D(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
        if (verts_.size() < 3)
            throw InvalidGeometry("Polygon2D: need at least 3 vertices");
        for (const Vec2& v : verts_)
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw InvalidGeometry("Polygon2D: non-finite vertex");
        if (signed_area() <= 0.0)
            throw InvalidGeometry("Polygon2D: vertices must be CCW with positive area");
        if (!is_simple())
            throw InvalidGeometry("Polygon2D: polygon must be simple");
    }

    const std::vector<Vec2>& vertices() const { return verts_; }
    std::size_t size() const { return verts_.size(); }

    double signed_area() const {
        double s = 0.0;
        for (std::size_t i = 0; i < verts_.size(); ++i) {
            const Vec2& a = verts_[i];
            const Vec2& b = verts_[(i + 1) % verts_.size()];
            s += cross(a, b);
        }
        return 0.5 * s;
    }

    double area() const { return signed_area(); }

    double diameter() const {
        double best = 0.0;
        for (std::size_t i = 0; i < verts_.size(); ++i)
            for (std::size_t j = i + 1; j < verts_.size(); ++j)
                best = std::max(best, norm(verts_[i] - verts_[j]));
        return best;
    }

    bool is_convex(double eps = 1e-12) const {
        for (std::size_t i = 0; i < verts_.size(); ++i) {
            const Vec2& a = verts_[i];
            const Vec2& b = verts_[(i + 1) % verts_.size()];
            const Vec2& c = verts_[(i + 2) % verts_.size()];
            if (orient2d(a, b, c) < -eps) return false;
        }
        return true;
    }

    // Crossing-number membership; points within eps of the boundary count as
    // inside so that certification is stable near edges.
    bool contains(Vec2 p, double eps) const {
        for (std::size_t i = 0; i < verts_.size(); ++i) {
            const Vec2& a = verts_[i];
            const Vec2& b = verts_[(i + 1) % verts_.size()];
            if (point_segment_distance(p, a, b) <= eps) return true;
        }
        bool inside = false;
        for (std::size_t i = 0, j = verts_.size() - 1; i < verts_.size(); j = i++) {
            const Vec2& a = verts_[i];
            const Vec2& b = verts_[j];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if (p.x < x_cross) inside = !inside;
            }
        }
        return inside;
    }

    double boundary_distance(Vec2 p) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < verts_.size(); ++i) {
            const Vec2& a = verts_[i];
            const Vec2& b = verts_[(i + 1) % verts_.size()];
            best = std::min(best, point_segment_distance(p, a, b));
        }
        return best;
    }

private:
    std::vector<Vec2> verts_;

    bool is_simple() const {
        const std::size_t n = verts_.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                // skip adjacent edges (they share a vertex)
                if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
                if (segments_cross(verts_[i], verts_[(i + 1) % n],
                                   verts_[j], verts_[(j + 1) % n], 0.0))
                    return false;
            }
        }
        return true;
    }
};

// Fan-free ear clipping; returns index triples into the vertex list.
inline std::vector<std::array<int, 3>> triangulate(const Polygon2D& poly) {
    const auto& v = poly.vertices();
    const int n = static_cast<int>(v.size());
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;

    const double scale = poly.diameter();
    const double eps = 1e-12 * scale * scale;

    auto point_in_tri = [&](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
        return orient2d(a, b, p) >= -eps && orient2d(b, c, p) >= -eps &&
               orient2d(c, a, p) >= -eps;
    };

    std::vector<std::array<int, 3>> tris;
    while (idx.size() > 3) {
        const int m = static_cast<int>(idx.size());
        bool clipped = false;
        for (int k = 0; k < m; ++k) {
            const int ia = idx[static_cast<std::size_t>((k + m - 1) % m)];
            const int ib = idx[static_cast<std::size_t>(k)];
            const int ic = idx[static_cast<std::size_t>((k + 1) % m)];
            if (orient2d(v[ia], v[ib], v[ic]) <= eps) continue; // reflex or flat
            bool ear = true;
            for (int other : idx) {
                if (other == ia || other == ib || other == ic) continue;
                if (point_in_tri(v[other], v[ia], v[ib], v[ic])) {
                    ear = false;
                    break;
                }
            }
            if (!ear) continue;
            tris.push_back({ia, ib, ic});
            idx.erase(idx.begin() + k);
            clipped = true;
            break;
        }
        if (!clipped)
            throw InvalidGeometry("triangulate: no ear found (degenerate polygon?)");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

// ---------------------------------------------------------------------------
// Domain, StarPiece, Chain
// ---------------------------------------------------------------------------

struct StarPiece;

struct UnionPieces {
    std::vector<StarPiece> pieces;
};

struct BoundingBox {
    std::vector<double> lo;
    std::vector<double> hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
        return std::max(v, 0.0);
    }
};

inline std::optional<BoundingBox> intersect(const BoundingBox& a, const BoundingBox& b) {
    BoundingBox r;
    r.lo.resize(a.lo.size());
    r.hi.resize(a.hi.size());
    for (std::size_t i = 0; i < a.lo.size(); ++i) {
        r.lo[i] = std::max(a.lo[i], b.lo[i]);
        r.hi[i] = std::min(a.hi[i], b.hi[i]);
        if (r.lo[i] >= r.hi[i]) return std::nullopt;
    }
    return r;
}

// A bounded domain: ball, simple CCW polygon, or a finite union of star
// pieces. Measure, diameter, bounding box and (for polygons) a triangulation
// are computed once at construction; instances are immutable afterwards.
class Domain {
public:
    Domain() = default;

    explicit Domain(Ball b);
    explicit Domain(Polygon2D p);
    // Union variant; the measure is a Monte Carlo estimate with the reported
    // standard error, everything else is exact.
    Domain(UnionPieces u, long mc_samples, std::uint64_t seed);

    int dim() const { return dim_; }
    double measure() const { return measure_; }
    double measure_std_error() const { return measure_se_; }
    double diameter() const { return diameter_; }
    double boundary_tolerance() const { return eps_geo_; }
    const BoundingBox& bounding_box() const { return bbox_; }

    bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
    bool is_polygon() const { return std::holds_alternative<Polygon2D>(shape_); }
    bool is_union() const { return std::holds_alternative<UnionPieces>(shape_); }

    const Ball& ball() const { return std::get<Ball>(shape_); }
    const Polygon2D& polygon() const { return std::get<Polygon2D>(shape_); }
    const UnionPieces& union_pieces() const { return std::get<UnionPieces>(shape_); }

    const std::vector<std::array<int, 3>>& triangles() const { return tris_; }
    const std::vector<double>& triangle_cumulative_area() const { return tri_cum_area_; }

    bool contains(const Point& x) const;

    // Points (with radial padding) whose pairwise padded distances bound the
    // diameter: polygon vertices carry zero padding, ball centers carry their
    // radius.
    void support_points(std::vector<std::pair<Point, double>>& out) const;

private:
    std::variant<Ball, Polygon2D, UnionPieces> shape_;
    int dim_ = 0;
    double measure_ = 0.0;
    double measure_se_ = 0.0;
    double diameter_ = 0.0;
    double eps_geo_ = 0.0;
    BoundingBox bbox_;
    std::vector<std::array<int, 3>> tris_;
    std::vector<double> tri_cum_area_;

    void finalize_common();
};

struct StarCertificate {
    int kernel_samples = 0;
    int body_samples = 0;
    int segment_samples = 0;
    std::uint64_t seed = 0;
    double max_violation = 0.0; // 0 by construction when certified
};

// A domain together with a certified kernel ball witnessing condition (A).
struct StarPiece {
    Domain body;
    Ball kernel;
    StarCertificate certificate;
};

// Ordered overlapping decomposition: every piece after the first meets the
// union of its predecessors in a set of measure >= lambda > 0, and all kernel
// balls share the radius R.
struct Chain {
    std::vector<StarPiece> pieces;
    double R = 0.0;
    int N = 0;
    double lambda = 0.0; // infimum prefix-overlap measure; 0 when N == 1
    Domain omega;
};

// --- Domain implementation -------------------------------------------------

inline void Domain::finalize_common() {
    eps_geo_ = 1e-9 * diameter_;
    if (!(measure_ > 0.0))
        throw InvalidGeometry("Domain: measure must be positive");
}

inline Domain::Domain(Ball b) : shape_(std::move(b)) {
    const Ball& bl = ball();
    dim_ = bl.dim();
    measure_ = bl.measure();
    measure_se_ = 0.0;
    diameter_ = 2.0 * bl.radius;
    bbox_.lo.resize(static_cast<std::size_t>(dim_));
    bbox_.hi.resize(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
        bbox_.lo[static_cast<std::size_t>(i)] = bl.center[i] - bl.radius;
        bbox_.hi[static_cast<std::size_t>(i)] = bl.center[i] + bl.radius;
    }
    finalize_common();
}

inline Domain::Domain(Polygon2D p) : shape_(std::move(p)) {
    const Polygon2D& pg = polygon();
    dim_ = 2;
    measure_ = pg.area();
    measure_se_ = 0.0;
    diameter_ = pg.diameter();
    bbox_.lo = {pg.vertices()[0].x, pg.vertices()[0].y};
    bbox_.hi = bbox_.lo;
    for (const Vec2& v : pg.vertices()) {
        bbox_.lo[0] = std::min(bbox_.lo[0], v.x);
        bbox_.lo[1] = std::min(bbox_.lo[1], v.y);
        bbox_.hi[0] = std::max(bbox_.hi[0], v.x);
        bbox_.hi[1] = std::max(bbox_.hi[1], v.y);
    }
    tris_ = triangulate(pg);
    tri_cum_area_.reserve(tris_.size());
    double acc = 0.0;
    for (const auto& t : tris_) {
        const auto& v = pg.vertices();
        acc += 0.5 * std::abs(orient2d(v[static_cast<std::size_t>(t[0])],
                                       v[static_cast<std::size_t>(t[1])],
                                       v[static_cast<std::size_t>(t[2])]));
        tri_cum_area_.push_back(acc);
    }
    finalize_common();
}

inline void Domain::support_points(std::vector<std::pair<Point, double>>& out) const {
    if (is_ball()) {
        out.emplace_back(ball().center, ball().radius);
    } else if (is_polygon()) {
        for (const Vec2& v : polygon().vertices()) out.emplace_back(to_point(v), 0.0);
    } else {
        for (const StarPiece& sp : union_pieces().pieces) sp.body.support_points(out);
    }
}

inline bool Domain::contains(const Point& x) const {
    if (x.dim() != dim_)
        throw DimensionMismatch("contains: point dimension does not match domain");
    if (is_ball())
        return distance(x, ball().center) <= ball().radius + eps_geo_;
    if (is_polygon())
        return polygon().contains(to_vec2(x), eps_geo_);
    for (const StarPiece& sp : union_pieces().pieces)
        if (sp.body.contains(x)) return true;
    return false;
}

inline Domain::Domain(UnionPieces u, long mc_samples, std::uint64_t seed)
    : shape_(std::move(u)) {
    const auto& pieces = union_pieces().pieces;
    if (pieces.empty()) throw InvalidGeometry("Domain: union must be non-empty");
    dim_ = pieces.front().body.dim();
    for (const StarPiece& sp : pieces)
        if (sp.body.dim() != dim_)
            throw DimensionMismatch("Domain: union pieces must share a dimension");

    bbox_ = pieces.front().body.bounding_box();
    for (const StarPiece& sp : pieces) {
        const BoundingBox& b = sp.body.bounding_box();
        for (int i = 0; i < dim_; ++i) {
            bbox_.lo[static_cast<std::size_t>(i)] = std::min(bbox_.lo[static_cast<std::size_t>(i)], b.lo[static_cast<std::size_t>(i)]);
            bbox_.hi[static_cast<std::size_t>(i)] = std::max(bbox_.hi[static_cast<std::size_t>(i)], b.hi[static_cast<std::size_t>(i)]);
        }
    }

    std::vector<std::pair<Point, double>> supp;
    support_points(supp);
    diameter_ = 0.0;
    for (std::size_t i = 0; i < supp.size(); ++i)
        for (std::size_t j = i; j < supp.size(); ++j)
            diameter_ = std::max(diameter_, distance(supp[i].first, supp[j].first) +
                                                supp[i].second + supp[j].second);
    eps_geo_ = 1e-9 * diameter_; // needed by contains() during the MC sweep

    // inclusion-exclusion by indicator: hit counting over the joint box
    Rng rng(sub_seed(seed, 0x7a11u));
    long hits = 0;
    Point x(std::vector<double>(static_cast<std::size_t>(dim_), 0.0));
    mc_samples = std::max<long>(mc_samples, 1000);
    for (long s = 0; s < mc_samples; ++s) {
        for (int i = 0; i < dim_; ++i)
            x[i] = rng.uniform(bbox_.lo[static_cast<std::size_t>(i)], bbox_.hi[static_cast<std::size_t>(i)]);
        if (contains(x)) ++hits;
    }
    const double vol = bbox_.volume();
    const double phat = static_cast<double>(hits) / static_cast<double>(mc_samples);
    measure_ = vol * phat;
    measure_se_ = vol * std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(mc_samples));
    finalize_common();
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

inline void sample_ball(const Ball& b, Rng& rng, Point& out) {
    const int n = b.dim();
    out.coords.resize(static_cast<std::size_t>(n));
    switch (n) {
        case 1: {
            out[0] = b.center[0] + b.radius * (2.0 * rng.uniform() - 1.0);
            return;
        }
        case 2: {
            const double r = b.radius * std::sqrt(rng.uniform());
            const double th = 2.0 * std::numbers::pi * rng.uniform();
            out[0] = b.center[0] + r * std::cos(th);
            out[1] = b.center[1] + r * std::sin(th);
            return;
        }
        case 3: {
            const double r = b.radius * std::cbrt(rng.uniform());
            const double z = 2.0 * rng.uniform() - 1.0;
            const double phi = 2.0 * std::numbers::pi * rng.uniform();
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            out[0] = b.center[0] + r * s * std::cos(phi);
            out[1] = b.center[1] + r * s * std::sin(phi);
            out[2] = b.center[2] + r * z;
            return;
        }
        default: {
            // rejection from the box; fine for moderate n
            for (;;) {
                double s2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double u = 2.0 * rng.uniform() - 1.0;
                    out[i] = u;
                    s2 += u * u;
                }
                if (s2 <= 1.0) {
                    for (int i = 0; i < n; ++i) out[i] = b.center[i] + b.radius * out[i];
                    return;
                }
            }
        }
    }
}

// Uniform direction on S^{n-1}; for n = 1 this is a fair sign.
inline void sample_direction(int n, Rng& rng, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else if (n == 2) {
        const double th = 2.0 * std::numbers::pi * rng.uniform();
        out[0] = std::cos(th);
        out[1] = std::sin(th);
    } else if (n == 3) {
        const double z = 2.0 * rng.uniform() - 1.0;
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        out[0] = s * std::cos(phi);
        out[1] = s * std::sin(phi);
        out[2] = z;
    } else {
        throw UnsupportedDimension("sample_direction: n must be 1, 2 or 3");
    }
}

inline void sample_polygon(const Domain& d, Rng& rng, Point& out) {
    const auto& cum = d.triangle_cumulative_area();
    const auto& tris = d.triangles();
    const auto& v = d.polygon().vertices();
    const double target = rng.uniform() * cum.back();
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
    const auto& t = tris[std::min(k, tris.size() - 1)];
    double u = rng.uniform(), w = rng.uniform();
    if (u + w > 1.0) {
        u = 1.0 - u;
        w = 1.0 - w;
    }
    const Vec2 a = v[static_cast<std::size_t>(t[0])];
    const Vec2 b = v[static_cast<std::size_t>(t[1])];
    const Vec2 c = v[static_cast<std::size_t>(t[2])];
    const Vec2 p = a + u * (b - a) + w * (c - a);
    out.coords = {p.x, p.y};
}

// Uniform sample from any domain variant (rejection from the bounding box
// for unions).
inline void sample_domain(const Domain& d, Rng& rng, Point& out) {
    if (d.is_ball()) {
        sample_ball(d.ball(), rng, out);
        return;
    }
    if (d.is_polygon()) {
        sample_polygon(d, rng, out);
        return;
    }
    const BoundingBox& bb = d.bounding_box();
    out.coords.resize(static_cast<std::size_t>(d.dim()));
    for (int tries = 0; tries < 100000; ++tries) {
        for (int i = 0; i < d.dim(); ++i)
            out[i] = rng.uniform(bb.lo[static_cast<std::size_t>(i)], bb.hi[static_cast<std::size_t>(i)]);
        if (d.contains(out)) return;
    }
    throw InvalidGeometry("sample_domain: rejection sampling failed (measure ~ 0?)");
}

// ---------------------------------------------------------------------------
// Spec operations: measure / diameter / contains / segments / star checks
// ---------------------------------------------------------------------------

inline double measure(const Domain& d) { return d.measure(); }
inline double diameter(const Domain& d) { return d.diameter(); }
inline bool contains(const Domain& d, const Point& x) { return d.contains(x); }

// True iff the closed segment [a,b] stays inside d. Polygons use the exact
// edge-crossing test (plus sampling as a backstop for vertex-grazing paths);
// balls are convex; unions fall back to m equispaced samples.
inline bool segment_in_domain(const Domain& d, const Point& a, const Point& b, int m = 24) {
    if (d.is_ball()) return true;
    if (d.is_polygon()) {
        const Vec2 pa = to_vec2(a), pb = to_vec2(b);
        const auto& v = d.polygon().vertices();
        const double eps = d.boundary_tolerance();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (segments_cross(pa, pb, v[i], v[(i + 1) % v.size()], eps)) return false;
        }
        for (int k = 1; k <= m; ++k) {
            const double t = static_cast<double>(k) / (m + 1);
            const Vec2 p = pa + t * (pb - pa);
            if (!d.polygon().contains(p, eps)) return false;
        }
        return true;
    }
    Point p(std::vector<double>(static_cast<std::size_t>(d.dim()), 0.0));
    for (int k = 1; k <= m; ++k) {
        const double t = static_cast<double>(k) / (m + 1);
        for (int i = 0; i < d.dim(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
        if (!d.contains(p)) return false;
    }
    return true;
}

// Exact where possible, sampled for unions.
inline bool ball_inside_domain(const Ball& s, const Domain& d) {
    if (s.dim() != d.dim()) throw DimensionMismatch("ball_inside_domain: dimension mismatch");
    const double eps = d.boundary_tolerance();
    if (d.is_ball())
        return distance(s.center, d.ball().center) + s.radius <= d.ball().radius + eps;
    if (d.is_polygon()) {
        const Vec2 c = to_vec2(s.center);
        return d.polygon().contains(c, eps) &&
               d.polygon().boundary_distance(c) + eps >= s.radius;
    }
    if (!d.contains(s.center)) return false;
    Rng rng(sub_seed(0x5eedULL, 0xba11u));
    std::vector<double> dir;
    Point p(std::vector<double>(static_cast<std::size_t>(d.dim()), 0.0));
    for (int k = 0; k < 256; ++k) {
        sample_direction(d.dim(), rng, dir);
        for (int i = 0; i < d.dim(); ++i)
            p[i] = s.center[i] + (1.0 - 1e-9) * s.radius * dir[static_cast<std::size_t>(i)];
        if (!d.contains(p)) return false;
    }
    return true;
}

struct StarCheckResult {
    bool certified = false;
    StarCertificate certificate;
    std::optional<std::pair<Point, Point>> violation;
};

// Sampled condition-(A) check: k_s draws from the kernel against k_d draws
// from the body, each pair tested with segment_in_domain.
inline StarCheckResult check_starshaped(const Domain& body, const Ball& kernel,
                                        int k_s, int k_d, int segment_samples = 24,
                                        std::uint64_t seed = 0x5eedULL) {
    if (!ball_inside_domain(kernel, body))
        throw KernelNotContained("check_starshaped: kernel ball is not contained in the body");

    StarCheckResult res;
    res.certificate = {k_s, k_d, segment_samples, seed, 0.0};

    Rng rng_s(sub_seed(seed, 0x5a1u));
    Rng rng_d(sub_seed(seed, 0x5a2u));
    std::vector<Point> kernel_pts(static_cast<std::size_t>(k_s));
    std::vector<Point> body_pts(static_cast<std::size_t>(k_d));
    for (auto& p : kernel_pts) sample_ball(kernel, rng_s, p);
    for (auto& p : body_pts) sample_domain(body, rng_d, p);

    for (const Point& s : kernel_pts) {
        for (const Point& y : body_pts) {
            if (!segment_in_domain(body, s, y, segment_samples)) {
                res.certified = false;
                res.violation = std::make_pair(s, y);
                return res;
            }
        }
    }
    res.certified = true;
    return res;
}

// ---------------------------------------------------------------------------
// Overlap measure
// ---------------------------------------------------------------------------

struct MeasureEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Area of the intersection of two disks (n = 2).
inline double disk_lens_area(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return std::numbers::pi * r * r;
    }
    const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0));
    const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0));
    const double t = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(t, 0.0));
}

// Volume of the intersection of two balls (n = 3).
inline double ball_lens_volume(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return (4.0 / 3.0) * std::numbers::pi * r * r * r;
    }
    const double a = (d * d - r2 * r2 + r1 * r1) / (2.0 * d);
    const double h1 = r1 - a;
    const double h2 = r2 - (d - a);
    auto cap = [](double r, double h) { return std::numbers::pi * h * h * (3.0 * r - h) / 3.0; };
    return cap(r1, h1) + cap(r2, h2);
}

// |a ∩ b|. Exact for ball-ball in n ∈ {1,2,3}; Monte Carlo with standard
// error otherwise.
inline MeasureEstimate overlap_measure(const Domain& a, const Domain& b,
                                       long samples = 200000, std::uint64_t seed = 0x5eedULL) {
    if (a.dim() != b.dim()) throw DimensionMismatch("overlap_measure: dimension mismatch");
    if (a.is_ball() && b.is_ball()) {
        const Ball& x = a.ball();
        const Ball& y = b.ball();
        const double d = distance(x.center, y.center);
        switch (a.dim()) {
            case 1: {
                const double lo = std::max(x.center[0] - x.radius, y.center[0] - y.radius);
                const double hi = std::min(x.center[0] + x.radius, y.center[0] + y.radius);
                return {std::max(hi - lo, 0.0), 0.0};
            }
            case 2: return {disk_lens_area(x.radius, y.radius, d), 0.0};
            case 3: return {ball_lens_volume(x.radius, y.radius, d), 0.0};
            default: break; // fall through to MC
        }
    }
    const auto box = intersect(a.bounding_box(), b.bounding_box());
    if (!box) return {0.0, 0.0};
    Rng rng(sub_seed(seed, 0x04e1u));
    long hits = 0;
    Point x(std::vector<double>(static_cast<std::size_t>(a.dim()), 0.0));
    for (long s = 0; s < samples; ++s) {
        for (int i = 0; i < a.dim(); ++i)
            x[i] = rng.uniform(box->lo[static_cast<std::size_t>(i)], box->hi[static_cast<std::size_t>(i)]);
        if (a.contains(x) && b.contains(x)) ++hits;
    }
    const double vol = box->volume();
    const double phat = static_cast<double>(hits) / static_cast<double>(samples);
    return {vol * phat,
            vol * std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(samples))};
}

// ---------------------------------------------------------------------------
// Chain ordering
// ---------------------------------------------------------------------------

// |piece ∩ (∪ prefix)| estimated by direct sampling of the piece.
inline MeasureEstimate prefix_overlap(const StarPiece& piece,
                                      const std::vector<const StarPiece*>& prefix,
                                      long samples, std::uint64_t seed) {
    Rng rng(sub_seed(seed, 0x9cefu));
    long hits = 0;
    Point x;
    for (long s = 0; s < samples; ++s) {
        sample_domain(piece.body, rng, x);
        for (const StarPiece* q : prefix) {
            if (q->body.contains(x)) {
                ++hits;
                break;
            }
        }
    }
    const double m = piece.body.measure();
    const double phat = static_cast<double>(hits) / static_cast<double>(samples);
    return {m * phat,
            m * std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(samples))};
}

// Greedy reordering so that every prefix overlaps the next piece; ties (and
// choices) resolved by largest overlap, which maximizes lambda. Throws
// DisconnectedUnion when no remaining piece meets the prefix.
inline Chain order_chain(std::vector<StarPiece> pieces, long mc_samples = 50000,
                         std::uint64_t seed = 0x5eedULL) {
    if (pieces.empty()) throw InvalidGeometry("order_chain: no pieces");
    const double R = pieces.front().kernel.radius;
    for (const StarPiece& sp : pieces)
        if (std::abs(sp.kernel.radius - R) > 1e-12 * std::max(1.0, R))
            throw InvalidGeometry("order_chain: kernel radii must all be equal");

    Chain chain;
    chain.R = R;
    chain.N = static_cast<int>(pieces.size());

    std::vector<bool> used(pieces.size(), false);
    std::vector<std::size_t> order;
    order.push_back(0);
    used[0] = true;

    double lambda = std::numeric_limits<double>::infinity();
    std::vector<const StarPiece*> prefix{&pieces[0]};
    while (order.size() < pieces.size()) {
        double best = 0.0;
        std::size_t best_idx = pieces.size();
        for (std::size_t c = 0; c < pieces.size(); ++c) {
            if (used[c]) continue;
            const MeasureEstimate ov =
                prefix_overlap(pieces[c], prefix, mc_samples, sub_seed(seed, order.size(), c));
            if (ov.value > best) {
                best = ov.value;
                best_idx = c;
            }
        }
        if (best_idx == pieces.size() || !(best > 0.0))
            throw DisconnectedUnion("order_chain: remaining pieces do not overlap the prefix union");
        used[best_idx] = true;
        order.push_back(best_idx);
        prefix.push_back(&pieces[best_idx]);
        lambda = std::min(lambda, best);
    }

    std::vector<StarPiece> ordered;
    ordered.reserve(pieces.size());
    for (std::size_t i : order) ordered.push_back(std::move(pieces[i]));
    chain.pieces = std::move(ordered);
    chain.lambda = (chain.N >= 2) ? lambda : 0.0;
    chain.omega = Domain(UnionPieces{chain.pieces}, std::max<long>(mc_samples * 4, 100000),
                         sub_seed(seed, 0x0e6au));
    return chain;
}

// Single-piece chain for a domain that is star-shaped with respect to the
// given kernel ball.
inline Chain single_piece_chain(Domain body, Ball kernel, int k_s = 8, int k_d = 64,
                                std::uint64_t seed = 0x5eedULL) {
    StarCheckResult chk = check_starshaped(body, kernel, k_s, k_d, 24, seed);
    if (!chk.certified)
        throw InvalidGeometry("single_piece_chain: body is not star-shaped w.r.t. the kernel");
    Chain chain;
    chain.R = kernel.radius;
    chain.N = 1;
    chain.lambda = 0.0;
    chain.omega = body;
    chain.pieces.push_back(StarPiece{std::move(body), std::move(kernel), chk.certificate});
    return chain;
}

} // namespace pwlab
