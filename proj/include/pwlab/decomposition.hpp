#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "pwlab/errors.hpp"
#include "pwlab/geometry.hpp"

// Constructive decomposition of a simple polygon into a chain of overlapping
// star-shaped pieces with a common kernel-ball radius: triangulate, greedily
// merge adjacent triangles while the merged geometric kernel keeps a ball of
// at least the current candidate radius, expand across piece boundaries to
// create positive overlaps, then shrink all kernel balls to the common
// minimum radius.

namespace pwlab {

struct DecompositionParams {
    int target_pieces = 1;                  // piece count hint (merge stops at this count)
    double min_kernel_radius_fraction = 0.02; // of the polygon diameter
    long mc_budget = 50000;
    std::uint64_t seed = 0x5eedULL;

    void validate() const {
        if (target_pieces < 1)
            throw InvalidGeometry("DecompositionParams: target piece count must be positive");
        if (!(min_kernel_radius_fraction > 0.0) || min_kernel_radius_fraction > 1.0)
            throw InvalidGeometry("DecompositionParams: kernel radius fraction must be in (0,1]");
        if (mc_budget <= 0)
            throw InvalidGeometry("DecompositionParams: MC budget must be positive");
    }
};

namespace detail_decomp {

// Clip a convex polygon against the half-plane left of a -> b.
inline std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, Vec2 a, Vec2 b) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = poly[i];
        const Vec2 q = poly[(i + 1) % n];
        const double dp = orient2d(a, b, p);
        const double dq = orient2d(a, b, q);
        if (dp >= 0.0) out.push_back(p);
        if ((dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0)) {
            const double t = dp / (dp - dq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

inline double loop_area(const std::vector<Vec2>& loop) {
    double s = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i)
        s += cross(loop[i], loop[(i + 1) % loop.size()]);
    return 0.5 * s;
}

} // namespace detail_decomp

// Geometric kernel of a polygon boundary loop: intersection of the left
// half-planes of all directed edges. Returns an empty list when the kernel is
// empty or degenerate.
inline std::vector<Vec2> polygon_kernel(const std::vector<Vec2>& loop) {
    double lo_x = loop[0].x, hi_x = loop[0].x, lo_y = loop[0].y, hi_y = loop[0].y;
    for (const Vec2& v : loop) {
        lo_x = std::min(lo_x, v.x);
        hi_x = std::max(hi_x, v.x);
        lo_y = std::min(lo_y, v.y);
        hi_y = std::max(hi_y, v.y);
    }
    const double pad = 0.01 * std::max(hi_x - lo_x, hi_y - lo_y) + 1e-12;
    std::vector<Vec2> ker = {{lo_x - pad, lo_y - pad},
                             {hi_x + pad, lo_y - pad},
                             {hi_x + pad, hi_y + pad},
                             {lo_x - pad, hi_y + pad}};
    for (std::size_t i = 0; i < loop.size() && !ker.empty(); ++i)
        ker = detail_decomp::clip_half_plane(ker, loop[i], loop[(i + 1) % loop.size()]);
    if (ker.size() < 3) return {};
    const double scale = std::max(hi_x - lo_x, hi_y - lo_y);
    if (detail_decomp::loop_area(ker) < 1e-14 * scale * scale) return {};
    return ker;
}

// Chebyshev ball (largest inscribed ball) of a convex polygon, solved by
// enumerating active-constraint triples of the small LP.
inline std::optional<Ball> chebyshev_ball(const std::vector<Vec2>& convex) {
    if (convex.size() < 3) return std::nullopt;
    struct Row {
        double nx, ny, b; // nx*cx + ny*cy - r >= b
    };
    std::vector<Row> rows;
    double scale = 0.0;
    for (std::size_t i = 0; i < convex.size(); ++i) {
        const Vec2 a = convex[i];
        const Vec2 b = convex[(i + 1) % convex.size()];
        const Vec2 e = b - a;
        const double len = norm(e);
        if (len < 1e-15) continue;
        const Vec2 nin{-e.y / len, e.x / len};
        rows.push_back({nin.x, nin.y, dot(nin, a)});
        scale = std::max(scale, len);
    }
    if (rows.size() < 3) return std::nullopt;

    const double feas_eps = 1e-9 * std::max(scale, 1.0);
    double best_r = -1.0;
    Vec2 best_c{};
    const std::size_t m = rows.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t k = j + 1; k < m; ++k) {
                // solve the 3x3 system with all three constraints active
                const Row& A = rows[i];
                const Row& B = rows[j];
                const Row& Cc = rows[k];
                const double det = A.nx * (B.ny * -1.0 - (-1.0) * Cc.ny) -
                                   A.ny * (B.nx * -1.0 - (-1.0) * Cc.nx) +
                                   (-1.0) * (B.nx * Cc.ny - B.ny * Cc.nx);
                if (std::abs(det) < 1e-14) continue;
                const double dx = A.b * (B.ny * -1.0 - (-1.0) * Cc.ny) -
                                  A.ny * (B.b * -1.0 - (-1.0) * Cc.b) +
                                  (-1.0) * (B.b * Cc.ny - B.ny * Cc.b);
                const double dy = A.nx * (B.b * -1.0 - (-1.0) * Cc.b) -
                                  A.b * (B.nx * -1.0 - (-1.0) * Cc.nx) +
                                  (-1.0) * (B.nx * Cc.b - B.b * Cc.nx);
                const double dr = A.nx * (B.ny * Cc.b - B.b * Cc.ny) -
                                  A.ny * (B.nx * Cc.b - B.b * Cc.nx) +
                                  A.b * (B.nx * Cc.ny - B.ny * Cc.nx);
                const double cx = dx / det, cy = dy / det, r = dr / det;
                if (!(r > best_r)) continue;
                bool ok = true;
                for (const Row& rw : rows) {
                    if (rw.nx * cx + rw.ny * cy - r < rw.b - feas_eps) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    best_r = r;
                    best_c = {cx, cy};
                }
            }
        }
    }
    if (!(best_r > 0.0)) return std::nullopt;
    return Ball(Point(best_c.x, best_c.y), best_r);
}

// Largest certified kernel ball of a simple polygon, or nothing when the
// geometric kernel is empty.
inline std::optional<Ball> kernel_ball(const Polygon2D& poly, std::uint64_t seed = 0x5eedULL) {
    const std::vector<Vec2> ker = polygon_kernel(poly.vertices());
    if (ker.empty()) return std::nullopt;
    std::optional<Ball> ball = chebyshev_ball(ker);
    if (!ball) return std::nullopt;
    Domain body(poly);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const double shrink = (attempt == 0) ? 1.0 : 1.0 - 1e-9;
        Ball candidate(ball->center, ball->radius * shrink);
        if (!ball_inside_domain(candidate, body)) continue;
        const StarCheckResult chk = check_starshaped(body, candidate, 6, 48, 24, seed);
        if (chk.certified) return candidate;
    }
    return std::nullopt;
}

namespace detail_decomp {

using TriSet = std::vector<int>; // sorted triangle indices

struct PieceGeom {
    std::vector<Vec2> loop; // boundary, CCW
    std::optional<Ball> kernel;
    double kernel_radius = -1.0;
};

// Boundary of a union of triangles: directed edges that are not cancelled by
// a reverse edge, chained into a single CCW loop. Multiple loops (holes,
// detached parts) yield nullopt.
inline std::optional<std::vector<Vec2>> piece_boundary(const std::vector<Vec2>& verts,
                                                       const std::vector<std::array<int, 3>>& tris,
                                                       const TriSet& piece) {
    std::set<std::pair<int, int>> edges;
    for (int t : piece) {
        const auto& tr = tris[static_cast<std::size_t>(t)];
        for (int e = 0; e < 3; ++e) {
            const int u = tr[static_cast<std::size_t>(e)];
            const int v = tr[static_cast<std::size_t>((e + 1) % 3)];
            const auto rev = edges.find({v, u});
            if (rev != edges.end())
                edges.erase(rev);
            else
                edges.insert({u, v});
        }
    }
    if (edges.empty()) return std::nullopt;

    std::map<int, std::vector<int>> out;
    for (const auto& [u, v] : edges) out[u].push_back(v);

    const int start = edges.begin()->first;
    std::vector<int> loop_idx;
    int cur = start;
    int prev = -1;
    for (std::size_t guard = 0; guard <= 2 * edges.size(); ++guard) {
        loop_idx.push_back(cur);
        auto it = out.find(cur);
        if (it == out.end() || it->second.empty()) return std::nullopt;
        int next = -1;
        if (it->second.size() == 1) {
            next = it->second[0];
        } else {
            // pinch vertex: take the sharpest left turn to keep the region on
            // the left
            const Vec2 din = (prev >= 0)
                                 ? verts[static_cast<std::size_t>(cur)] - verts[static_cast<std::size_t>(prev)]
                                 : Vec2{1.0, 0.0};
            double best_angle = -1e300;
            for (int cand : it->second) {
                const Vec2 d = verts[static_cast<std::size_t>(cand)] - verts[static_cast<std::size_t>(cur)];
                const double ang = std::atan2(cross(din, d), dot(din, d));
                if (ang > best_angle) {
                    best_angle = ang;
                    next = cand;
                }
            }
        }
        auto& vec = out[cur];
        vec.erase(std::find(vec.begin(), vec.end(), next));
        prev = cur;
        cur = next;
        if (cur == start) break;
    }
    if (cur != start) return std::nullopt;
    for (const auto& [u, vs] : out)
        if (!vs.empty()) return std::nullopt; // more than one loop

    std::vector<Vec2> loop;
    loop.reserve(loop_idx.size());
    for (int i : loop_idx) loop.push_back(verts[static_cast<std::size_t>(i)]);
    if (loop_area(loop) <= 0.0) return std::nullopt;
    return loop;
}

inline PieceGeom piece_geometry(const std::vector<Vec2>& verts,
                                const std::vector<std::array<int, 3>>& tris, const TriSet& piece) {
    PieceGeom g;
    auto loop = piece_boundary(verts, tris, piece);
    if (!loop) return g;
    g.loop = std::move(*loop);
    const std::vector<Vec2> ker = polygon_kernel(g.loop);
    if (ker.empty()) return g;
    g.kernel = chebyshev_ball(ker);
    if (g.kernel) g.kernel_radius = g.kernel->radius;
    return g;
}

inline bool share_edge(const std::vector<std::array<int, 3>>& tris, const TriSet& a,
                       const TriSet& b) {
    std::set<std::pair<int, int>> ea;
    for (int t : a) {
        const auto& tr = tris[static_cast<std::size_t>(t)];
        for (int e = 0; e < 3; ++e) {
            int u = tr[static_cast<std::size_t>(e)], v = tr[static_cast<std::size_t>((e + 1) % 3)];
            ea.insert({std::min(u, v), std::max(u, v)});
        }
    }
    for (int t : b) {
        const auto& tr = tris[static_cast<std::size_t>(t)];
        for (int e = 0; e < 3; ++e) {
            int u = tr[static_cast<std::size_t>(e)], v = tr[static_cast<std::size_t>((e + 1) % 3)];
            if (ea.count({std::min(u, v), std::max(u, v)})) return true;
        }
    }
    return false;
}

inline TriSet merged(const TriSet& a, const TriSet& b) {
    TriSet m;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    return m;
}

inline bool overlap_in_area(const TriSet& a, const TriSet& b) {
    TriSet inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    return !inter.empty();
}

} // namespace detail_decomp

// Proposition-style decomposition of a simple polygon. The chain's union
// equals the polygon (pieces are unions of triangles of one triangulation),
// every piece is star-certified against its kernel ball, and all kernel radii
// equal the common minimum R.
inline Chain decompose(const Polygon2D& poly, const DecompositionParams& params) {
    using namespace detail_decomp;
    params.validate();

    const std::vector<Vec2>& verts = poly.vertices();
    const std::vector<std::array<int, 3>> tris = triangulate(poly);
    const double floor_r = params.min_kernel_radius_fraction * poly.diameter();

    std::vector<TriSet> pieces;
    std::vector<PieceGeom> geoms;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        pieces.push_back({t});
        geoms.push_back(piece_geometry(verts, tris, pieces.back()));
    }

    auto min_radius = [&]() {
        double r = std::numeric_limits<double>::infinity();
        for (const PieceGeom& g : geoms) r = std::min(r, g.kernel_radius);
        return r;
    };

    // merge phase: never decrease the candidate common radius
    while (static_cast<int>(pieces.size()) > params.target_pieces) {
        const double r_cand = min_radius();
        double best_r = -1.0;
        std::size_t best_i = 0, best_j = 0;
        TriSet best_set;
        PieceGeom best_geom;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            for (std::size_t j = i + 1; j < pieces.size(); ++j) {
                if (!share_edge(tris, pieces[i], pieces[j])) continue;
                TriSet m = merged(pieces[i], pieces[j]);
                PieceGeom g = piece_geometry(verts, tris, m);
                if (!g.kernel) continue;
                if (g.kernel_radius + 1e-15 < r_cand) continue;
                if (g.kernel_radius > best_r) {
                    best_r = g.kernel_radius;
                    best_i = i;
                    best_j = j;
                    best_set = std::move(m);
                    best_geom = std::move(g);
                }
            }
        }
        if (best_r < 0.0) break; // no admissible merge left
        pieces[best_i] = std::move(best_set);
        geoms[best_i] = std::move(best_geom);
        pieces.erase(pieces.begin() + static_cast<long>(best_j));
        geoms.erase(geoms.begin() + static_cast<long>(best_j));
    }

    // overlap phase: adjacent pieces must share positive area so that the
    // chain's prefix-overlap infimum is positive
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        for (std::size_t j = i + 1; j < pieces.size(); ++j) {
            if (!share_edge(tris, pieces[i], pieces[j])) continue;
            if (overlap_in_area(pieces[i], pieces[j])) continue;
            double best_r = -1.0;
            std::size_t best_side = 0;
            TriSet best_set;
            PieceGeom best_geom;
            for (int dir = 0; dir < 2; ++dir) {
                const std::size_t src = dir == 0 ? i : j;
                const std::size_t dst = dir == 0 ? j : i;
                for (int t : pieces[dst]) {
                    if (std::binary_search(pieces[src].begin(), pieces[src].end(), t)) continue;
                    if (!share_edge(tris, pieces[src], {t})) continue;
                    TriSet m = merged(pieces[src], {t});
                    PieceGeom g = piece_geometry(verts, tris, m);
                    if (!g.kernel || g.kernel_radius < floor_r) continue;
                    if (g.kernel_radius > best_r) {
                        best_r = g.kernel_radius;
                        best_side = src;
                        best_set = std::move(m);
                        best_geom = std::move(g);
                    }
                }
            }
            if (best_r < 0.0)
                throw DegenerateKernel(
                    "decompose: cannot create an overlap without dropping a kernel below the "
                    "minimum radius fraction");
            pieces[best_side] = std::move(best_set);
            geoms[best_side] = std::move(best_geom);
        }
    }

    const double R = min_radius();
    if (!(R > 0.0) || R < floor_r)
        throw DegenerateKernel("decompose: common kernel radius below the minimum fraction");

    // shrink all kernels to the common R by radius reduction (centers fixed,
    // so the exact containment certificates stay valid)
    std::vector<StarPiece> star_pieces;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        Polygon2D body_poly(geoms[i].loop);
        Domain body(body_poly);
        Ball kernel(geoms[i].kernel->center, R);
        const StarCheckResult chk =
            check_starshaped(body, kernel, 6, 48, 24, sub_seed(params.seed, 0xce47ULL, i));
        if (!chk.certified)
            throw DegenerateKernel("decompose: piece failed star certification");
        star_pieces.push_back(StarPiece{std::move(body), std::move(kernel), chk.certificate});
    }

    if (star_pieces.size() == 1) {
        Chain chain;
        chain.N = 1;
        chain.R = R;
        chain.lambda = 0.0;
        chain.omega = star_pieces.front().body;
        chain.pieces = std::move(star_pieces);
        return chain;
    }
    return order_chain(std::move(star_pieces), params.mc_budget, params.seed);
}

} // namespace pwlab
