#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace pwlab;
using namespace fixtures;
using Catch::Approx;

namespace {

StarPiece make_disk_piece(Point c, double r, double kr, std::uint64_t seed) {
    Domain body(Ball(c, r));
    Ball kernel(c, kr);
    const StarCheckResult chk = check_starshaped(body, kernel, 6, 48, 16, seed);
    REQUIRE(chk.certified);
    return StarPiece{std::move(body), std::move(kernel), chk.certificate};
}

Polygon2D rotated_translated(const Polygon2D& poly, double theta, Vec2 t) {
    std::vector<Vec2> vs;
    const double c = std::cos(theta), s = std::sin(theta);
    for (const Vec2& v : poly.vertices())
        vs.push_back({c * v.x - s * v.y + t.x, s * v.x + c * v.y + t.y});
    return Polygon2D(std::move(vs));
}

Polygon2D scaled_polygon(const Polygon2D& poly, double t) {
    std::vector<Vec2> vs;
    for (const Vec2& v : poly.vertices()) vs.push_back({t * v.x, t * v.y});
    return Polygon2D(std::move(vs));
}

} // namespace

TEST_CASE("measure: ball and polygon are exact") {
    CHECK(measure(unit_disk()) == Approx(kPi).epsilon(1e-12));
    CHECK(measure(unit_square()) == Approx(1.0).epsilon(1e-12));
    CHECK(measure(Domain(Ball(Point(1.0, 2.0, 3.0), 2.0))) ==
          Approx(4.0 / 3.0 * kPi * 8.0).epsilon(1e-12));
    CHECK(measure(Domain(Ball(point1(0.5), 1.5))) == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("measure: union of two disjoint disks is additive within MC error") {
    UnionPieces u;
    u.pieces.push_back(make_disk_piece(Point(0.0, 0.0), 1.0, 0.5, 1));
    u.pieces.push_back(make_disk_piece(Point(3.0, 0.0), 1.0, 0.5, 2));
    Domain dom(std::move(u), 400000, kSeed);
    // disjointness => additivity oracle
    CHECK(std::abs(dom.measure() - 2.0 * kPi) <= 5.0 * dom.measure_std_error());
    CHECK(dom.measure_std_error() > 0.0);
}

TEST_CASE("diameter: balls, polygons, unions") {
    CHECK(diameter(Domain(Ball(Point(0.0, 0.0), 1.5))) == Approx(3.0));
    CHECK(diameter(unit_square()) == Approx(std::sqrt(2.0)));
    UnionPieces u;
    u.pieces.push_back(make_disk_piece(Point(0.0, 0.0), 1.0, 0.5, 1));
    u.pieces.push_back(make_disk_piece(Point(3.0, 0.0), 1.0, 0.5, 2));
    Domain dom(std::move(u), 20000, kSeed);
    // hull-point oracle: farthest padded support pair = 3 + 1 + 1
    CHECK(diameter(dom) == Approx(5.0).epsilon(1e-12));
}

TEST_CASE("contains: interior, exterior, boundary tolerance") {
    const Domain disk = unit_disk();
    CHECK(contains(disk, Point(0.0, 0.0)));
    CHECK_FALSE(contains(disk, Point(2.0, 0.0)));
    // exact-arithmetic oracle: the point is strictly inside
    CHECK(contains(unit_square(), Point(0.5, 1.0 - 1e-12)));
    CHECK_THROWS_AS(contains(disk, Point(std::vector<double>{1.0, 2.0, 3.0})), DimensionMismatch);
}

TEST_CASE("segment_in_domain: convexity, blocked notch, degenerate segment") {
    const Domain square = unit_square();
    Rng rng(kSeed);
    Point a, b;
    for (int i = 0; i < 32; ++i) {
        sample_domain(square, rng, a);
        sample_domain(square, rng, b);
        CHECK(segment_in_domain(square, a, b));
    }

    const Domain lshape((l_hexagon()));
    // edge-intersection oracle: the segment crosses the edge (2,1)-(1,1)
    CHECK_FALSE(segment_in_domain(lshape, Point(1.6, 0.5), Point(0.5, 1.6)));
    CHECK(segment_in_domain(lshape, Point(1.6, 0.5), Point(0.2, 0.2)));

    const Domain disk = unit_disk();
    CHECK(segment_in_domain(disk, Point(0.3, 0.3), Point(0.3, 0.3)));
}

TEST_CASE("check_starshaped: convex body, blocked kernel, star polygon") {
    const Domain disk = unit_disk();
    const StarCheckResult ok = check_starshaped(disk, Ball(Point(0.0, 0.0), 0.5), 8, 64, 16, kSeed);
    CHECK(ok.certified);
    CHECK(ok.certificate.max_violation == 0.0);

    // kernel ball stuck in one arm of the L: explicit blocked segment exists
    const Domain lshape((l_hexagon()));
    const StarCheckResult bad =
        check_starshaped(lshape, Ball(Point(1.7, 0.5), 0.2), 12, 96, 16, kSeed);
    CHECK_FALSE(bad.certified);
    REQUIRE(bad.violation.has_value());
    CHECK_FALSE(segment_in_domain(lshape, bad.violation->first, bad.violation->second));

    // non-convex star polygon, kernel ball at the center
    std::vector<Vec2> star;
    for (int k = 0; k < 10; ++k) {
        const double r = (k % 2 == 0) ? 1.0 : 0.5;
        const double th = kPi * k / 5.0;
        star.push_back({r * std::cos(th), r * std::sin(th)});
    }
    const Domain star_dom{Polygon2D(std::move(star))};
    CHECK_FALSE(star_dom.polygon().is_convex());
    const StarCheckResult star_ok =
        check_starshaped(star_dom, Ball(Point(0.0, 0.0), 0.3), 8, 96, 24, kSeed);
    CHECK(star_ok.certified);

    CHECK_THROWS_AS(check_starshaped(disk, Ball(Point(0.9, 0.0), 0.5), 4, 8, 8, kSeed),
                    KernelNotContained);
}

TEST_CASE("overlap_measure: exact lens and Monte Carlo") {
    const Domain a = unit_disk();
    CHECK(overlap_measure(a, a).value == Approx(kPi).epsilon(1e-12));

    const Domain far(Ball(Point(5.0, 0.0), 1.0));
    CHECK(overlap_measure(a, far).value == 0.0);

    // lens-area closed form: d = 1, r = 1 -> 2 pi / 3 - sqrt(3)/2
    const Domain b(Ball(Point(1.0, 0.0), 1.0));
    const double lens = 2.0 * kPi / 3.0 - std::sqrt(3.0) / 2.0;
    CHECK(overlap_measure(a, b).value == Approx(lens).epsilon(1e-12));

    // MC path vs quarter-disk closed form
    const MeasureEstimate mc = overlap_measure(a, unit_square(), 400000, kSeed);
    CHECK(std::abs(mc.value - kPi / 4.0) <= 5.0 * mc.std_error);

    // 1D and 3D ball overlaps are exact
    const Domain i1(Ball(point1(0.0), 1.0));
    const Domain i2(Ball(point1(1.0), 1.0));
    CHECK(overlap_measure(i1, i2).value == Approx(1.0));
    const Domain s1(Ball(Point(0.0, 0.0, 0.0), 1.0));
    const Domain s2(Ball(Point(1.0, 0.0, 0.0), 1.0));
    // two-cap volume: 2 * pi h^2 (3 - h) / 3 with h = 1/2
    CHECK(overlap_measure(s1, s2).value ==
          Approx(2.0 * kPi * 0.25 * (3.0 - 0.5) / 3.0).epsilon(1e-12));
}

TEST_CASE("order_chain: keeps valid order, reorders, rejects disconnected") {
    std::vector<StarPiece> in_order;
    for (int i = 0; i < 3; ++i)
        in_order.push_back(make_disk_piece(Point(1.5 * i, 0.0), 1.0, 0.5, 10 + i));
    const Chain same = order_chain(in_order, 20000, kSeed);
    CHECK(same.N == 3);
    CHECK(same.lambda > 0.0);
    for (int i = 0; i < 3; ++i)
        CHECK(same.pieces[static_cast<std::size_t>(i)].body.ball().center[0] ==
              Approx(1.5 * i));

    // overlap-graph BFS oracle: [left, right, middle] must come back ordered
    std::vector<StarPiece> scrambled;
    scrambled.push_back(make_disk_piece(Point(0.0, 0.0), 1.0, 0.5, 1));
    scrambled.push_back(make_disk_piece(Point(3.0, 0.0), 1.0, 0.5, 2));
    scrambled.push_back(make_disk_piece(Point(1.5, 0.0), 1.0, 0.5, 3));
    const Chain fixed = order_chain(scrambled, 20000, kSeed);
    CHECK(fixed.pieces[0].body.ball().center[0] == Approx(0.0));
    CHECK(fixed.pieces[1].body.ball().center[0] == Approx(1.5));
    CHECK(fixed.pieces[2].body.ball().center[0] == Approx(3.0));

    std::vector<StarPiece> disjoint;
    disjoint.push_back(make_disk_piece(Point(0.0, 0.0), 1.0, 0.5, 1));
    disjoint.push_back(make_disk_piece(Point(5.0, 0.0), 1.0, 0.5, 2));
    CHECK_THROWS_AS(order_chain(disjoint, 20000, kSeed), DisconnectedUnion);

    std::vector<StarPiece> unequal;
    unequal.push_back(make_disk_piece(Point(0.0, 0.0), 1.0, 0.5, 1));
    unequal.push_back(make_disk_piece(Point(1.0, 0.0), 1.0, 0.4, 2));
    CHECK_THROWS_AS(order_chain(unequal, 20000, kSeed), InvalidGeometry);
}

TEST_CASE("chain prefix overlaps are re-checkable by overlap_measure") {
    const Chain chain = three_disk_chain();
    for (int i = 1; i < chain.N; ++i) {
        UnionPieces prefix;
        for (int j = 0; j < i; ++j) prefix.pieces.push_back(chain.pieces[static_cast<std::size_t>(j)]);
        Domain prefix_dom(std::move(prefix), 200000, kSeed + static_cast<std::uint64_t>(i));
        const MeasureEstimate ov =
            overlap_measure(chain.pieces[static_cast<std::size_t>(i)].body, prefix_dom, 200000, kSeed);
        CHECK(ov.value + 4.0 * ov.std_error + 0.02 >= chain.lambda);
    }
}

TEST_CASE("rigid-motion invariance of measure, diameter and chain constants") {
    const Polygon2D l = l_hexagon();
    const Polygon2D moved = rotated_translated(l, 0.7, {3.0, -2.0});
    CHECK(Domain(moved).measure() == Approx(Domain(l).measure()).epsilon(1e-12));
    CHECK(Domain(moved).diameter() == Approx(Domain(l).diameter()).epsilon(1e-12));

    // ball-ball overlaps are exact, so lambda and R are exactly invariant
    auto chain_at = [&](double theta, Vec2 t) {
        const double c = std::cos(theta), s = std::sin(theta);
        std::vector<StarPiece> pieces;
        for (int i = 0; i < 2; ++i) {
            const double x0 = 1.2 * i;
            pieces.push_back(make_disk_piece(
                Point(c * x0 + t.x, s * x0 + t.y), 1.0, 0.5, 20 + static_cast<std::uint64_t>(i)));
        }
        return order_chain(std::move(pieces), 20000, kSeed);
    };
    const Chain base = chain_at(0.0, {0.0, 0.0});
    const Chain moved_chain = chain_at(1.1, {-4.0, 2.5});
    CHECK(moved_chain.R == Approx(base.R).epsilon(1e-12));
    CHECK(moved_chain.lambda == Approx(base.lambda).epsilon(1e-9));
}

TEST_CASE("scaling laws are exact for polygons and balls") {
    const double t = 2.5;
    const Polygon2D l = l_hexagon();
    CHECK(Domain(scaled_polygon(l, t)).measure() == Approx(t * t * Domain(l).measure()));
    CHECK(Domain(scaled_polygon(l, t)).diameter() == Approx(t * Domain(l).diameter()));
    CHECK(Domain(Ball(Point(0.0, 0.0), t)).measure() == Approx(t * t * kPi));
}

TEST_CASE("convex polygons are star-shaped w.r.t. any interior ball") {
    std::vector<Vec2> hex;
    for (int k = 0; k < 6; ++k)
        hex.push_back({std::cos(kPi * k / 3.0), std::sin(kPi * k / 3.0)});
    const Domain dom{Polygon2D(std::move(hex))};
    Rng rng(kSeed);
    Point c;
    for (int i = 0; i < 8; ++i) {
        sample_domain(dom, rng, c);
        const double r = 0.9 * dom.polygon().boundary_distance(to_vec2(c));
        if (r <= 0.0) continue;
        CHECK(check_starshaped(dom, Ball(c, r), 6, 48, 12, kSeed + i).certified);
    }
}

TEST_CASE("domain validation rejects degenerate input") {
    CHECK_THROWS_AS(Ball(Point(0.0, 0.0), -1.0), InvalidGeometry);
    CHECK_THROWS_AS(Polygon2D({{0.0, 0.0}, {1.0, 0.0}}), InvalidGeometry);
    // clockwise orientation
    CHECK_THROWS_AS(Polygon2D({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}}),
                    InvalidGeometry);
    // self-intersecting bowtie
    CHECK_THROWS_AS(Polygon2D({{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}}),
                    InvalidGeometry);
}
