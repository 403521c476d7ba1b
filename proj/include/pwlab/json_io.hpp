#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pwlab/constants.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/functions.hpp"
#include "pwlab/geometry.hpp"
#include "pwlab/quadrature.hpp"
#include "pwlab/verifier.hpp"

// Tagged-union JSON descriptors for domains, chains, exponents, test
// functions and quadrature specs, plus report serialization.

namespace pwlab {

using json = nlohmann::json;

// Parse with line/column diagnostics.
inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                         ": " + e.what());
    }
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

inline void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

// --- points / balls / polygons ----------------------------------------------

inline json point_to_json(const Point& p) { return json(p.coords); }

inline Point parse_point(const json& j) {
    if (!j.is_array() || j.empty())
        throw InputError("point: expected a non-empty coordinate array");
    Point p;
    for (const auto& c : j) p.coords.push_back(c.get<double>());
    if (!finite(p)) throw InputError("point: coordinates must be finite");
    return p;
}

inline json ball_to_json(const Ball& b) {
    return json{{"center", point_to_json(b.center)}, {"radius", b.radius}};
}

inline Ball parse_ball(const json& j) {
    if (!j.contains("center") || !j.contains("radius"))
        throw InputError("ball: needs center and radius");
    return Ball(parse_point(j.at("center")), j.at("radius").get<double>());
}

inline json polygon_to_json(const Polygon2D& p) {
    json verts = json::array();
    for (const Vec2& v : p.vertices()) verts.push_back(json::array({v.x, v.y}));
    return verts;
}

// Accepts either a bare vertex array (the polygon file format) or a tagged
// object {"type":"polygon","vertices":[...]}.
inline Polygon2D parse_polygon(const json& j) {
    const json& verts = j.is_array() ? j : j.at("vertices");
    std::vector<Vec2> vs;
    for (const auto& v : verts) {
        if (!v.is_array() || v.size() != 2)
            throw InputError("polygon: vertices must be [x, y] pairs");
        vs.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    try {
        return Polygon2D(std::move(vs));
    } catch (const InvalidGeometry& e) {
        throw InputError(std::string("polygon: ") + e.what());
    }
}

// --- domains / pieces / chains ----------------------------------------------

inline json domain_to_json(const Domain& d);
inline Domain parse_domain(const json& j, long mc_samples = 200000,
                           std::uint64_t seed = 0x5eedULL);

inline json star_piece_to_json(const StarPiece& sp) {
    return json{{"body", domain_to_json(sp.body)},
                {"kernel", ball_to_json(sp.kernel)},
                {"certificate",
                 {{"kernel_samples", sp.certificate.kernel_samples},
                  {"body_samples", sp.certificate.body_samples},
                  {"segment_samples", sp.certificate.segment_samples},
                  {"seed", sp.certificate.seed},
                  {"max_violation", sp.certificate.max_violation}}}};
}

inline StarPiece parse_star_piece(const json& j, long mc_samples, std::uint64_t seed,
                                  bool recertify) {
    StarPiece sp;
    sp.body = parse_domain(j.at("body"), mc_samples, seed);
    sp.kernel = parse_ball(j.at("kernel"));
    int k_s = 6, k_d = 48, m = 24;
    if (j.contains("certificate")) {
        const json& c = j.at("certificate");
        k_s = std::max(1, c.value("kernel_samples", 6));
        k_d = std::max(1, c.value("body_samples", 48));
        m = std::max(1, c.value("segment_samples", 24));
        sp.certificate.seed = c.value("seed", seed);
    }
    if (recertify) {
        const StarCheckResult chk =
            check_starshaped(sp.body, sp.kernel, std::min(k_s, 16), std::min(k_d, 128), m,
                             sp.certificate.seed ? sp.certificate.seed : seed);
        if (!chk.certified)
            throw InputError("star piece: kernel ball fails the star-shapedness check");
        sp.certificate = chk.certificate;
    } else {
        sp.certificate = {k_s, k_d, m, seed, 0.0};
    }
    return sp;
}

inline json domain_to_json(const Domain& d) {
    if (d.is_ball()) {
        json j = ball_to_json(d.ball());
        j["type"] = "ball";
        return j;
    }
    if (d.is_polygon()) {
        return json{{"type", "polygon"}, {"vertices", polygon_to_json(d.polygon())}};
    }
    json pieces = json::array();
    for (const StarPiece& sp : d.union_pieces().pieces) pieces.push_back(star_piece_to_json(sp));
    return json{{"type", "union"}, {"pieces", pieces}};
}

inline Domain parse_domain(const json& j, long mc_samples, std::uint64_t seed) {
    if (j.is_array()) return Domain(parse_polygon(j));
    const std::string type = j.value("type", "");
    if (type == "ball") return Domain(parse_ball(j));
    if (type == "polygon") return Domain(parse_polygon(j));
    if (type == "union") {
        UnionPieces u;
        for (const auto& pj : j.at("pieces"))
            u.pieces.push_back(parse_star_piece(pj, mc_samples, seed, false));
        return Domain(std::move(u), mc_samples, seed);
    }
    throw InputError("domain: unknown type '" + type + "'");
}

inline json chain_to_json(const Chain& c) {
    json pieces = json::array();
    for (const StarPiece& sp : c.pieces) pieces.push_back(star_piece_to_json(sp));
    json order = json::array();
    for (int i = 0; i < c.N; ++i) order.push_back(i); // pieces are stored in chain order
    return json{{"pieces", pieces}, {"R", c.R},       {"lambda", c.lambda},
                {"order", order},   {"N", c.N},       {"omega_measure", c.omega.measure()},
                {"omega_measure_std_error", c.omega.measure_std_error()}};
}

inline Chain parse_chain(const json& j, long mc_samples = 200000,
                         std::uint64_t seed = 0x5eedULL) {
    if (!j.contains("pieces") || !j.at("pieces").is_array() || j.at("pieces").empty())
        throw InputError("chain: needs a non-empty pieces array");
    std::vector<StarPiece> raw;
    for (const auto& pj : j.at("pieces"))
        raw.push_back(parse_star_piece(pj, mc_samples, sub_seed(seed, raw.size()), true));

    std::vector<StarPiece> ordered;
    if (j.contains("order")) {
        const auto& ord = j.at("order");
        if (ord.size() != raw.size()) throw InputError("chain: order must list every piece");
        for (const auto& oi : ord) {
            const std::size_t k = oi.get<std::size_t>();
            if (k >= raw.size()) throw InputError("chain: order index out of range");
            ordered.push_back(raw[k]);
        }
    } else {
        ordered = std::move(raw);
    }

    Chain c;
    c.N = static_cast<int>(ordered.size());
    c.R = j.value("R", ordered.front().kernel.radius);
    for (const StarPiece& sp : ordered)
        if (std::abs(sp.kernel.radius - c.R) > 1e-9 * std::max(1.0, c.R))
            throw InputError("chain: kernel radii must all equal R");
    c.lambda = j.value("lambda", 0.0);
    if (c.N == 1) {
        c.omega = ordered.front().body;
        c.lambda = 0.0;
    } else {
        if (!(c.lambda > 0.0)) throw InputError("chain: lambda must be positive for N >= 2");
        c.omega = Domain(UnionPieces{ordered}, mc_samples, sub_seed(seed, 0x0e6aULL));
    }
    c.pieces = std::move(ordered);
    return c;
}

// --- exponents ----------------------------------------------------------------

inline json exponent_to_json(const VariableExponent& p) {
    if (const auto* c = std::get_if<ConstantExponent>(&p.variant()))
        return json{{"variant", "constant"}, {"p", c->p}};
    if (const auto* r = std::get_if<RadialIncreasingExponent>(&p.variant()))
        return json{{"variant", "radial_increasing"},
                    {"center", point_to_json(r->center)},
                    {"profile", {{"r", r->profile.r}, {"p", r->profile.p}}}};
    const auto& pc = std::get<PiecewiseConstantExponent>(p.variant());
    json regions = json::array();
    for (const auto& [dom, val] : pc.regions)
        regions.push_back(json{{"domain", domain_to_json(dom)}, {"p", val}});
    return json{{"variant", "piecewise_constant"},
                {"regions", regions},
                {"default", pc.default_p}};
}

inline VariableExponent parse_exponent(const json& j) {
    const std::string variant = j.value("variant", "");
    try {
        if (variant == "constant") return VariableExponent::constant(j.at("p").get<double>());
        if (variant == "radial_increasing") {
            RadialProfile prof;
            prof.r = j.at("profile").at("r").get<std::vector<double>>();
            prof.p = j.at("profile").at("p").get<std::vector<double>>();
            return VariableExponent::radial(parse_point(j.at("center")), std::move(prof));
        }
        if (variant == "piecewise_constant") {
            std::vector<std::pair<Domain, double>> regions;
            for (const auto& rj : j.at("regions"))
                regions.emplace_back(parse_domain(rj.at("domain")), rj.at("p").get<double>());
            return VariableExponent::piecewise(std::move(regions), j.at("default").get<double>());
        }
    } catch (const InvalidGeometry& e) {
        throw InputError(std::string("exponent: ") + e.what());
    }
    throw InputError("exponent: unknown variant '" + variant + "'");
}

// --- test functions -------------------------------------------------------------

inline json function_to_json(const TestFunction& f);

inline TestFunction parse_function(const json& j) {
    const std::string variant = j.value("variant", "");
    try {
        if (variant == "polynomial") {
            std::vector<PolynomialTerm> terms;
            for (const auto& tj : j.at("terms"))
                terms.push_back({tj.at("coeff").get<double>(),
                                 tj.at("powers").get<std::vector<int>>()});
            return make_polynomial(std::move(terms));
        }
        if (variant == "trig") {
            std::vector<TrigWaveTerm> terms;
            for (const auto& tj : j.at("terms"))
                terms.push_back({tj.at("amplitude").get<double>(),
                                 tj.at("wave").get<std::vector<double>>(),
                                 tj.value("phase", 0.0)});
            return make_trig(std::move(terms));
        }
        if (variant == "radial_bump") {
            Point center;
            if (j.contains("center")) center = parse_point(j.at("center"));
            return bump(j.at("alpha").get<double>(), j.value("order", 3), std::move(center));
        }
        if (variant == "scaled")
            return scaled(j.at("lambda").get<double>(), parse_function(j.at("inner")));
        if (variant == "linear_combination") {
            std::vector<double> coeffs;
            std::vector<TestFunction> basis;
            for (const auto& tj : j.at("terms")) {
                coeffs.push_back(tj.value("coeff", 1.0));
                basis.push_back(parse_function(tj.at("f")));
            }
            return linear_combination(coeffs, basis);
        }
    } catch (const InvalidGeometry& e) {
        throw InputError(std::string("function: ") + e.what());
    }
    throw InputError("function: unknown variant '" + variant + "'");
}

inline json function_to_json(const TestFunction& f) {
    if (const auto* p = std::get_if<Polynomial>(&f.variant())) {
        json terms = json::array();
        for (const auto& t : p->terms)
            terms.push_back(json{{"coeff", t.coeff}, {"powers", t.powers}});
        return json{{"variant", "polynomial"}, {"terms", terms}};
    }
    if (const auto* t = std::get_if<TrigWaves>(&f.variant())) {
        json terms = json::array();
        for (const auto& w : t->terms)
            terms.push_back(json{{"amplitude", w.amplitude}, {"wave", w.wave}, {"phase", w.phase}});
        return json{{"variant", "trig"}, {"terms", terms}};
    }
    if (const auto* b = std::get_if<RadialBump>(&f.variant())) {
        json j{{"variant", "radial_bump"}, {"alpha", b->alpha}, {"order", b->order}};
        if (b->center.dim() > 0) j["center"] = point_to_json(b->center);
        return j;
    }
    if (const auto* s = std::get_if<ScaledFunction>(&f.variant())) {
        return json{{"variant", "scaled"},
                    {"lambda", s->lambda},
                    {"inner", function_to_json(*s->inner)}};
    }
    const auto& lc = std::get<LinearCombination>(f.variant());
    json terms = json::array();
    for (const auto& [c, g] : lc.terms)
        terms.push_back(json{{"coeff", c}, {"f", function_to_json(*g)}});
    return json{{"variant", "linear_combination"}, {"terms", terms}};
}

// --- quadrature spec -------------------------------------------------------------

inline json quad_spec_to_json(const QuadratureSpec& q) {
    const char* method = q.method == QuadMethod::MonteCarlo        ? "monte_carlo"
                         : q.method == QuadMethod::StratifiedMC    ? "stratified_mc"
                                                                   : "tensor_gauss";
    const char* singular = q.singular == SingularRule::PolarLocal ? "polar_local" : "duffy_split";
    return json{{"method", method},
                {"outer_samples", q.outer_samples},
                {"inner_samples", q.inner_samples},
                {"singular", singular},
                {"singular_radius_fraction", q.singular_radius_fraction},
                {"seed", q.seed},
                {"target_rel_tol", q.target_rel_tol}};
}

inline QuadratureSpec parse_quad_spec(const json& j) {
    QuadratureSpec q;
    const std::string method = j.value("method", "stratified_mc");
    if (method == "monte_carlo")
        q.method = QuadMethod::MonteCarlo;
    else if (method == "stratified_mc")
        q.method = QuadMethod::StratifiedMC;
    else if (method == "tensor_gauss")
        q.method = QuadMethod::TensorGaussOnCells;
    else
        throw InputError("quadrature: unknown method '" + method + "'");
    q.outer_samples = j.value("outer_samples", q.outer_samples);
    q.inner_samples = j.value("inner_samples", q.inner_samples);
    const std::string singular = j.value("singular", "polar_local");
    if (singular == "polar_local")
        q.singular = SingularRule::PolarLocal;
    else if (singular == "duffy_split")
        q.singular = SingularRule::DuffySplit;
    else
        throw InputError("quadrature: unknown singular rule '" + singular + "'");
    q.singular_radius_fraction = j.value("singular_radius_fraction", q.singular_radius_fraction);
    q.seed = j.value("seed", q.seed);
    q.target_rel_tol = j.value("target_rel_tol", q.target_rel_tol);
    try {
        q.validate();
    } catch (const InvalidGeometry& e) {
        throw InputError(std::string("quadrature: ") + e.what());
    }
    return q;
}

// --- reports ----------------------------------------------------------------------

inline json integral_to_json(const IntegralResult& r) {
    return json{{"value", r.value}, {"error", r.error}, {"samples", r.samples}};
}

inline json verification_to_json(const VerificationReport& r) {
    return json{{"fixture", r.fixture}, {"lhs", integral_to_json(r.lhs)},
                {"rhs", integral_to_json(r.rhs)}, {"constant", r.constant},
                {"slack", r.slack},   {"pass", r.pass},
                {"seed", r.seed}};
}

inline json constants_to_json(const ConstantsReport& r) {
    json j{{"n", r.n},
           {"N", r.N},
           {"R", r.R},
           {"kappa", r.kappa_omega},
           {"p_plus", r.p_plus},
           {"omega_measure", r.omega_measure},
           {"omega_diameter", r.omega_diameter},
           {"alpha_per_piece", r.alpha_per_piece},
           {"alpha_tilde", r.alpha_tilde},
           {"diam_factor", r.diam_factor},
           {"sharper_diam_factor", r.sharper_diam_factor},
           {"C", r.C},
           {"C_step3", r.C_step3},
           {"C_tilde", r.C_tilde}};
    if (r.N >= 2) {
        j["lambda"] = r.lambda;
        j["kappa_p"] = r.kappa_p;
        j["beta_prime_chain"] = r.beta_prime_chain;
    }
    return j;
}

inline json sweep_to_json(const SweepReport& r) {
    return json{{"lambda_grid", r.lambda_grid},
                {"quotients", r.quotients},
                {"quotients_full_denominator", r.quotients_full_denominator},
                {"kernel_quotients", r.kernel_quotients},
                {"fitted_slope", r.fitted_slope},
                {"theoretical_exponent", r.theoretical_exponent},
                {"kernel_quotient_min", r.kernel_quotient_min},
                {"C", r.C},
                {"monotone_decreasing", r.monotone_decreasing},
                {"seed", r.seed}};
}

} // namespace pwlab
