#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pwlab/decomposition.hpp"
#include "pwlab/json_io.hpp"
#include "pwlab/verifier.hpp"

// Command layer shared by the CLI binary and the tests: resolves inputs,
// runs one command, writes the JSON/CSV artifacts and maps outcomes to exit
// codes (0 = all checks pass, 1 = input error, 2 = check failure).

namespace pwlab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class Command { Decompose, Constants, Verify, Counterexample, Optimize, Report };

struct RunConfig {
    Command command = Command::Verify;
    std::string polygon_path;
    std::string chain_path;
    std::string exponent_path;
    std::string function_path;
    std::string quad_path;
    std::string out_path; // JSON artifact; .csv/.md/.svg siblings derive from it
    std::vector<std::string> report_inputs;
    std::optional<std::uint64_t> seed;
    std::vector<double> lambda_grid;
    double alpha = 0.5;
    long budget = 240;
    std::string mode = "main"; // verify: main | convex | classical
    int target_pieces = 1;
    double min_kernel_fraction = 0.02;
    long mc_budget = 50000;
    int verbosity = 0;
};

namespace detail_run {

inline std::string hex_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json config_to_json(const RunConfig& cfg) {
    json j{{"command", static_cast<int>(cfg.command)},
           {"polygon", cfg.polygon_path},
           {"chain", cfg.chain_path},
           {"p", cfg.exponent_path},
           {"f", cfg.function_path},
           {"quad", cfg.quad_path},
           {"out", cfg.out_path},
           {"alpha", cfg.alpha},
           {"budget", cfg.budget},
           {"mode", cfg.mode},
           {"target_pieces", cfg.target_pieces},
           {"min_kernel_fraction", cfg.min_kernel_fraction},
           {"mc_budget", cfg.mc_budget},
           {"lambda_grid", cfg.lambda_grid},
           {"reports", cfg.report_inputs}};
    if (cfg.seed) j["seed"] = *cfg.seed;
    return j;
}

inline json artifact_meta(const RunConfig& cfg, const char* kind, std::uint64_t seed) {
    return json{{"schema_version", kSchemaVersion},
                {"tool_version", kToolVersion},
                {"config_hash", hex_hash(config_to_json(cfg).dump())},
                {"seed", seed},
                {"kind", kind}};
}

inline std::string sibling_path(const std::string& json_path, const char* ext) {
    const std::size_t dot = json_path.rfind('.');
    const std::string stem = (dot == std::string::npos) ? json_path : json_path.substr(0, dot);
    return stem + ext;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << text;
}

inline QuadratureSpec resolve_quad(const RunConfig& cfg) {
    QuadratureSpec q;
    if (!cfg.quad_path.empty()) q = parse_quad_spec(load_json(cfg.quad_path));
    if (cfg.seed) q.seed = *cfg.seed;
    return q;
}

inline std::string csv_row(const VerificationReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << r.fixture << "," << r.lhs.value << "," << r.rhs.value << "," << r.constant << ","
       << r.slack << "," << (r.pass ? "true" : "false") << "\n";
    return os.str();
}

inline void write_chain_svg(const Chain& chain, const std::string& path) {
    // bounding box with padding
    const BoundingBox& bb = chain.omega.bounding_box();
    if (bb.dim() != 2) return; // plot only planar chains
    const double w = bb.hi[0] - bb.lo[0], h = bb.hi[1] - bb.lo[1];
    const double pad = 0.05 * std::max(w, h);
    const double scale = 480.0 / std::max(w + 2 * pad, h + 2 * pad);
    auto X = [&](double x) { return (x - bb.lo[0] + pad) * scale; };
    auto Y = [&](double y) { return (bb.hi[1] + pad - y) * scale; };

    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << (w + 2 * pad) * scale
        << "' height='" << (h + 2 * pad) * scale << "'>\n";
    int ci = 0;
    for (const StarPiece& sp : chain.pieces) {
        const char* color = colors[ci++ % 8];
        if (sp.body.is_polygon()) {
            svg << "<polygon points='";
            for (const Vec2& v : sp.body.polygon().vertices())
                svg << X(v.x) << "," << Y(v.y) << " ";
            svg << "' fill='" << color << "' fill-opacity='0.25' stroke='" << color
                << "' stroke-width='1.5'/>\n";
        } else if (sp.body.is_ball()) {
            svg << "<circle cx='" << X(sp.body.ball().center[0]) << "' cy='"
                << Y(sp.body.ball().center[1]) << "' r='" << sp.body.ball().radius * scale
                << "' fill='" << color << "' fill-opacity='0.25' stroke='" << color
                << "' stroke-width='1.5'/>\n";
        }
        svg << "<circle cx='" << X(sp.kernel.center[0]) << "' cy='" << Y(sp.kernel.center[1])
            << "' r='" << sp.kernel.radius * scale << "' fill='none' stroke='" << color
            << "' stroke-width='1' stroke-dasharray='4 3'/>\n";
    }
    svg << "</svg>\n";
    write_text(path, svg.str());
}

inline int run_decompose(const RunConfig& cfg) {
    if (cfg.polygon_path.empty() || cfg.out_path.empty())
        throw InputError("decompose: --polygon and --out are required");
    const Polygon2D poly = parse_polygon(load_json(cfg.polygon_path));
    DecompositionParams params;
    params.target_pieces = cfg.target_pieces;
    params.min_kernel_radius_fraction = cfg.min_kernel_fraction;
    params.mc_budget = cfg.mc_budget;
    params.seed = cfg.seed.value_or(0x5eedULL);
    const Chain chain = decompose(poly, params);

    json out = chain_to_json(chain);
    out["meta"] = artifact_meta(cfg, "chain", params.seed);
    save_json(out, cfg.out_path);
    write_chain_svg(chain, sibling_path(cfg.out_path, ".svg"));
    if (cfg.verbosity > 0)
        std::cerr << "decompose: N=" << chain.N << " R=" << chain.R
                  << " lambda=" << chain.lambda << "\n";
    return 0;
}

inline int run_constants(const RunConfig& cfg) {
    if (cfg.chain_path.empty() || cfg.exponent_path.empty() || cfg.out_path.empty())
        throw InputError("constants: --chain, --p and --out are required");
    const std::uint64_t seed = cfg.seed.value_or(0x5eedULL);
    const Chain chain = parse_chain(load_json(cfg.chain_path), 200000, seed);
    const VariableExponent p = parse_exponent(load_json(cfg.exponent_path));
    const ConstantsReport rep = constant_C(chain, p);

    json out{{"meta", artifact_meta(cfg, "constants", seed)},
             {"constants", constants_to_json(rep)},
             {"inputs",
              {{"chain", chain_to_json(chain)}, {"exponent", exponent_to_json(p)}}}};
    save_json(out, cfg.out_path);
    return 0;
}

inline int run_verify(const RunConfig& cfg) {
    if (cfg.chain_path.empty() || cfg.exponent_path.empty() || cfg.function_path.empty() ||
        cfg.out_path.empty())
        throw InputError("verify: --chain, --p, --f and --out are required");
    const QuadratureSpec q = resolve_quad(cfg);
    const Chain chain = parse_chain(load_json(cfg.chain_path), 200000, q.seed);
    const VariableExponent p = parse_exponent(load_json(cfg.exponent_path));
    const TestFunction f = parse_function(load_json(cfg.function_path));

    VerificationReport rep;
    json consts;
    if (cfg.mode == "main") {
        rep = verify_main(chain, p, f, q, "verify-main");
        consts = constants_to_json(constant_C(chain, p));
    } else if (cfg.mode == "convex") {
        rep = verify_convex(chain.omega, p, f, q, "verify-convex");
    } else if (cfg.mode == "classical") {
        if (!p.is_constant()) throw InputError("verify: classical mode needs a constant exponent");
        const double pc = std::get<ConstantExponent>(p.variant()).p;
        rep = verify_classical(chain, pc, f, q, "verify-classical");
        consts = constants_to_json(constant_C(chain, p));
    } else {
        throw InputError("verify: unknown mode '" + cfg.mode + "'");
    }

    json out{{"meta", artifact_meta(cfg, "verify", q.seed)},
             {"verification", verification_to_json(rep)},
             {"quadrature", quad_spec_to_json(q)}};
    if (!consts.is_null()) out["constants"] = consts;
    save_json(out, cfg.out_path);
    write_text(sibling_path(cfg.out_path, ".csv"),
               "fixture,lhs,rhs,constant,slack,pass\n" + csv_row(rep));
    return rep.pass ? 0 : 2;
}

inline int run_counterexample(const RunConfig& cfg) {
    if (cfg.exponent_path.empty() || cfg.out_path.empty())
        throw InputError("counterexample: --p and --out are required");
    if (cfg.lambda_grid.empty())
        throw InputError("counterexample: --lambda-grid is required");
    const QuadratureSpec q = resolve_quad(cfg);
    const VariableExponent p = parse_exponent(load_json(cfg.exponent_path));
    const SweepReport rep = counterexample_sweep(cfg.alpha, p, cfg.lambda_grid, q);

    json out{{"meta", artifact_meta(cfg, "counterexample", q.seed)},
             {"sweep", sweep_to_json(rep)},
             {"quadrature", quad_spec_to_json(q)}};
    save_json(out, cfg.out_path);
    std::ostringstream csv;
    csv.precision(12);
    csv << "lambda,quotient,quotient_full_denominator,kernel_quotient\n";
    for (std::size_t i = 0; i < rep.lambda_grid.size(); ++i)
        csv << rep.lambda_grid[i] << "," << rep.quotients[i] << ","
            << rep.quotients_full_denominator[i] << "," << rep.kernel_quotients[i] << "\n";
    write_text(sibling_path(cfg.out_path, ".csv"), csv.str());

    const double tol = 0.5 / rep.C;
    const bool pass = rep.monotone_decreasing && rep.kernel_quotient_min >= 1.0 / rep.C - tol;
    return pass ? 0 : 2;
}

inline int run_optimize(const RunConfig& cfg) {
    if (cfg.chain_path.empty() || cfg.exponent_path.empty() || cfg.function_path.empty() ||
        cfg.out_path.empty())
        throw InputError("optimize: --chain, --p, --f and --out are required");
    const QuadratureSpec q = resolve_quad(cfg);
    const Chain chain = parse_chain(load_json(cfg.chain_path), 200000, q.seed);
    const VariableExponent p = parse_exponent(load_json(cfg.exponent_path));
    const TestFunction family = parse_function(load_json(cfg.function_path));
    const auto* lc = std::get_if<LinearCombination>(&family.variant());
    if (!lc) throw InputError("optimize: --f must be a linear_combination family");
    std::vector<TestFunction> basis;
    for (const auto& [c, g] : lc->terms) {
        (void)c;
        basis.push_back(*g);
    }

    const OptimizeResult res = empirical_best_constant(chain, p, basis, cfg.budget, q);
    const ConstantsReport consts = constant_C(chain, p);

    json out{{"meta", artifact_meta(cfg, "optimize", q.seed)},
             {"optimize",
              {{"ratio", res.ratio},
               {"coefficients", res.coefficients},
               {"evaluations", res.evaluations},
               {"budget_exhausted", res.budget_exhausted}}},
             {"constants", constants_to_json(consts)},
             {"quadrature", quad_spec_to_json(q)}};
    save_json(out, cfg.out_path);
    std::ostringstream csv;
    csv.precision(12);
    csv << "fixture,lhs,rhs,constant,slack,pass\n";
    csv << "optimize," << res.ratio << ",1," << consts.C << "," << (consts.C - res.ratio) << ","
        << (res.ratio <= consts.C * 1.05 ? "true" : "false") << "\n";
    write_text(sibling_path(cfg.out_path, ".csv"), csv.str());
    return res.ratio <= consts.C * 1.05 ? 0 : 2;
}

inline int run_report(const RunConfig& cfg) {
    if (cfg.out_path.empty()) throw InputError("report: --out is required");
    std::ostringstream csv, md;
    csv << "fixture,C,C_tilde,empirical_ratio,slack,pass\n";
    md << "| fixture | C | C~ | empirical ratio | slack | pass |\n";
    md << "|---|---|---|---|---|---|\n";
    csv.precision(12);
    md.precision(6);
    for (const std::string& path : cfg.report_inputs) {
        const json j = load_json(path);
        if (!j.contains("meta") || j.at("meta").value("schema_version", -1) != kSchemaVersion)
            throw SchemaMismatch("report: schema version mismatch in " + path);
        std::string fixture = path;
        double C = 0.0, C_tilde = 0.0, ratio = 0.0, slack = 0.0;
        bool pass = true;
        if (j.contains("constants")) {
            C = j.at("constants").value("C", 0.0);
            C_tilde = j.at("constants").value("C_tilde", 0.0);
        }
        if (j.contains("verification")) {
            fixture = j.at("verification").value("fixture", fixture);
            slack = j.at("verification").value("slack", 0.0);
            pass = j.at("verification").value("pass", false);
            const double lhs = j.at("verification").at("lhs").value("value", 0.0);
            const double rhs = j.at("verification").at("rhs").value("value", 0.0);
            ratio = rhs > 0.0 ? lhs / rhs : 0.0;
        } else if (j.contains("optimize")) {
            fixture = "optimize";
            ratio = j.at("optimize").value("ratio", 0.0);
            slack = C - ratio;
            pass = !j.at("optimize").value("budget_exhausted", false);
        }
        csv << fixture << "," << C << "," << C_tilde << "," << ratio << "," << slack << ","
            << (pass ? "true" : "false") << "\n";
        md << "| " << fixture << " | " << C << " | " << C_tilde << " | " << ratio << " | "
           << slack << " | " << (pass ? "yes" : "no") << " |\n";
    }
    write_text(cfg.out_path, csv.str());
    write_text(sibling_path(cfg.out_path, ".md"), md.str());
    return 0;
}

} // namespace detail_run

// Runs one command; exceptions derived from the library error types map to
// exit code 1 (input error), failing checks map to 2.
inline int run(const RunConfig& cfg) {
    try {
        switch (cfg.command) {
            case Command::Decompose: return detail_run::run_decompose(cfg);
            case Command::Constants: return detail_run::run_constants(cfg);
            case Command::Verify: return detail_run::run_verify(cfg);
            case Command::Counterexample: return detail_run::run_counterexample(cfg);
            case Command::Optimize: return detail_run::run_optimize(cfg);
            case Command::Report: return detail_run::run_report(cfg);
        }
        throw InputError("run: unknown command");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace pwlab
