#include <CLI11.hpp>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pwlab/run.hpp"

// Command-line entry point: decompose, constants, verify, counterexample,
// optimize, report. JSON in, JSON + CSV out; exit 0 when every check passes,
// 2 on a failed check, 1 on input errors.

namespace {

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) grid.push_back(std::stod(item));
    }
    return grid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for modular Poincare-Wirtinger inequalities"};
    app.require_subcommand(1);

    pwlab::RunConfig cfg;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string lambda_csv;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option_function<std::uint64_t>(
            "--seed",
            [&](std::uint64_t s) {
                seed = s;
                seed_set = true;
            },
            "global seed recorded in every artifact");
    };

    auto* dec = app.add_subcommand("decompose", "polygon -> star-shaped chain");
    dec->add_option("--polygon", cfg.polygon_path, "polygon JSON (array of [x,y], CCW)")
        ->required();
    dec->add_option("--out", cfg.out_path, "chain JSON output (SVG sibling emitted)")
        ->required();
    dec->add_option("--hint", cfg.target_pieces, "target piece count hint");
    dec->add_option("--min-kernel-frac", cfg.min_kernel_fraction,
                    "minimum kernel radius as a fraction of the diameter");
    dec->add_option("--mc-budget", cfg.mc_budget, "Monte Carlo sample budget");
    add_seed(dec);

    auto* con = app.add_subcommand("constants", "explicit constants for a chain");
    con->add_option("--chain", cfg.chain_path, "chain JSON")->required();
    con->add_option("--p,--exponent", cfg.exponent_path, "variable exponent JSON")->required();
    con->add_option("--out", cfg.out_path, "report JSON output")->required();
    add_seed(con);

    auto* ver = app.add_subcommand("verify", "inequality check on a chain");
    ver->add_option("--chain", cfg.chain_path, "chain JSON")->required();
    ver->add_option("--p,--exponent", cfg.exponent_path, "variable exponent JSON")->required();
    ver->add_option("--f", cfg.function_path, "test function JSON")->required();
    ver->add_option("--quad", cfg.quad_path, "quadrature spec JSON");
    ver->add_option("--out", cfg.out_path, "report JSON output")->required();
    ver->add_option("--mode", cfg.mode, "main | convex | classical");
    add_seed(ver);

    auto* cex = app.add_subcommand("counterexample", "Rayleigh-quotient sweep");
    cex->add_option("--p,--exponent", cfg.exponent_path, "radial exponent JSON")->required();
    cex->add_option("--alpha", cfg.alpha, "bump annulus width in (0,1)");
    cex->add_option("--lambda-grid", lambda_csv, "comma-separated lambda values")->required();
    cex->add_option("--quad", cfg.quad_path, "quadrature spec JSON");
    cex->add_option("--out", cfg.out_path, "report JSON output")->required();
    add_seed(cex);

    auto* opt = app.add_subcommand("optimize", "empirical best-constant search");
    opt->add_option("--chain", cfg.chain_path, "chain JSON")->required();
    opt->add_option("--p,--exponent", cfg.exponent_path, "variable exponent JSON")->required();
    opt->add_option("--f", cfg.function_path, "linear_combination family JSON")->required();
    opt->add_option("--budget", cfg.budget, "objective evaluation budget");
    opt->add_option("--quad", cfg.quad_path, "quadrature spec JSON");
    opt->add_option("--out", cfg.out_path, "report JSON output")->required();
    add_seed(opt);

    auto* rep = app.add_subcommand("report", "aggregate report JSONs into a summary table");
    rep->add_option("inputs", cfg.report_inputs, "report JSON files")->required();
    rep->add_option("--out", cfg.out_path, "summary CSV output (markdown sibling emitted)")
        ->required();

    app.add_flag("-v,--verbose", cfg.verbosity, "verbose progress on stderr");

    CLI11_PARSE(app, argc, argv);

    if (seed_set) cfg.seed = seed;
    if (!lambda_csv.empty()) {
        try {
            cfg.lambda_grid = parse_grid(lambda_csv);
        } catch (const std::exception&) {
            std::cerr << "error: --lambda-grid must be a comma-separated list of numbers\n";
            return 1;
        }
    }

    if (dec->parsed()) cfg.command = pwlab::Command::Decompose;
    if (con->parsed()) cfg.command = pwlab::Command::Constants;
    if (ver->parsed()) cfg.command = pwlab::Command::Verify;
    if (cex->parsed()) cfg.command = pwlab::Command::Counterexample;
    if (opt->parsed()) cfg.command = pwlab::Command::Optimize;
    if (rep->parsed()) cfg.command = pwlab::Command::Report;

    return pwlab::run(cfg);
}
