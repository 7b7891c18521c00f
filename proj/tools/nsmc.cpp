#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nsmc/modeldoc.hpp"

// Command-line front end: evaluate a model document, regenerate the bundled
// inventory study, or run model condition checks.  Exit codes: 0 success,
// 2 parse/validation failure, 3 violated model condition.
int main(int argc, char** argv) {
    CLI::App app{"asymptotic performance measures for slowly changing Markov chains"};
    app.require_subcommand(1);

    nsmc::CliOptions opt;
    std::string model_path;

    CLI::App* eval = app.add_subcommand("eval", "evaluate the measure in a model document");
    eval->add_option("model", model_path, "model document path")->required();
    eval->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "json-lines", "markdown"}));
    eval->add_option("--fd-index", opt.fd_index,
                     "derivative channel: exact, auto, or a step index >= 2");
    eval->add_option("--precision", opt.precision, "decimal places in formatted output")
        ->check(CLI::Range(0, 18));
    eval->add_option("--mu", opt.mu, "initial distribution override")
        ->check(CLI::IsMember({"S", "s", "uniform", "stationary", "binomial"}));
    eval->add_option("--reorder-variant", opt.variant, "inventory reorder convention")
        ->check(CLI::IsMember({"below-s", "below-S", "review"}));

    CLI::App* repro =
        app.add_subcommand("reproduce-tables", "regenerate the inventory study tables");
    repro->add_option("--out-dir", opt.out_dir, "output directory");
    repro->add_option("--tables", opt.tables, "table ids (1..6)")
        ->check(CLI::Range(1, 6));
    repro->add_option("--precision", opt.precision, "decimal places in table cells")
        ->check(CLI::Range(0, 18));
    repro->add_option("--mu", opt.mu, "force an initial distribution (skips selection)")
        ->check(CLI::IsMember({"S", "s", "uniform", "stationary", "binomial"}));
    repro->add_option("--reorder-variant", opt.variant, "force a reorder convention")
        ->check(CLI::IsMember({"below-s", "below-S", "review"}));

    CLI::App* check = app.add_subcommand("check", "run model condition checks");
    check->add_option("model", model_path, "model document path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (eval->parsed()) return nsmc::cmd_eval(model_path, opt, std::cout, std::cerr);
    if (check->parsed()) return nsmc::cmd_check(model_path, std::cout, std::cerr);
    return nsmc::cmd_reproduce_tables(opt, std::cout, std::cerr);
}
