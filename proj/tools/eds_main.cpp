#include "eds/commands.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        std::exit(2);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"exterior differential systems: Cartan's test, prolongation, characteristic variety"};
    app.require_subcommand(1);

    std::string file;
    eds::CommandOptions opts;
    std::uint64_t seed = 0;
    int max_steps = 0;
    std::string solve_for;

    const char *names[] = {"check-element", "characters", "cartan-test", "prolong",
                           "torsion",       "symbol",     "charvar"};
    const char *descs[] = {
        "decide whether the element block describes an integral element",
        "Cartan characters of a random flag in the element",
        "full involutivity test: characters, predicted and actual dimensions",
        "prolong the system (optionally iterate with --max-steps, restrict with --solve-for)",
        "torsion obstructions of the degree-1 generators",
        "symbol map of the covector block and its kernel",
        "sample random covectors: symbol kernel vs hyperplane double extension",
    };
    std::vector<CLI::App *> subs;
    for (size_t i = 0; i < sizeof(names) / sizeof(names[0]); ++i) {
        CLI::App *sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("file", file, "input .eds file")->required();
        sub->add_flag("--json", opts.json, "emit the stable JSON report");
        sub->add_option("--seed", seed, "random seed for flags and sampling");
        sub->add_option("--max-steps", max_steps, "iterate prolongation up to this many steps");
        sub->add_option("--solve-for", solve_for, "restrict by the first torsion, solved for this symbol");
        sub->add_option("--samples", opts.samples, "number of covectors for charvar");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App *chosen = app.get_subcommands().front();
    if (chosen->count("--seed")) opts.seed = seed;
    if (chosen->count("--max-steps")) opts.max_steps = max_steps;
    if (chosen->count("--solve-for")) opts.solve_for = solve_for;

    eds::CommandResult res = eds::run_command(chosen->get_name(), slurp(file), opts);
    if (res.exit_code == 0) {
        std::cout << res.output;
    } else {
        std::cerr << "error: " << res.error << "\n";
    }
    return res.exit_code;
}
