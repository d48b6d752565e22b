#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "staffsel/staffsel.hpp"

namespace {

using staffsel::Cost;
using staffsel::Criterion;
using staffsel::EquilibriumSolution;
using staffsel::json;

Criterion make_criterion(const std::string& name, const std::string& tie) {
    staffsel::CriterionKind kind = staffsel::parse_criterion_kind(name);
    if (tie.empty()) return Criterion::with_default_tie(kind);
    return Criterion{kind, staffsel::parse_tie_rule(tie)};
}

void write_output(const std::string& text, const std::string& path) {
    std::string body = text;
    if (body.empty() || body.back() != '\n') body += '\n';
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << body;
}

EquilibriumSolution load_or_solve(const std::string& input, int stages, double cost,
                                  const std::string& criterion, const std::string& tie) {
    if (!input.empty()) {
        std::ifstream in(input);
        if (!in) throw std::runtime_error("cannot open input file: " + input);
        json doc = json::parse(in);
        return staffsel::solution_from_json(doc);
    }
    return staffsel::solve(stages, Cost{cost}, make_criterion(criterion, tie));
}

void require_json_format(const std::string& format) {
    if (format != "json")
        throw std::runtime_error("this command only supports --format json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlated-equilibrium solver for the two-team staff-selection stopping game"};
    app.require_subcommand(1);

    int stages = 2;
    double cost = 0.0;
    std::string criterion = "utilitarian";
    std::string tie;  // empty = criterion default
    std::uint64_t runs = 100000;
    std::uint64_t seed = 42;
    std::string output;
    std::string format = "json";
    std::string input;
    double tol = 1e-9;

    auto add_game_opts = [&](CLI::App* cmd) {
        cmd->add_option("--stages", stages, "number of interview stages N")->check(CLI::PositiveNumber);
        cmd->add_option("--cost", cost, "shortfall cost c paid when ending unhired")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--criterion", criterion,
                        "utilitarian | egalitarian | republican | libertarian1 | libertarian2");
        cmd->add_option("--tie", tie, "tie rule: symmetric | leader1 | leader2 (default per criterion)");
    };
    auto add_io_opts = [&](CLI::App* cmd) {
        cmd->add_option("--output", output, "write the document here instead of stdout");
        cmd->add_option("--format", format, "output format (json)");
    };

    CLI::App* cmd_solve = app.add_subcommand("solve", "solve an N-stage game by backward induction");
    add_game_opts(cmd_solve);
    add_io_opts(cmd_solve);

    double x = 0.5;
    double u_prev = 0.5;
    double v_prev = -1.0, w_prev = -1.0;  // sentinel: default to d
    CLI::App* cmd_polytope =
        app.add_subcommand("polytope", "enumerate the stage-game equilibrium polytope at one draw");
    CLI::Option* opt_x = cmd_polytope->add_option("--x", x, "candidate expertise in [0, 1]");
    opt_x->required();
    cmd_polytope->add_option("--cost", cost, "shortfall cost c")->check(CLI::NonNegativeNumber);
    cmd_polytope->add_option("--u-prev", u_prev, "lone-searcher continuation value (default 1/2)");
    cmd_polytope->add_option("--v-prev", v_prev, "player 1 continuation value (default d = (1-2c)/4)");
    cmd_polytope->add_option("--w-prev", w_prev, "player 2 continuation value (default d = (1-2c)/4)");
    add_io_opts(cmd_polytope);

    CLI::App* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the solution values");
    add_game_opts(cmd_simulate);
    cmd_simulate->add_option("--input", input, "read a solution document instead of solving");
    cmd_simulate->add_option("--runs", runs, "number of episodes")->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--seed", seed, "seed for the episode substreams");
    add_io_opts(cmd_simulate);

    CLI::App* cmd_verify = app.add_subcommand("verify", "audit a solution: values, obedience, deviations");
    add_game_opts(cmd_verify);
    cmd_verify->add_option("--input", input, "read a solution document instead of solving");
    cmd_verify->add_option("--tol", tol, "largest acceptable deviation gain");
    add_io_opts(cmd_verify);

    int stages_max = 0;
    std::vector<double> cost_grid;
    std::vector<std::string> sweep_criteria;
    std::string sweep_format = "csv";
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "tabulate values across N or across c");
    CLI::Option* opt_smax =
        cmd_sweep->add_option("--stages-max", stages_max, "sweep n = 1..N_max at fixed --cost");
    CLI::Option* opt_grid =
        cmd_sweep->add_option("--cost-grid", cost_grid, "sweep these c values at fixed --stages");
    opt_smax->excludes(opt_grid);
    cmd_sweep->add_option("--stages", stages, "horizon for --cost-grid sweeps")->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--cost", cost, "cost for --stages-max sweeps")->check(CLI::NonNegativeNumber);
    cmd_sweep->add_option("--criterion", sweep_criteria,
                          "criteria to tabulate (repeatable; default: all five)");
    cmd_sweep->add_option("--tie", tie, "tie rule applied to every criterion (default per criterion)");
    cmd_sweep->add_option("--output", output, "write the table here instead of stdout");
    cmd_sweep->add_option("--format", sweep_format, "csv (default) or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (cmd_solve->parsed()) {
            require_json_format(format);
            EquilibriumSolution sol = staffsel::solve(stages, Cost{cost}, make_criterion(criterion, tie));
            write_output(staffsel::solution_to_json(sol).dump(2), output);
            return 0;
        }
        if (cmd_polytope->parsed()) {
            require_json_format(format);
            double d = staffsel::one_stage_value(Cost{cost});
            double v = cmd_polytope->count("--v-prev") ? v_prev : d;
            double w = cmd_polytope->count("--w-prev") ? w_prev : d;
            staffsel::StageParams params{x, u_prev, v, w};
            write_output(staffsel::polytope_report_to_json(params).dump(2), output);
            return 0;
        }
        if (cmd_simulate->parsed()) {
            require_json_format(format);
            EquilibriumSolution sol = load_or_solve(input, stages, cost, criterion, tie);
            staffsel::MCEstimate est = staffsel::estimate_values(sol, runs, seed);
            write_output(staffsel::estimate_to_json(est, sol).dump(2), output);
            return 0;
        }
        if (cmd_verify->parsed()) {
            require_json_format(format);
            EquilibriumSolution sol = load_or_solve(input, stages, cost, criterion, tie);
            staffsel::VerificationReport rep = staffsel::verify_equilibrium(sol, tol);
            write_output(staffsel::verification_to_json(rep, sol).dump(2), output);
            return rep.passed ? 0 : 2;
        }
        if (cmd_sweep->parsed()) {
            if (sweep_format != "csv" && sweep_format != "json")
                throw std::runtime_error("sweep supports --format csv or json");
            if (!*opt_smax && !*opt_grid)
                throw std::runtime_error("sweep needs either --stages-max or --cost-grid");
            if (*opt_grid && cost_grid.empty()) throw std::runtime_error("empty cost grid");
            std::vector<std::string> names = sweep_criteria;
            if (names.empty())
                names = {"utilitarian", "egalitarian", "republican", "libertarian1", "libertarian2"};
            std::vector<staffsel::SweepRow> rows;
            for (const std::string& name : names) {
                Criterion crit = make_criterion(name, tie);
                if (*opt_smax) {
                    EquilibriumSolution sol = staffsel::solve(stages_max, Cost{cost}, crit);
                    for (int n = 1; n <= stages_max; ++n) {
                        std::size_t k = static_cast<std::size_t>(n);
                        rows.push_back({name, n, cost, sol.v[k], sol.w[k], sol.u.at(k)});
                    }
                } else {
                    for (double c : cost_grid) {
                        EquilibriumSolution sol = staffsel::solve(stages, Cost{c}, crit);
                        std::size_t k = static_cast<std::size_t>(stages);
                        rows.push_back({name, stages, c, sol.v[k], sol.w[k], sol.u.at(k)});
                    }
                }
            }
            if (sweep_format == "csv") {
                write_output(staffsel::sweep_to_csv(rows), output);
            } else {
                json arr = json::array();
                for (const staffsel::SweepRow& r : rows) {
                    json row;
                    row["criterion"] = r.criterion;
                    row["n"] = r.n;
                    row["c"] = r.c;
                    row["v"] = r.v;
                    row["w"] = r.w;
                    row["v_plus_w"] = r.v + r.w;
                    row["u"] = r.u;
                    arr.push_back(std::move(row));
                }
                write_output(arr.dump(2), output);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
