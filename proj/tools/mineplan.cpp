#include <iostream>

#include <CLI11.hpp>

#include "mineplan/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"open-pit mine scheduling under ensemble grade uncertainty"};
    app.require_subcommand(1);

    // gen-test-model
    auto* gen = app.add_subcommand("gen-test-model", "write the synthetic two-pit test model");
    std::string gen_out = "test_model.csv";
    mineplan::TestModelParams params;
    gen->add_option("--out", gen_out, "output CSV path (JSON sidecar written alongside)");
    gen->add_option("--members", params.members, "ensemble members (default 10)");
    gen->add_option("--slope", params.slope_degrees, "pit slope angle in degrees (default 45)");
    gen->add_option("--box-nx", params.box_nx, "ore box blocks along x");
    gen->add_option("--box-ny", params.box_ny, "ore box blocks along y");
    gen->add_option("--box-nz", params.box_nz, "ore box benches");
    gen->add_option("--separation", params.waste_layer_benches, "waste benches between boxes");
    gen->add_option("--cap", params.cap_benches, "waste benches above the upper box");
    gen->add_option("--east-low", params.east_low_pct, "East ladder low grade, percent");
    gen->add_option("--east-high", params.east_high_pct, "East ladder high grade, percent");
    gen->add_option("--west-low", params.west_low_pct, "West ladder low grade, percent");
    gen->add_option("--west-high", params.west_high_pct, "West ladder high grade, percent");
    gen->add_option("--ore-density", params.ore_density, "ore density, t/m3");
    gen->add_option("--waste-density", params.waste_density, "waste density, t/m3");

    // optimize
    auto* opt = app.add_subcommand("optimize", "evolve a schedule for a block model");
    std::string opt_model, opt_config, opt_out = "run";
    mineplan::OptimizeOverrides ov;
    opt->add_option("--model", opt_model, "block model CSV")->required();
    opt->add_option("--config", opt_config, "run config JSON (econ/ga/risk)");
    opt->add_option("--out", opt_out, "output directory");
    opt->add_option("--seed", ov.seed, "random seed");
    opt->add_option("--mode", ov.mode, "fitness mode: npv | discounted")
        ->check(CLI::IsMember({"npv", "discounted"}));
    opt->add_option("--alpha", ov.alpha, "confidence level in [0.5, 1)");
    opt->add_option("--coefficient", ov.coefficient, "fixed risk coefficient K (overrides alpha)");
    opt->add_option("--window", ov.window, "blend spawner window w");
    opt->add_option("--mining", ov.mining, "mining mode: ore-first | simultaneous")
        ->check(CLI::IsMember({"ore-first", "simultaneous"}));
    opt->add_option("--threads", ov.threads, "fitness evaluation workers");
    opt->add_option("--generations", ov.generations, "GA generations");
    opt->add_option("--population", ov.population, "GA population size");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "replay a schedule against every ensemble member");
    std::string eval_model, eval_schedule, eval_out = "eval", eval_config;
    std::string eval_compare;
    eval->add_option("--model", eval_model, "block model CSV")->required();
    eval->add_option("--schedule", eval_schedule, "schedule JSON from optimize")->required();
    eval->add_option("--out", eval_out, "output directory");
    eval->add_option("--config", eval_config, "run config JSON (defaults to the schedule's)");
    eval->add_option("--compare", eval_compare, "second schedule JSON; emits a delta report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            auto out = mineplan::run_gen_test_model(params, gen_out);
            std::cout << "wrote " << out.csv_path << ": " << (out.ore_blocks + out.waste_blocks)
                      << " blocks (" << out.ore_blocks << " ore, " << out.waste_blocks
                      << " waste), " << out.members << " ensemble members\n"
                      << "metadata: " << out.meta_path << "\n";
            return 0;
        }

        if (opt->parsed()) {
            mineplan::RunConfig cfg = opt_config.empty() ? mineplan::default_run_config()
                                                         : mineplan::load_run_config(opt_config);
            mineplan::apply_overrides(cfg, ov);
            auto out = mineplan::run_optimize(opt_model, cfg, opt_out);
            const auto& sched = out.result.decoded.schedule;
            std::cout << "best fitness " << mineplan::format_double(out.result.fitness) << " over "
                      << sched.periods << " periods\n"
                      << "schedule: " << out.schedule_path << "\ntrace:    " << out.trace_path
                      << "\nconfig:   " << out.config_path << "\n";
            return 0;
        }

        if (eval->parsed()) {
            std::optional<mineplan::RunConfig> cfg;
            if (!eval_config.empty()) cfg = mineplan::load_run_config(eval_config);
            std::optional<std::string> compare;
            if (!eval_compare.empty()) compare = eval_compare;
            auto out = mineplan::run_evaluate(eval_model, eval_schedule, eval_out, compare, cfg);
            std::cout << "mean NPV " << mineplan::format_double(out.report.mean_npv)
                      << ", total SV " << mineplan::format_double(out.report.total_sv) << ", "
                      << out.report.periods << " periods over "
                      << out.report.per_member_npv.size() << " members\n"
                      << "report:  " << out.report_path << "\nsummary: " << out.summary_path << "\n";
            if (!out.compare_path.empty()) std::cout << "compare: " << out.compare_path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
