#pragma once

#include <filesystem>
#include <iostream>
#include <optional>

#include "mineplan/config.hpp"
#include "mineplan/report.hpp"

namespace mineplan {

// Documented defaults sized for the bundled two-pit test model; override any
// of them via the run-config JSON.
inline RunConfig default_run_config() {
    RunConfig cfg;
    cfg.econ.price = 9000.0;          // $/t metal
    cfg.econ.selling_cost = 500.0;    // $/t metal
    cfg.econ.processing_cost = 10.0;  // $/t rock
    cfg.econ.mining_cost = 2.0;       // $/t rock
    cfg.econ.rehab_cost = 0.5;        // $/t rock
    cfg.econ.recovery_default = 0.9;
    cfg.econ.discount_rate = 0.08;
    cfg.econ.mill_capacity = 2.5e6;  // t rock / period
    cfg.econ.max_periods = 24;       // mining_capacity left unset: the mill is the bottleneck
    return cfg;
}

struct GenModelOutputs {
    std::string csv_path;
    std::string meta_path;
    size_t ore_blocks = 0;
    size_t waste_blocks = 0;
    int members = 0;
};

// Write the synthetic two-pit model plus a sidecar that also records the
// generation parameters (slope, box geometry, ladders).
inline GenModelOutputs run_gen_test_model(const TestModelParams& params,
                                          const std::string& out_csv) {
    BlockModel model = generate_test_model(params);
    save_block_model(model, out_csv);

    GenModelOutputs out;
    out.csv_path = out_csv;
    out.meta_path = detail::sidecar_path(out_csv);
    out.members = model.n_members;
    for (const Block& b : model.blocks)
        (b.domain != kWasteDomain ? out.ore_blocks : out.waste_blocks) += 1;

    json meta;
    {
        std::ifstream in(out.meta_path);
        meta = json::parse(in);
    }
    meta["generator"] = {{"type", "two-pit-test-model"},
                         {"slope_degrees", params.slope_degrees},
                         {"box", {params.box_nx, params.box_ny, params.box_nz}},
                         {"waste_layer_benches", params.waste_layer_benches},
                         {"cap_benches", params.cap_benches},
                         {"members", params.members},
                         {"east_pct", {params.east_low_pct, params.east_high_pct}},
                         {"west_pct", {params.west_low_pct, params.west_high_pct}},
                         {"ore_density", params.ore_density},
                         {"waste_density", params.waste_density}};
    std::ofstream meta_out(out.meta_path);
    if (!meta_out) throw std::runtime_error("cannot write sidecar: " + out.meta_path);
    meta_out << meta.dump(2) << '\n';
    return out;
}

struct OptimizeOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;  // npv | discounted
    std::optional<double> alpha;
    std::optional<double> coefficient;
    std::optional<int> window;
    std::optional<std::string> mining;  // ore-first | simultaneous
    std::optional<int> threads;
    std::optional<int> generations;
    std::optional<int> population;
};

inline void apply_overrides(RunConfig& cfg, const OptimizeOverrides& ov) {
    if (ov.seed) cfg.ga.seed = *ov.seed;
    if (ov.mode) cfg.ga.fitness = fitness_mode_from_string(*ov.mode);
    if (ov.alpha) {
        cfg.risk.alpha = *ov.alpha;
        if (cfg.risk.mode == RiskMode::none || cfg.risk.mode == RiskMode::fixed)
            cfg.risk.mode = RiskMode::normal;
    }
    if (ov.coefficient) {
        cfg.risk.mode = RiskMode::fixed;
        cfg.risk.coefficient = *ov.coefficient;
    }
    if (ov.window) cfg.risk.window = *ov.window;
    if (ov.mining) cfg.ga.mining = mining_mode_from_string(*ov.mining);
    if (ov.threads) cfg.ga.threads = *ov.threads;
    if (ov.generations) cfg.ga.generations = *ov.generations;
    if (ov.population) cfg.ga.population = *ov.population;
    cfg.ga.validate();
    cfg.risk.validate();
}

struct OptimizeOutputs {
    std::string schedule_path;
    std::string trace_path;
    std::string config_path;
    EvolveResult result;
};

inline OptimizeOutputs run_optimize(const std::string& model_path, RunConfig cfg,
                                    const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    BlockModel model = load_block_model(model_path);
    std::vector<StageBenchUnit> units = build_units(model);
    ReserveIndex index(units, model);

    EvolveResult result = evolve(index, cfg.econ, cfg.risk, cfg.ga);

    json provenance;
    provenance["model"] = model_path;
    provenance["config"] = run_config_to_json(cfg);
    provenance["resolved_coefficient"] =
        cfg.ga.fitness == FitnessMode::discounted ? cfg.risk.resolve_coefficient() : 0.0;
    provenance["fitness"] = result.fitness;

    OptimizeOutputs out;
    out.schedule_path = (std::filesystem::path(out_dir) / "schedule.json").string();
    out.trace_path = (std::filesystem::path(out_dir) / "trace.csv").string();
    out.config_path = (std::filesystem::path(out_dir) / "config.json").string();

    json sched = schedule_to_json(result.best, result.decoded, index, provenance);
    std::ofstream sf(out.schedule_path);
    if (!sf) throw std::runtime_error("cannot write " + out.schedule_path);
    sf << sched.dump(2) << '\n';
    write_trace_csv(result.trace, out.trace_path);
    std::ofstream cf(out.config_path);
    if (!cf) throw std::runtime_error("cannot write " + out.config_path);
    cf << provenance.dump(2) << '\n';

    out.result = std::move(result);
    return out;
}

// Rebuild the decoded parcel list referenced by a schedule file against a
// model: parcels are re-derived from the stored cutoffs and matched by
// (unit, domain, bin); mass disagreement means the inputs are incompatible.
inline std::vector<Parcel> reconstruct_parcels(const LoadedSchedule& loaded, const json& sched_json,
                                               const ReserveIndex& index) {
    struct Ref {
        int unit, domain, bin;
        double mass;
    };
    std::vector<Ref> refs;
    for (const json& p : sched_json.at("parcels")) {
        size_t id = p.at("id").get<size_t>();
        if (refs.size() <= id) refs.resize(id + 1, Ref{-1, 0, 0, 0.0});
        refs[id] = Ref{p.at("unit").get<int>(), p.at("domain").get<int>(), p.at("bin").get<int>(),
                       p.at("mass_t").get<double>()};
    }
    std::map<int, std::vector<Parcel>> by_unit;
    std::vector<Parcel> parcels(refs.size());
    for (size_t id = 0; id < refs.size(); ++id) {
        const Ref& ref = refs[id];
        if (ref.unit < 0) throw std::runtime_error("schedule: missing parcel id " + std::to_string(id));
        if (ref.unit >= static_cast<int>(index.size()))
            throw std::runtime_error("schedule references unit " + std::to_string(ref.unit) +
                                     " not present in the model");
        auto it = by_unit.find(ref.unit);
        if (it == by_unit.end())
            it = by_unit.emplace(ref.unit, index.unit(ref.unit).build_parcels(loaded.genome.cutoffs, true))
                     .first;
        const Parcel* match = nullptr;
        for (const Parcel& cand : it->second)
            if (cand.domain == ref.domain && cand.bin == ref.bin) match = &cand;
        if (match == nullptr)
            throw std::runtime_error("schedule/model mismatch: no parcel for unit " +
                                     std::to_string(ref.unit) + " domain " +
                                     std::to_string(ref.domain) + " bin " + std::to_string(ref.bin));
        double tol = 1e-9 * std::max(1.0, std::max(match->mass, ref.mass));
        if (std::abs(match->mass - ref.mass) > tol)
            throw std::runtime_error("schedule/model mismatch: parcel mass differs for unit " +
                                     std::to_string(ref.unit));
        parcels[id] = *match;
    }
    return parcels;
}

struct EvaluateOutputs {
    std::string report_path;
    std::string summary_path;
    std::string compare_path;  // empty unless a comparison ran
    EnsembleReport report;
};

inline EvaluateOutputs run_evaluate(const std::string& model_path,
                                    const std::string& schedule_path, const std::string& out_dir,
                                    const std::optional<std::string>& compare_schedule = {},
                                    const std::optional<RunConfig>& config_override = {}) {
    std::filesystem::create_directories(out_dir);
    BlockModel model = load_block_model(model_path);
    std::vector<StageBenchUnit> units = build_units(model);
    ReserveIndex index(units, model);

    auto load_one = [&](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open schedule: " + path);
        json sj = json::parse(in);
        LoadedSchedule loaded = schedule_from_json(sj);
        std::vector<Parcel> parcels = reconstruct_parcels(loaded, sj, index);
        return std::make_pair(std::move(loaded), std::move(parcels));
    };

    auto [loaded, parcels] = load_one(schedule_path);
    EconomicConfig econ;
    if (config_override) {
        econ = config_override->econ;
    } else if (loaded.provenance.contains("config")) {
        econ = econ_from_json(loaded.provenance.at("config").at("econ"));
    } else {
        throw std::runtime_error(
            "schedule carries no economic configuration; pass a config file");
    }

    EvaluateOutputs out;
    out.report = build_report(loaded.schedule, parcels, econ, model.n_members);
    out.report_path = (std::filesystem::path(out_dir) / "report.csv").string();
    out.summary_path = (std::filesystem::path(out_dir) / "summary.json").string();
    emit_report(out.report, out.report_path, out.summary_path);

    if (compare_schedule) {
        auto [other_loaded, other_parcels] = load_one(*compare_schedule);
        EnsembleReport other = build_report(other_loaded.schedule, other_parcels, econ, model.n_members);
        out.compare_path = (std::filesystem::path(out_dir) / "compare.csv").string();
        emit_comparison(out.report, other, out.compare_path);
    }
    return out;
}

}  // namespace mineplan
