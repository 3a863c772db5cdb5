#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "mineplan/ga.hpp"

namespace mineplan {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Run configuration: one JSON document with econ / ga / risk objects.
// Scalars are accepted wherever per-period vectors are allowed.
// ---------------------------------------------------------------------------

namespace detail {

inline PeriodSeries series_from_json(const json& j) {
    if (j.is_array()) return PeriodSeries(j.get<std::vector<double>>());
    return PeriodSeries(j.get<double>());
}

inline json series_to_json(const PeriodSeries& s) {
    if (s.is_scalar()) return json(s.values().front());
    return json(s.values());
}

}  // namespace detail

inline EconomicConfig econ_from_json(const json& j) {
    EconomicConfig econ;
    if (j.contains("price")) econ.price = detail::series_from_json(j.at("price"));
    if (j.contains("selling_cost")) econ.selling_cost = j.at("selling_cost").get<double>();
    if (j.contains("processing_cost"))
        econ.processing_cost = detail::series_from_json(j.at("processing_cost"));
    if (j.contains("mining_cost")) econ.mining_cost = detail::series_from_json(j.at("mining_cost"));
    if (j.contains("rehab_cost")) econ.rehab_cost = j.at("rehab_cost").get<double>();
    if (j.contains("recovery")) {
        const json& r = j.at("recovery");
        if (r.is_object()) {
            for (auto it = r.begin(); it != r.end(); ++it)
                econ.recovery[std::stoi(it.key())] = it.value().get<double>();
        } else {
            econ.recovery_default = r.get<double>();
        }
    }
    if (j.contains("discount_rate")) econ.discount_rate = j.at("discount_rate").get<double>();
    if (j.contains("mill_capacity")) econ.mill_capacity = j.at("mill_capacity").get<double>();
    if (j.contains("mining_capacity") && !j.at("mining_capacity").is_null())
        econ.mining_capacity = j.at("mining_capacity").get<double>();
    if (j.contains("max_periods")) econ.max_periods = j.at("max_periods").get<int>();
    econ.validate();
    return econ;
}

inline json econ_to_json(const EconomicConfig& econ) {
    json j;
    j["price"] = detail::series_to_json(econ.price);
    j["selling_cost"] = econ.selling_cost;
    j["processing_cost"] = detail::series_to_json(econ.processing_cost);
    j["mining_cost"] = detail::series_to_json(econ.mining_cost);
    j["rehab_cost"] = econ.rehab_cost;
    if (!econ.recovery.empty()) {
        json r = json::object();
        for (const auto& [domain, rec] : econ.recovery) r[std::to_string(domain)] = rec;
        j["recovery"] = r;
    } else {
        j["recovery"] = econ.recovery_default;
    }
    j["discount_rate"] = econ.discount_rate;
    j["mill_capacity"] = econ.mill_capacity;
    j["mining_capacity"] = econ.mining_capacity ? json(*econ.mining_capacity) : json(nullptr);
    j["max_periods"] = econ.max_periods;
    return j;
}

inline RiskParams risk_from_json(const json& j) {
    RiskParams risk;
    if (j.contains("mode")) risk.mode = risk_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("alpha")) risk.alpha = j.at("alpha").get<double>();
    if (j.contains("coefficient") && !j.at("coefficient").is_null())
        risk.coefficient = j.at("coefficient").get<double>();
    if (j.contains("window")) risk.window = j.at("window").get<int>();
    if (j.contains("spawner_mix")) risk.spawner_mix = j.at("spawner_mix").get<double>();
    risk.validate();
    return risk;
}

inline json risk_to_json(const RiskParams& risk) {
    json j;
    j["mode"] = to_string(risk.mode);
    j["alpha"] = risk.alpha;
    j["coefficient"] = risk.coefficient;
    j["window"] = risk.window;
    j["spawner_mix"] = risk.spawner_mix;
    return j;
}

inline GaConfig ga_from_json(const json& j) {
    GaConfig cfg;
    if (j.contains("population")) cfg.population = j.at("population").get<int>();
    if (j.contains("generations")) cfg.generations = j.at("generations").get<int>();
    if (j.contains("elitism")) cfg.elitism = j.at("elitism").get<int>();
    if (j.contains("tournament")) cfg.tournament = j.at("tournament").get<int>();
    if (j.contains("cutoff_mutation_rate"))
        cfg.cutoff_mutation_rate = j.at("cutoff_mutation_rate").get<double>();
    if (j.contains("sequence_mutation_rate"))
        cfg.sequence_mutation_rate = j.at("sequence_mutation_rate").get<double>();
    if (j.contains("crossover_rate")) cfg.crossover_rate = j.at("crossover_rate").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("fitness")) cfg.fitness = fitness_mode_from_string(j.at("fitness").get<std::string>());
    if (j.contains("mining")) cfg.mining = mining_mode_from_string(j.at("mining").get<std::string>());
    if (j.contains("precedence"))
        cfg.precedence = precedence_from_string(j.at("precedence").get<std::string>());
    if (j.contains("cutoff_sigma_factor"))
        cfg.cutoff_sigma_factor = j.at("cutoff_sigma_factor").get<double>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    cfg.validate();
    return cfg;
}

inline json ga_to_json(const GaConfig& cfg) {
    json j;
    j["population"] = cfg.population;
    j["generations"] = cfg.generations;
    j["elitism"] = cfg.elitism;
    j["tournament"] = cfg.tournament;
    j["cutoff_mutation_rate"] = cfg.cutoff_mutation_rate;
    j["sequence_mutation_rate"] = cfg.sequence_mutation_rate;
    j["crossover_rate"] = cfg.crossover_rate;
    j["seed"] = cfg.seed;
    j["fitness"] = to_string(cfg.fitness);
    j["mining"] = to_string(cfg.mining);
    j["precedence"] = cfg.precedence == PrecedencePolicy::concurrent ? "concurrent" : "strict";
    j["cutoff_sigma_factor"] = cfg.cutoff_sigma_factor;
    j["threads"] = cfg.threads;
    return j;
}

struct RunConfig {
    EconomicConfig econ;
    GaConfig ga;
    RiskParams risk;
};

inline RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    if (j.contains("econ")) cfg.econ = econ_from_json(j.at("econ"));
    if (j.contains("ga")) cfg.ga = ga_from_json(j.at("ga"));
    if (j.contains("risk")) cfg.risk = risk_from_json(j.at("risk"));
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    return run_config_from_json(json::parse(in));
}

inline json run_config_to_json(const RunConfig& cfg) {
    json j;
    j["econ"] = econ_to_json(cfg.econ);
    j["ga"] = ga_to_json(cfg.ga);
    j["risk"] = risk_to_json(cfg.risk);
    return j;
}

// ---------------------------------------------------------------------------
// Schedule files
// ---------------------------------------------------------------------------

inline json cutoffs_to_json(const CutoffSet& cutoffs) {
    json j = json::object();
    for (const auto& [key, bounds] : cutoffs.table()) {
        const char* dest = to_string(static_cast<Destination>(key.first));
        j[dest][std::to_string(key.second)] = bounds;
    }
    return j;
}

inline CutoffSet cutoffs_from_json(const json& j) {
    CutoffSet cutoffs;
    for (auto dest_it = j.begin(); dest_it != j.end(); ++dest_it) {
        Destination dest = destination_from_string(dest_it.key());
        for (auto dom_it = dest_it.value().begin(); dom_it != dest_it.value().end(); ++dom_it)
            cutoffs.set(dest, std::stoi(dom_it.key()), dom_it.value().get<std::vector<double>>());
    }
    return cutoffs;
}

inline json schedule_to_json(const Genome& genome, const DecodedSchedule& decoded,
                             const ReserveIndex& index, const json& provenance) {
    json j;
    j["format"] = "mineplan-schedule/1";
    j["provenance"] = provenance;
    json units = json::array();
    for (const StageBenchUnit& u : index.units())
        units.push_back({{"id", u.id}, {"stage", u.stage}, {"bench", u.bench}});
    j["units"] = units;
    j["cutoffs"] = cutoffs_to_json(genome.cutoffs);
    j["sequence"] = genome.sequence;
    json parcels = json::array();
    for (size_t i = 0; i < decoded.parcels.size(); ++i) {
        const Parcel& p = decoded.parcels[i];
        parcels.push_back({{"id", static_cast<int>(i)},
                           {"unit", p.unit_id},
                           {"domain", p.domain},
                           {"bin", p.bin},
                           {"bin_low", p.bin_low},
                           {"mass_t", p.mass},
                           {"mean_grade", p.mean_grade}});
    }
    j["parcels"] = parcels;
    json rows = json::array();
    for (const ScheduleRow& r : decoded.schedule.rows)
        rows.push_back({{"unit", r.unit_id},
                        {"parcel", r.parcel_id},
                        {"period", r.period},
                        {"destination", to_string(r.dest)},
                        {"mass_t", r.mass}});
    j["rows"] = rows;
    json totals = json::array();
    for (int t = 1; t <= decoded.schedule.periods; ++t) {
        const PeriodTotals& pt = decoded.schedule.totals[static_cast<size_t>(t)];
        totals.push_back({{"period", t},
                          {"milled_t", pt.milled},
                          {"mined_t", pt.mined},
                          {"milled_parcels", pt.milled_parcels}});
    }
    j["period_totals"] = totals;
    j["periods"] = decoded.schedule.periods;
    return j;
}

struct LoadedSchedule {
    Genome genome;
    Schedule schedule;
    std::vector<double> parcel_mass;  // expected decoded parcel masses, by id
    json provenance;
};

inline LoadedSchedule schedule_from_json(const json& j) {
    if (!j.contains("format") || j.at("format").get<std::string>() != "mineplan-schedule/1")
        throw std::runtime_error("not a mineplan schedule file");
    LoadedSchedule out;
    out.genome.cutoffs = cutoffs_from_json(j.at("cutoffs"));
    out.genome.sequence = j.at("sequence").get<std::vector<int>>();
    if (j.contains("provenance")) out.provenance = j.at("provenance");
    for (const json& p : j.at("parcels")) {
        size_t id = p.at("id").get<size_t>();
        if (out.parcel_mass.size() <= id) out.parcel_mass.resize(id + 1, 0.0);
        out.parcel_mass[id] = p.at("mass_t").get<double>();
    }
    int periods = 0;
    for (const json& r : j.at("rows")) {
        ScheduleRow row;
        row.unit_id = r.at("unit").get<int>();
        row.parcel_id = r.at("parcel").get<int>();
        row.period = r.at("period").get<int>();
        row.dest = destination_from_string(r.at("destination").get<std::string>());
        row.mass = r.at("mass_t").get<double>();
        periods = std::max(periods, row.period);
        out.schedule.rows.push_back(row);
    }
    out.schedule.periods = periods;
    out.schedule.totals.assign(static_cast<size_t>(periods) + 1, PeriodTotals{});
    for (const ScheduleRow& row : out.schedule.rows) {
        PeriodTotals& t = out.schedule.totals[static_cast<size_t>(row.period)];
        t.mined += row.mass;
        if (row.dest == Destination::mill) {
            t.milled += row.mass;
            t.milled_parcels += 1;
        }
    }
    return out;
}

inline LoadedSchedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schedule: " + path);
    return schedule_from_json(json::parse(in));
}

inline void write_trace_csv(const std::vector<GenerationStats>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace: " + path);
    out << "generation,best,mean\n";
    for (const GenerationStats& g : trace)
        out << g.generation << ',' << format_double(g.best) << ',' << format_double(g.mean) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mineplan
