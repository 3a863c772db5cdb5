#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <thread>
#include <vector>

#include "mineplan/risk.hpp"

namespace mineplan {

enum class MiningMode { ore_first, simultaneous };
enum class FitnessMode { npv, discounted };

inline MiningMode mining_mode_from_string(const std::string& s) {
    if (s == "ore-first" || s == "ore_first") return MiningMode::ore_first;
    if (s == "simultaneous") return MiningMode::simultaneous;
    throw std::invalid_argument("unknown mining mode: " + s);
}

inline const char* to_string(MiningMode m) {
    return m == MiningMode::ore_first ? "ore-first" : "simultaneous";
}

inline FitnessMode fitness_mode_from_string(const std::string& s) {
    if (s == "npv") return FitnessMode::npv;
    if (s == "discounted") return FitnessMode::discounted;
    throw std::invalid_argument("unknown fitness mode: " + s);
}

inline const char* to_string(FitnessMode m) {
    return m == FitnessMode::npv ? "npv" : "discounted";
}

struct Genome {
    CutoffSet cutoffs;
    std::vector<int> sequence;  // precedence-valid permutation of unit ids
};

struct GaConfig {
    int population = 100;
    int generations = 500;
    int elitism = 2;
    int tournament = 3;
    double cutoff_mutation_rate = 0.25;
    double sequence_mutation_rate = 0.15;
    double crossover_rate = 0.9;
    std::uint64_t seed = 1;
    FitnessMode fitness = FitnessMode::npv;
    MiningMode mining = MiningMode::ore_first;
    PrecedencePolicy precedence = PrecedencePolicy::concurrent;
    double cutoff_sigma_factor = 0.1;  // sigma as a fraction of the breakeven cutoff
    int threads = 1;

    void validate() const {
        if (population < 2) throw std::invalid_argument("ga: population must be >= 2");
        if (generations < 0) throw std::invalid_argument("ga: generations must be >= 0");
        if (elitism < 0 || elitism >= population)
            throw std::invalid_argument("ga: elitism must be in [0, population)");
        if (tournament < 1) throw std::invalid_argument("ga: tournament must be >= 1");
        auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
        if (!rate(cutoff_mutation_rate) || !rate(sequence_mutation_rate) || !rate(crossover_rate))
            throw std::invalid_argument("ga: rates must be in [0,1]");
        if (cutoff_sigma_factor <= 0.0)
            throw std::invalid_argument("ga: cutoff_sigma_factor must be > 0");
        if (threads < 1) throw std::invalid_argument("ga: threads must be >= 1");
    }
};

class HorizonError : public std::runtime_error {
public:
    HorizonError(int required, int limit)
        : std::runtime_error("schedule requires " + std::to_string(required) +
                             " periods but the horizon allows " + std::to_string(limit)),
          required_periods(required) {}
    int required_periods;
};

namespace detail {

// unit ids per stage, top bench first
inline std::map<int, std::vector<int>> stage_chains(const ReserveIndex& index) {
    std::map<int, std::vector<int>> chains;
    for (const StageBenchUnit& u : index.units()) chains[u.stage].push_back(u.id);
    for (auto& [stage, chain] : chains)
        std::sort(chain.begin(), chain.end(), [&](int a, int b) {
            return index.units()[static_cast<size_t>(a)].bench >
                   index.units()[static_cast<size_t>(b)].bench;
        });
    return chains;
}

inline double domain_max_grade(const ReserveIndex& index, int domain) {
    double g = 0;
    for (size_t u = 0; u < index.size(); ++u)
        for (const auto& s : index.unit(static_cast<int>(u)).slices())
            if (s.domain == domain) g = std::max(g, s.max_grade);
    return g;
}

// Undiscounted routed value of one unit at the nominal period, plus the
// profit-vector aggregates of its milled parcels (for blend scoring).
struct UnitAggregates {
    double milled_mean = 0.0;
    double waste = 0.0;
    double var_sum = 0.0;
    std::vector<double> member_sum;
    double value() const { return milled_mean + waste; }
};

inline UnitAggregates unit_aggregates(const UnitIndex& unit, const CutoffSet& cutoffs,
                                      const EconomicConfig& econ) {
    UnitAggregates agg;
    agg.member_sum.assign(static_cast<size_t>(unit.members()), 0.0);
    for (const Parcel& p : unit.build_parcels(cutoffs, false)) {
        if (p.bin_low >= cutoffs.mill_cutoff(p.domain)) {
            ParcelProfitStats s = parcel_profit_stats(p, 1, econ);
            agg.milled_mean += s.mean;
            agg.var_sum += s.variance;
            for (size_t e = 0; e < s.profits.size(); ++e) agg.member_sum[e] += s.profits[e];
        } else {
            agg.waste += waste_profit(p.mass, 1, econ);
        }
    }
    return agg;
}

// One normal draw per ore domain, centered at the breakeven cutoff.
inline CutoffSet draw_cutoffs(const ReserveIndex& index, const EconomicConfig& econ,
                              double sigma_factor, Rng& rng) {
    CutoffSet cutoffs;
    for (int domain : index.ore_domains()) {
        double hi = domain_max_grade(index, domain);
        double anchor = econ.breakeven_cutoff(domain);
        if (!std::isfinite(anchor)) anchor = hi;  // milling never pays; park at the top
        double c = rng.normal(anchor, sigma_factor * anchor);
        c = std::clamp(c, 0.0, hi);
        cutoffs.set(Destination::mill, domain, {c});
    }
    return cutoffs;
}

// Candidate units available next: the unmined top bench of each open stage.
inline std::vector<int> available_units(const std::map<int, std::vector<int>>& chains,
                                        std::map<int, size_t>& cursor, PrecedencePolicy policy) {
    std::vector<int> avail;
    for (const auto& [stage, chain] : chains) {
        size_t at = cursor[stage];
        if (at >= chain.size()) continue;
        avail.push_back(chain[at]);
        if (policy == PrecedencePolicy::strict_stage) break;  // lowest open stage only
    }
    return avail;
}

inline double weight_floor(std::span<const double> raw) {
    double m = 1.0;
    for (double v : raw) m = std::max(m, std::abs(v));
    return 1e-9 * m;
}

}  // namespace detail

// Sequence built by biased random selection among precedence-available units,
// probability proportional to max(eps, undiscounted unit value); cutoffs drawn
// normally around the breakeven cutoff.
inline Genome spawn_value_biased(const ReserveIndex& index, const EconomicConfig& econ,
                                 const GaConfig& cfg, Rng& rng) {
    if (index.size() == 0) throw std::invalid_argument("spawn: no units");
    Genome g;
    g.cutoffs = detail::draw_cutoffs(index, econ, cfg.cutoff_sigma_factor, rng);

    std::vector<double> values(index.size());
    for (size_t u = 0; u < index.size(); ++u)
        values[u] = detail::unit_aggregates(index.unit(static_cast<int>(u)), g.cutoffs, econ).value();

    auto chains = detail::stage_chains(index);
    std::map<int, size_t> cursor;
    std::vector<double> weights;
    while (g.sequence.size() < index.size()) {
        std::vector<int> avail = detail::available_units(chains, cursor, cfg.precedence);
        weights.clear();
        for (int id : avail) weights.push_back(values[static_cast<size_t>(id)]);
        double eps = detail::weight_floor(weights);
        for (double& w : weights) w = std::max(eps, w);
        int chosen = avail[pick_weighted(weights, rng)];
        g.sequence.push_back(chosen);
        cursor[index.units()[static_cast<size_t>(chosen)].stage] += 1;
    }
    return g;
}

// Sliding window of the last w units chosen, with running milled-profit
// aggregates for scoring candidate blends.
class BlendWindow {
public:
    BlendWindow(int window, size_t members) : window_(window), sum_(members, 0.0) {}

    void push(int unit_id, double var_sum, std::span<const double> member_sum) {
        ids_.push_back(unit_id);
        vars_.push_back(var_sum);
        sums_.emplace_back(member_sum.begin(), member_sum.end());
        var_ += var_sum;
        for (size_t e = 0; e < sum_.size(); ++e) sum_[e] += member_sum[e];
        if (static_cast<int>(ids_.size()) > window_) {
            var_ -= vars_.front();
            for (size_t e = 0; e < sum_.size(); ++e) sum_[e] -= sums_.front()[e];
            ids_.pop_front();
            vars_.pop_front();
            sums_.pop_front();
        }
    }

    const std::deque<int>& ids() const { return ids_; }
    double var_sum() const { return var_; }
    const std::vector<double>& member_sum() const { return sum_; }

    // SV of the window's milled material, optionally with a candidate added.
    double sv_with(double extra_var = 0.0, std::span<const double> extra_sum = {}) const {
        double var = var_ + extra_var;
        double var_of_sum;
        if (!extra_sum.empty()) {
            std::vector<double> s(sum_);
            for (size_t e = 0; e < s.size(); ++e) s[e] += extra_sum[e];
            var_of_sum = population_variance(s);
        } else {
            var_of_sum = population_variance(sum_);
        }
        return std::sqrt(std::max(var, var_of_sum));
    }

private:
    int window_;
    double var_ = 0.0;
    std::vector<double> sum_;
    std::deque<int> ids_;
    std::deque<double> vars_;
    std::deque<std::vector<double>> sums_;
};

// Uncertainty-blending spawner: keeps a window W of the last w units chosen,
// scores each available unit r by the uncertainty-discounted profit of
// W + r at the nominal period, and samples biased toward the best score.
// Scores are taken relative to W's own score, so with a zero-variance
// ensemble the weighting reduces to the value-biased spawner's.
inline Genome spawn_uncertainty_blend(const ReserveIndex& index, const EconomicConfig& econ,
                                      const RiskParams& risk, const GaConfig& cfg, Rng& rng) {
    if (index.size() == 0) throw std::invalid_argument("spawn: no units");
    const double K = risk.resolve_coefficient();
    Genome g;
    g.cutoffs = detail::draw_cutoffs(index, econ, cfg.cutoff_sigma_factor, rng);

    std::vector<detail::UnitAggregates> agg(index.size());
    for (size_t u = 0; u < index.size(); ++u)
        agg[u] = detail::unit_aggregates(index.unit(static_cast<int>(u)), g.cutoffs, econ);

    BlendWindow window(risk.window, static_cast<size_t>(index.model().n_members));
    auto chains = detail::stage_chains(index);
    std::map<int, size_t> cursor;
    std::vector<double> weights;
    while (g.sequence.size() < index.size()) {
        std::vector<int> avail = detail::available_units(chains, cursor, cfg.precedence);
        const double sv_window = window.sv_with();
        weights.clear();
        for (int id : avail) {
            const auto& a = agg[static_cast<size_t>(id)];
            double score = a.value() - K * (window.sv_with(a.var_sum, a.member_sum) - sv_window);
            weights.push_back(score);
        }
        double eps = detail::weight_floor(weights);
        for (double& w : weights) w = std::max(eps, w);
        int chosen = avail[pick_weighted(weights, rng)];
        g.sequence.push_back(chosen);
        cursor[index.units()[static_cast<size_t>(chosen)].stage] += 1;
        const auto& a = agg[static_cast<size_t>(chosen)];
        window.push(chosen, a.var_sum, a.member_sum);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Variation operators
// ---------------------------------------------------------------------------

namespace detail {

// position of each unit in its stage chain, for relocation bounds
struct ChainInfo {
    std::map<int, std::vector<int>> chains;
    std::vector<int> chain_pos;  // per unit id

    explicit ChainInfo(const ReserveIndex& index) : chains(stage_chains(index)) {
        chain_pos.assign(index.size(), 0);
        for (const auto& [stage, chain] : chains)
            for (size_t i = 0; i < chain.size(); ++i)
                chain_pos[static_cast<size_t>(chain[i])] = static_cast<int>(i);
    }
};

}  // namespace detail

// Cutoff boundaries receive a normal perturbation centered at their current
// value (re-sorted, clamped to [0, max grade]); sequence mutation relocates a
// unit to a uniformly chosen precedence-valid position.
inline Genome mutate(Genome genome, const ReserveIndex& index, const EconomicConfig& econ,
                     const GaConfig& cfg, Rng& rng) {
    // cutoffs
    CutoffSet mutated;
    for (const auto& [key, bounds] : genome.cutoffs.table()) {
        const int domain = key.second;
        double hi = detail::domain_max_grade(index, domain);
        double anchor = econ.breakeven_cutoff(domain);
        if (!std::isfinite(anchor)) anchor = hi;
        double sigma = cfg.cutoff_sigma_factor * anchor;
        std::vector<double> next(bounds);
        for (double& b : next) {
            if (rng.uniform01() < cfg.cutoff_mutation_rate)
                b = std::clamp(rng.normal(b, sigma), 0.0, hi);
        }
        std::sort(next.begin(), next.end());
        for (size_t i = 1; i < next.size(); ++i)
            if (next[i] <= next[i - 1])
                next[i] = std::nextafter(next[i - 1], std::numeric_limits<double>::infinity());
        mutated.set(static_cast<Destination>(key.first), domain, std::move(next));
    }
    genome.cutoffs = std::move(mutated);

    // sequence
    detail::ChainInfo info(index);
    const auto& units = index.units();
    const size_t n = genome.sequence.size();
    for (size_t k = 0; k < n; ++k) {
        if (rng.uniform01() >= cfg.sequence_mutation_rate) continue;
        const int id = genome.sequence[k];
        const StageBenchUnit& u = units[static_cast<size_t>(id)];
        std::vector<int> seq(genome.sequence);
        seq.erase(std::find(seq.begin(), seq.end(), id));

        const auto& chain = info.chains[u.stage];
        const int pos = info.chain_pos[static_cast<size_t>(id)];
        int lo = 0, hi = static_cast<int>(seq.size());
        if (pos > 0) {
            int pred = chain[static_cast<size_t>(pos - 1)];
            lo = static_cast<int>(std::find(seq.begin(), seq.end(), pred) - seq.begin()) + 1;
        }
        if (pos + 1 < static_cast<int>(chain.size())) {
            int succ = chain[static_cast<size_t>(pos + 1)];
            hi = static_cast<int>(std::find(seq.begin(), seq.end(), succ) - seq.begin());
        }
        if (cfg.precedence == PrecedencePolicy::strict_stage) {
            for (size_t i = 0; i < seq.size(); ++i) {
                int s = units[static_cast<size_t>(seq[i])].stage;
                if (s < u.stage) lo = std::max(lo, static_cast<int>(i) + 1);
                if (s > u.stage) {
                    hi = std::min(hi, static_cast<int>(i));
                    break;
                }
            }
        }
        int at = rng.uniform_int(lo, std::max(lo, hi));
        seq.insert(seq.begin() + at, id);
        genome.sequence = std::move(seq);
    }
    return genome;
}

// Precedence-preserving order crossover: a contiguous segment of parent A is
// kept, the rest filled in parent B's relative order, then repaired by stable
// topological reinsertion. Cutoff boundaries are picked uniformly per bound.
inline Genome crossover(const Genome& a, const Genome& b, const ReserveIndex& index,
                        const GaConfig& cfg, Rng& rng) {
    const size_t n = a.sequence.size();
    if (b.sequence.size() != n || !a.cutoffs.same_structure(b.cutoffs))
        throw std::invalid_argument("crossover: parents cover different unit or cutoff sets");

    int i = rng.uniform_int(0, static_cast<int>(n) - 1);
    int j = rng.uniform_int(0, static_cast<int>(n) - 1);
    if (i > j) std::swap(i, j);

    std::vector<char> in_segment(n, 0);
    for (int k = i; k <= j; ++k) in_segment[static_cast<size_t>(a.sequence[static_cast<size_t>(k)])] = 1;
    std::vector<int> proposal;
    proposal.reserve(n);
    size_t from_b = 0;
    auto next_from_b = [&]() {
        while (in_segment[static_cast<size_t>(b.sequence[from_b])]) ++from_b;
        return b.sequence[from_b++];
    };
    for (size_t k = 0; k < n; ++k) {
        if (k >= static_cast<size_t>(i) && k <= static_cast<size_t>(j))
            proposal.push_back(a.sequence[k]);
        else
            proposal.push_back(next_from_b());
    }

    // stable topological repair: repeatedly emit the first available unit
    detail::ChainInfo info(index);
    const auto& units = index.units();
    std::map<int, size_t> cursor;
    std::vector<int> repaired;
    repaired.reserve(n);
    std::vector<char> emitted(n, 0);
    while (repaired.size() < n) {
        for (size_t k = 0; k < n; ++k) {
            int id = proposal[k];
            if (emitted[static_cast<size_t>(id)]) continue;
            const StageBenchUnit& u = units[static_cast<size_t>(id)];
            const auto& chain = info.chains[u.stage];
            if (chain[cursor[u.stage]] != id) continue;
            if (cfg.precedence == PrecedencePolicy::strict_stage) {
                bool blocked = false;
                for (const auto& [stage, ch] : info.chains)
                    if (stage < u.stage && cursor[stage] < ch.size()) blocked = true;
                if (blocked) continue;
            }
            emitted[static_cast<size_t>(id)] = 1;
            cursor[u.stage] += 1;
            repaired.push_back(id);
            break;
        }
    }

    Genome child;
    child.sequence = std::move(repaired);
    for (const auto& [key, bounds_a] : a.cutoffs.table()) {
        const std::vector<double>& bounds_b = b.cutoffs.table().at(key);
        std::vector<double> picked(bounds_a.size());
        for (size_t k = 0; k < bounds_a.size(); ++k)
            picked[k] = rng.uniform01() < 0.5 ? bounds_a[k] : bounds_b[k];
        std::sort(picked.begin(), picked.end());
        for (size_t k = 1; k < picked.size(); ++k)
            if (picked[k] <= picked[k - 1])
                picked[k] = std::nextafter(picked[k - 1], std::numeric_limits<double>::infinity());
        child.cutoffs.set(static_cast<Destination>(key.first), key.second, std::move(picked));
    }
    return child;
}

// ---------------------------------------------------------------------------
// Genome decode
// ---------------------------------------------------------------------------

struct DecodedSchedule {
    std::vector<Parcel> parcels;
    Schedule schedule;
};

// Walk the sequence; parcels in bins at/above the mill cutoff fill the mill
// up to capacity per period (splitting proportionally at period boundaries),
// the rest goes to waste. Ore-first mode stops all mining in a period once
// the mill is full; simultaneous mode co-schedules waste with its unit.
inline DecodedSchedule decode(const Genome& genome, const ReserveIndex& index,
                              const EconomicConfig& econ, MiningMode mode) {
    DecodedSchedule out;
    Schedule& sched = out.schedule;
    std::vector<double> milled(2, 0.0), mined(2, 0.0);
    const double mill_cap = econ.mill_capacity;
    const double mine_cap = econ.mining_capacity.value_or(std::numeric_limits<double>::infinity());
    const double dust = 1e-9 * mill_cap;
    auto ensure = [&](int t) {
        while (static_cast<int>(milled.size()) <= t + 1) {
            milled.push_back(0.0);
            mined.push_back(0.0);
        }
    };

    int tcur = 1;
    for (int unit_id : genome.sequence) {
        const UnitIndex& unit = index.unit(unit_id);
        std::vector<Parcel> parcels = unit.build_parcels(genome.cutoffs, false);
        const int unit_start = tcur;
        // ore first within the unit, then waste
        std::stable_partition(parcels.begin(), parcels.end(), [&](const Parcel& p) {
            return p.bin_low >= genome.cutoffs.mill_cutoff(p.domain);
        });
        for (Parcel& p : parcels) {
            const bool to_mill = p.bin_low >= genome.cutoffs.mill_cutoff(p.domain);
            const int parcel_id = static_cast<int>(out.parcels.size());
            double remaining = p.mass;
            if (to_mill) {
                while (remaining > 0) {
                    ensure(tcur);
                    double room = std::min(mill_cap - milled[static_cast<size_t>(tcur)],
                                           mine_cap - mined[static_cast<size_t>(tcur)]);
                    if (room <= dust) {
                        ++tcur;
                        continue;
                    }
                    double take = std::min(remaining, room);
                    sched.rows.push_back({unit_id, parcel_id, tcur, Destination::mill, take});
                    milled[static_cast<size_t>(tcur)] += take;
                    mined[static_cast<size_t>(tcur)] += take;
                    remaining -= take;
                }
            } else {
                int t = mode == MiningMode::simultaneous ? unit_start : tcur;
                while (remaining > 0) {
                    ensure(t);
                    if (mode == MiningMode::ore_first &&
                        milled[static_cast<size_t>(t)] >= mill_cap - dust) {
                        // mill full: all mining stops for the period
                        ++t;
                        tcur = std::max(tcur, t);
                        continue;
                    }
                    double room = mine_cap - mined[static_cast<size_t>(t)];
                    if (room <= dust) {
                        ++t;
                        if (mode == MiningMode::ore_first) tcur = std::max(tcur, t);
                        continue;
                    }
                    double take = std::min(remaining, room);
                    sched.rows.push_back({unit_id, parcel_id, t, Destination::waste, take});
                    mined[static_cast<size_t>(t)] += take;
                    remaining -= take;
                }
            }
            out.parcels.push_back(std::move(p));
        }
    }

    int periods = 0;
    for (const ScheduleRow& row : sched.rows) periods = std::max(periods, row.period);
    sched.periods = periods;
    sched.totals.assign(static_cast<size_t>(periods) + 1, PeriodTotals{});
    for (const ScheduleRow& row : sched.rows) {
        PeriodTotals& t = sched.totals[static_cast<size_t>(row.period)];
        t.mined += row.mass;
        if (row.dest == Destination::mill) {
            t.milled += row.mass;
            t.milled_parcels += 1;
        }
    }
    if (periods > econ.max_periods) throw HorizonError(periods, econ.max_periods);
    return out;
}

// ---------------------------------------------------------------------------
// Evolutionary loop
// ---------------------------------------------------------------------------

struct GenerationStats {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
};

struct EvolveResult {
    Genome best;
    DecodedSchedule decoded;
    double fitness = 0.0;
    std::vector<GenerationStats> trace;
};

namespace detail {

inline double evaluate_genome(const Genome& g, const ReserveIndex& index,
                              const EconomicConfig& econ, MiningMode mode, double coefficient) {
    try {
        DecodedSchedule dec = decode(g, index, econ, mode);
        return discounted_fitness(dec.schedule, dec.parcels, econ, coefficient);
    } catch (const HorizonError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

inline void evaluate_population(const std::vector<Genome>& pop, std::vector<double>& fitness,
                                const std::vector<char>& dirty, const ReserveIndex& index,
                                const EconomicConfig& econ, MiningMode mode, double coefficient,
                                int threads) {
    auto work = [&](size_t start, size_t stride) {
        for (size_t i = start; i < pop.size(); i += stride)
            if (dirty[i]) fitness[i] = evaluate_genome(pop[i], index, econ, mode, coefficient);
    };
    if (threads <= 1 || pop.size() < 2) {
        work(0, 1);
        return;
    }
    size_t n = std::min<size_t>(static_cast<size_t>(threads), pop.size());
    std::vector<std::thread> pool;
    for (size_t w = 1; w < n; ++w) pool.emplace_back(work, w, n);
    work(0, n);
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Generational GA with tournament selection, elitism, and per-individual
// random streams derived from (seed, generation, index); fully reproducible.
inline EvolveResult evolve(const ReserveIndex& index, const EconomicConfig& econ,
                           const RiskParams& risk, const GaConfig& cfg) {
    cfg.validate();
    risk.validate();
    econ.validate();
    if (index.size() == 0) throw std::invalid_argument("evolve: no units to schedule");

    const double coefficient =
        cfg.fitness == FitnessMode::discounted ? risk.resolve_coefficient() : 0.0;
    const int pop_size = cfg.population;
    const int blend_count =
        static_cast<int>(std::lround(risk.spawner_mix * static_cast<double>(pop_size)));

    std::vector<Genome> pop;
    pop.reserve(static_cast<size_t>(pop_size));
    for (int i = 0; i < pop_size; ++i) {
        Rng rng(derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(i)));
        pop.push_back(i < blend_count ? spawn_uncertainty_blend(index, econ, risk, cfg, rng)
                                      : spawn_value_biased(index, econ, cfg, rng));
    }

    std::vector<double> fitness(static_cast<size_t>(pop_size), 0.0);
    std::vector<char> dirty(static_cast<size_t>(pop_size), 1);
    detail::evaluate_population(pop, fitness, dirty, index, econ, cfg.mining, coefficient,
                                cfg.threads);

    auto ranking = [&]() {
        std::vector<int> order(static_cast<size_t>(pop_size));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fitness[static_cast<size_t>(a)] > fitness[static_cast<size_t>(b)];
        });
        return order;
    };

    auto record = [&](int gen, std::vector<GenerationStats>& trace) {
        double best = -std::numeric_limits<double>::infinity();
        double sum = 0;
        int finite = 0;
        for (double f : fitness) {
            best = std::max(best, f);
            if (std::isfinite(f)) {
                sum += f;
                ++finite;
            }
        }
        trace.push_back({gen, best, finite > 0 ? sum / finite : best});
        return finite;
    };

    EvolveResult result;
    if (record(0, result.trace) == 0)
        throw std::runtime_error("evolve: no feasible individual; horizon too short");

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<int> order = ranking();
        std::vector<Genome> next;
        next.reserve(static_cast<size_t>(pop_size));
        std::vector<double> next_fitness(static_cast<size_t>(pop_size), 0.0);
        std::vector<char> next_dirty(static_cast<size_t>(pop_size), 1);
        for (int e = 0; e < cfg.elitism; ++e) {
            int id = order[static_cast<size_t>(e)];
            next.push_back(pop[static_cast<size_t>(id)]);
            next_fitness[static_cast<size_t>(e)] = fitness[static_cast<size_t>(id)];
            next_dirty[static_cast<size_t>(e)] = 0;
        }
        for (int i = cfg.elitism; i < pop_size; ++i) {
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(gen),
                                static_cast<std::uint64_t>(i)));
            auto tournament_pick = [&]() {
                int best = rng.uniform_int(0, pop_size - 1);
                for (int k = 1; k < cfg.tournament; ++k) {
                    int cand = rng.uniform_int(0, pop_size - 1);
                    if (fitness[static_cast<size_t>(cand)] > fitness[static_cast<size_t>(best)] ||
                        (fitness[static_cast<size_t>(cand)] == fitness[static_cast<size_t>(best)] &&
                         cand < best))
                        best = cand;
                }
                return best;
            };
            int pa = tournament_pick();
            int pb = tournament_pick();
            Genome child = rng.uniform01() < cfg.crossover_rate
                               ? crossover(pop[static_cast<size_t>(pa)],
                                           pop[static_cast<size_t>(pb)], index, cfg, rng)
                               : pop[static_cast<size_t>(pa)];
            child = mutate(std::move(child), index, econ, cfg, rng);
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        fitness = std::move(next_fitness);
        detail::evaluate_population(pop, fitness, next_dirty, index, econ, cfg.mining, coefficient,
                                    cfg.threads);
        record(gen, result.trace);
    }

    std::vector<int> order = ranking();
    int best_id = order.front();
    if (!std::isfinite(fitness[static_cast<size_t>(best_id)]))
        throw std::runtime_error("evolve: no feasible individual; horizon too short");
    result.best = pop[static_cast<size_t>(best_id)];
    result.fitness = fitness[static_cast<size_t>(best_id)];
    result.decoded = decode(result.best, index, econ, cfg.mining);
    return result;
}

}  // namespace mineplan
