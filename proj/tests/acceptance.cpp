// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Optionally run a subset: acceptance [--criterion N [M ...]]

#include <chrono>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "mineplan/cli.hpp"

using namespace mineplan;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median3(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[1];
}

// ---------------------------------------------------------------------------
// Shared GA runs on the two-pit test model (criteria 5 and 6)
// ---------------------------------------------------------------------------

struct RunOutcome {
    double sv = 0;
    double mean_npv = 0;
    bool east_ore_first = false;  // all stage-1 ore extracted before any stage-2 ore
    bool interleaved = false;     // some period mills parcels from both stages
    int periods = 0;
    double seconds = 0;
};

struct TestModelRuns {
    std::vector<RunOutcome> baseline;    // fitness = npv
    std::vector<RunOutcome> discounted;  // fitness = discounted, alpha = 0.99
    bool ready = false;
};

RunOutcome run_test_model(const ReserveIndex& index, const EconomicConfig& econ,
                          std::uint64_t seed, bool discounted) {
    auto t0 = Clock::now();
    GaConfig cfg;
    cfg.population = 100;
    cfg.generations = 600;
    cfg.seed = seed;
    cfg.fitness = discounted ? FitnessMode::discounted : FitnessMode::npv;
    cfg.mining = MiningMode::ore_first;
    cfg.threads = 2;
    RiskParams risk;
    risk.mode = RiskMode::normal;
    risk.alpha = 0.99;
    risk.window = 3;
    risk.spawner_mix = discounted ? 0.5 : 0.0;

    EvolveResult res = evolve(index, econ, risk, cfg);
    const Schedule& sched = res.decoded.schedule;
    const std::vector<Parcel>& parcels = res.decoded.parcels;

    RunOutcome out;
    out.seconds = seconds_since(t0);
    out.periods = sched.periods;
    out.sv = schedule_sv(sched, parcels, econ);
    double npv_sum = 0;
    for (int e = 0; e < index.model().n_members; ++e)
        npv_sum += schedule_npv(sched, parcels, econ, e);
    out.mean_npv = npv_sum / index.model().n_members;

    int last_s1 = -1, first_s2 = std::numeric_limits<int>::max();
    std::map<int, std::set<int>> stages_milled_in_period;
    for (size_t r = 0; r < sched.rows.size(); ++r) {
        const ScheduleRow& row = sched.rows[r];
        if (row.dest != Destination::mill) continue;
        int stage = index.units()[static_cast<size_t>(row.unit_id)].stage;
        if (stage == 1) last_s1 = std::max(last_s1, static_cast<int>(r));
        if (stage == 2) first_s2 = std::min(first_s2, static_cast<int>(r));
        stages_milled_in_period[row.period].insert(stage);
    }
    out.east_ore_first = last_s1 < first_s2;
    for (const auto& [period, stages] : stages_milled_in_period)
        if (stages.size() > 1) out.interleaved = true;
    return out;
}

TestModelRuns& shared_runs() {
    static TestModelRuns runs;
    if (!runs.ready) {
        BlockModel model = generate_test_model();
        ReserveIndex index(build_units(model), model);
        EconomicConfig econ = default_run_config().econ;
        for (std::uint64_t seed : {1, 2, 3}) {
            runs.baseline.push_back(run_test_model(index, econ, seed, false));
            runs.discounted.push_back(run_test_model(index, econ, seed, true));
        }
        runs.ready = true;
    }
    return runs;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

bool criterion_1_quantile_constants(std::ostream& log) {
    bool ok = true;
    auto near = [&](double got, double lo, double hi, const char* what) {
        bool pass = got >= lo - 0.01 && got <= hi + 0.01;
        log << what << "=" << got << (pass ? "" : " OUT OF RANGE") << "  ";
        ok = ok && pass;
    };
    near(f_alpha(0.60), 0.25, 0.25, "F_0.60");
    near(f_alpha(0.90), 1.28, 1.28, "F_0.90");
    near(f_alpha(0.99), 2.32, 2.33, "F_0.99");
    double c = c_alpha(0.9);
    bool c_ok = std::abs(c - 3.0) <= 1e-12;  // exact up to one ulp of binary 0.9
    log << "C_0.9=" << std::setprecision(17) << c << std::setprecision(6);
    ok = ok && c_ok;
    return ok;
}

bool criterion_2_oracle_equivalence(std::ostream& log) {
    const int instances = 100;
    const int samples = 100000;
    const double alpha = 0.9;
    int matches = 0;
    Rng rng(20240);
    for (int inst = 0; inst < instances; ++inst) {
        const int n = 6 + inst % 5;  // 6..10 items
        std::vector<double> mu(static_cast<size_t>(n)), sigma(static_cast<size_t>(n));
        std::vector<std::vector<double>> cov(static_cast<size_t>(n),
                                             std::vector<double>(static_cast<size_t>(n), 0.0));
        for (int i = 0; i < n; ++i) {
            mu[static_cast<size_t>(i)] = rng.uniform(-5.0, 15.0);
            sigma[static_cast<size_t>(i)] = rng.uniform(0.5, 3.0);
            cov[static_cast<size_t>(i)][static_cast<size_t>(i)] =
                sigma[static_cast<size_t>(i)] * sigma[static_cast<size_t>(i)];
        }
        // common random numbers across subsets: per-item sample vectors
        std::vector<std::vector<double>> item(static_cast<size_t>(n),
                                              std::vector<double>(samples));
        for (int i = 0; i < n; ++i)
            for (int s = 0; s < samples; ++s)
                item[static_cast<size_t>(i)][static_cast<size_t>(s)] =
                    rng.normal(mu[static_cast<size_t>(i)], sigma[static_cast<size_t>(i)]);

        std::vector<double> sums(samples, 0.0), scratch(samples);
        std::vector<int> x(static_cast<size_t>(n), 0);
        const size_t kq = static_cast<size_t>(std::floor(samples * (1.0 - alpha)));
        int best_fit_mask = 0, best_orc_mask = 0;
        double best_fit = 0.0, best_orc = 0.0;  // empty subset scores 0
        int gray = 0;
        for (int k = 1; k < (1 << n); ++k) {
            int next_gray = k ^ (k >> 1);
            int flip = gray ^ next_gray;
            int j = 0;
            while (!((flip >> j) & 1)) ++j;
            const bool adding = (next_gray >> j) & 1;
            const auto& col = item[static_cast<size_t>(j)];
            if (adding)
                for (int s = 0; s < samples; ++s) sums[static_cast<size_t>(s)] += col[static_cast<size_t>(s)];
            else
                for (int s = 0; s < samples; ++s) sums[static_cast<size_t>(s)] -= col[static_cast<size_t>(s)];
            gray = next_gray;
            for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = (gray >> i) & 1;

            double fit = knapsack_fitness(x, mu, cov, TheoryMode::normal, alpha);
            if (fit > best_fit) {
                best_fit = fit;
                best_fit_mask = gray;
            }
            scratch.assign(sums.begin(), sums.end());
            std::nth_element(scratch.begin(), scratch.begin() + static_cast<long>(kq),
                             scratch.end());
            double orc = scratch[kq];
            if (orc > best_orc) {
                best_orc = orc;
                best_orc_mask = gray;
            }
        }
        if (best_fit_mask == best_orc_mask) ++matches;
    }
    log << matches << "/" << instances << " argmax matches (need >= 95)";
    return matches >= 95;
}

bool criterion_3_guarantee_property(std::ostream& log) {
    const int selections = 20;
    const int samples = 100000;
    Rng rng(555);
    int coverage_ok = 0, cheb_ok = 0, cases = 0;
    double worst_dev = 0;
    for (int sel = 0; sel < selections; ++sel) {
        const int n = 3 + sel % 10;
        std::vector<double> mu(static_cast<size_t>(n)), sigma(static_cast<size_t>(n));
        std::vector<std::vector<double>> cov(static_cast<size_t>(n),
                                             std::vector<double>(static_cast<size_t>(n), 0.0));
        std::vector<int> x(static_cast<size_t>(n), 0);
        int chosen = 0;
        for (int i = 0; i < n; ++i) {
            mu[static_cast<size_t>(i)] = rng.uniform(-5.0, 15.0);
            sigma[static_cast<size_t>(i)] = rng.uniform(0.5, 3.0);
            cov[static_cast<size_t>(i)][static_cast<size_t>(i)] =
                sigma[static_cast<size_t>(i)] * sigma[static_cast<size_t>(i)];
            x[static_cast<size_t>(i)] = rng.uniform_int(0, 1);
            chosen += x[static_cast<size_t>(i)];
        }
        if (chosen == 0) x[0] = 1;
        for (double alpha : {0.6, 0.9, 0.99}) {
            ++cases;
            double f_norm = knapsack_fitness(x, mu, cov, TheoryMode::normal, alpha);
            double f_cheb = knapsack_fitness(x, mu, cov, TheoryMode::chebyshev, alpha);
            if (f_cheb <= f_norm + 1e-12) ++cheb_ok;
            int at_least = 0;
            for (int s = 0; s < samples; ++s) {
                double total = 0;
                for (int i = 0; i < n; ++i)
                    if (x[static_cast<size_t>(i)])
                        total += rng.normal(mu[static_cast<size_t>(i)], sigma[static_cast<size_t>(i)]);
                if (total >= f_norm) ++at_least;
            }
            double p = static_cast<double>(at_least) / samples;
            worst_dev = std::max(worst_dev, std::abs(p - alpha));
            if (p >= alpha - 0.02 && p <= alpha + 0.02) ++coverage_ok;
        }
    }
    log << coverage_ok << "/" << cases << " coverages in [alpha-0.02, alpha+0.02], worst |dev|="
        << worst_dev << ", " << cheb_ok << "/" << cases << " f_Cheb <= f_Norm";
    return coverage_ok == cases && cheb_ok == cases;
}

bool criterion_4_statistics_identities(std::ostream& log) {
    Rng rng(31337);
    double worst = 0;
    auto rel = [](double a, double b) {
        double scale = std::max({std::abs(a), std::abs(b), 1e-30});
        return std::abs(a - b) / scale;
    };
    for (int trial = 0; trial < 50; ++trial) {
        int members = rng.uniform_int(2, 10);
        int n_parcels = rng.uniform_int(2, 8);
        EconomicConfig econ = testutil::simple_econ(rng.uniform(500.0, 2000.0), 1e12,
                                                    rng.uniform(0.0, 5.0), rng.uniform(0.0, 2.0));
        std::vector<testutil::TinyBlock> blocks;
        for (int p = 0; p < n_parcels; ++p) {
            testutil::TinyBlock b;
            b.z = p;  // one unit per parcel
            b.mass = rng.uniform(100.0, 3000.0);
            for (int e = 0; e < members; ++e) b.grades.push_back(rng.uniform01() * 0.01);
            blocks.push_back(b);
        }
        BlockModel m = testutil::make_model(members, blocks);
        auto units = build_units(m);
        std::vector<Parcel> parcels;
        for (const auto& u : units)
            for (auto& p : build_parcels(u, CutoffSet{}, m)) parcels.push_back(std::move(p));

        // mu / sigma^2 / Cov against brute-force 1/|E| definitions
        std::vector<ParcelProfitStats> stats;
        for (const auto& p : parcels) stats.push_back(parcel_profit_stats(p, 1, econ));
        for (size_t i = 0; i < parcels.size(); ++i) {
            std::vector<double> profits;
            for (int e = 0; e < members; ++e) {
                double g = parcels[i].grade_per_member[static_cast<size_t>(e)];
                double mbt = parcels[i].mass;
                profits.push_back(mbt * g * 1.0 * (econ.price.at(1) - econ.selling_cost) -
                                  mbt * econ.processing_cost.at(1) - mbt * econ.mining_cost.at(1));
            }
            worst = std::max(worst, rel(stats[i].mean, testutil::bf_mean(profits)));
            worst = std::max(worst, rel(stats[i].variance, testutil::bf_variance(profits)));
            for (size_t j = i + 1; j < parcels.size(); ++j)
                worst = std::max(worst, rel(pair_covariance(stats[i], stats[j]),
                                            testutil::bf_covariance(stats[i].profits,
                                                                    stats[j].profits)));
        }

        // random schedule: SV(B) = sum_t SV(X_t), and sum UR = F*SV per period
        Schedule sched;
        int periods = rng.uniform_int(1, 4);
        std::vector<std::vector<ParcelProfitStats>> per_period(static_cast<size_t>(periods) + 1);
        for (size_t p = 0; p < parcels.size(); ++p) {
            int t = rng.uniform_int(1, periods);
            sched.rows.push_back({parcels[p].unit_id, static_cast<int>(p), t, Destination::mill,
                                  parcels[p].mass});
            per_period[static_cast<size_t>(t)].push_back(parcel_profit_stats(parcels[p], t, econ));
        }
        sched.periods = periods;
        double sv_total = 0;
        const double F = f_alpha(0.9);
        for (int t = 1; t <= periods; ++t) {
            const auto& x = per_period[static_cast<size_t>(t)];
            double sv = standard_variance(x);
            sv_total += sv;
            if (!x.empty()) {
                double ur = uncertainty_risk(x, F);
                worst = std::max(worst, rel(ur * static_cast<double>(x.size()), F * sv));
            }
        }
        worst = std::max(worst, rel(schedule_sv(sched, parcels, econ), sv_total));
    }

    // clamp: anti-correlated pair with negative total covariance
    {
        ParcelProfitStats a, b;
        a.profits = {10.0, -10.0};
        a.variance = 100.0;
        b.profits = {-6.0, 6.0};
        b.variance = 36.0;
        std::vector<ParcelProfitStats> x{a, b};
        worst = std::max(worst, rel(standard_variance(x), std::sqrt(136.0)));
    }
    log << "worst relative error " << worst << " (need <= 1e-12)";
    return worst <= 1e-12;
}

bool criterion_5_directional_reproduction(std::ostream& log) {
    TestModelRuns& runs = shared_runs();
    std::vector<double> sv_b, sv_d, npv_b, npv_d;
    double max_seconds = 0;
    for (int i = 0; i < 3; ++i) {
        sv_b.push_back(runs.baseline[static_cast<size_t>(i)].sv);
        sv_d.push_back(runs.discounted[static_cast<size_t>(i)].sv);
        npv_b.push_back(runs.baseline[static_cast<size_t>(i)].mean_npv);
        npv_d.push_back(runs.discounted[static_cast<size_t>(i)].mean_npv);
        max_seconds = std::max({max_seconds, runs.baseline[static_cast<size_t>(i)].seconds,
                                runs.discounted[static_cast<size_t>(i)].seconds});
    }
    double msv_b = median3(sv_b), msv_d = median3(sv_d);
    double mnpv_b = median3(npv_b), mnpv_d = median3(npv_d);
    log << std::fixed << std::setprecision(2) << "median SV baseline=" << msv_b / 1e6
        << "M vs discounted=" << msv_d / 1e6 << "M; median NPV baseline=" << mnpv_b / 1e6
        << "M vs discounted=" << mnpv_d / 1e6 << "M; slowest run " << max_seconds << "s"
        << std::defaultfloat << std::setprecision(6);
    return msv_d < msv_b && mnpv_d <= mnpv_b && max_seconds < 600.0;
}

bool criterion_6_interleaving(std::ostream& log) {
    TestModelRuns& runs = shared_runs();
    int east_first = 0, interleaved = 0;
    for (int i = 0; i < 3; ++i) {
        if (runs.baseline[static_cast<size_t>(i)].east_ore_first) ++east_first;
        if (runs.discounted[static_cast<size_t>(i)].interleaved) ++interleaved;
    }
    log << "baseline east-ore-first in " << east_first << "/3 seeds, discounted interleaved in "
        << interleaved << "/3 seeds (need >= 2 each)";
    return east_first >= 2 && interleaved >= 2;
}

bool criterion_7_ga_sanity(std::ostream& log) {
    // 6 units: 2 stages x 3 benches; marginal material sits far below the
    // breakeven cutoff so routing is stable across the cutoff grid
    std::vector<testutil::TinyBlock> blocks;
    auto add = [&](int stage, int z, double mean) {
        testutil::TinyBlock b;
        b.x = stage * 8;
        b.z = z;
        b.stage = stage;
        b.mass = 1000.0;
        b.grades = {mean * 0.9, mean * 1.1};
        blocks.push_back(b);
        testutil::TinyBlock lean = b;
        lean.x += 1;
        lean.grades = {0.0001, 0.0001};
        blocks.push_back(lean);
    };
    add(1, 2, 0.007);
    add(1, 1, 0.006);
    add(1, 0, 0.005);
    add(2, 2, 0.004);
    add(2, 1, 0.0035);
    add(2, 0, 0.003);
    BlockModel m = testutil::make_model(2, blocks);
    ReserveIndex index(build_units(m), m);
    EconomicConfig econ = testutil::simple_econ(1000.0, 1200.0, 1.0, 0.2, 0.1);
    econ.max_periods = 20;

    auto t0 = Clock::now();
    double brute = testutil::brute_force_best_npv(
        index, econ, {0.0005, 0.0015, 0.0025, 0.0035, 0.0045});

    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GaConfig cfg;
        cfg.population = 30;
        cfg.generations = 80;
        cfg.seed = seed;
        RiskParams risk;
        EvolveResult res = evolve(index, econ, risk, cfg);
        if (res.fitness >= brute * 0.99 - 1e-9) ++hits;
    }
    log << hits << "/10 seeds within 1% of the exhaustive optimum (" << brute << "), "
        << seconds_since(t0) << "s";
    return hits >= 9 && seconds_since(t0) < 60.0;
}

bool criterion_8_decode_feasibility(std::ostream& log) {
    BlockModel model = generate_test_model();
    ReserveIndex index(build_units(model), model);
    EconomicConfig econ = default_run_config().econ;
    GaConfig cfg;
    RiskParams risk;
    risk.mode = RiskMode::normal;
    risk.alpha = 0.99;

    double total_mass = 0;
    for (size_t u = 0; u < index.size(); ++u)
        total_mass += index.unit(static_cast<int>(u)).total_mass();

    int checked = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        Rng rng(derive_seed(31, 0, i));
        Genome g = (i % 2 == 0) ? spawn_value_biased(index, econ, cfg, rng)
                                : spawn_uncertainty_blend(index, econ, risk, cfg, rng);
        if (!precedence_ok(g.sequence, index.units(), cfg.precedence)) {
            log << "genome " << i << " violates precedence";
            return false;
        }
        MiningMode mode = (i % 4 < 2) ? MiningMode::ore_first : MiningMode::simultaneous;
        DecodedSchedule dec = decode(g, index, econ, mode);
        for (int t = 1; t <= dec.schedule.periods; ++t) {
            if (dec.schedule.totals[static_cast<size_t>(t)].milled >
                econ.mill_capacity * (1.0 + 1e-12)) {
                log << "genome " << i << " exceeds mill capacity in period " << t;
                return false;
            }
            if (econ.mining_capacity && dec.schedule.totals[static_cast<size_t>(t)].mined >
                                            *econ.mining_capacity * (1.0 + 1e-12)) {
                log << "genome " << i << " exceeds mining capacity in period " << t;
                return false;
            }
        }
        std::vector<double> parcel_mass(dec.parcels.size(), 0.0);
        for (const auto& row : dec.schedule.rows)
            parcel_mass[static_cast<size_t>(row.parcel_id)] += row.mass;
        double covered = 0;
        for (size_t p = 0; p < dec.parcels.size(); ++p) {
            double ref = dec.parcels[p].mass;
            if (std::abs(parcel_mass[p] - ref) > 1e-9 * std::max(1.0, ref)) {
                log << "genome " << i << " parcel " << p << " mass drift";
                return false;
            }
            covered += parcel_mass[p];
        }
        if (std::abs(covered - total_mass) > 1e-9 * total_mass) {
            log << "genome " << i << " does not cover every block exactly once";
            return false;
        }
        ++checked;
    }
    log << checked << "/1000 random genomes decode feasibly under both mining modes";
    return checked == 1000;
}

bool criterion_9_reductions(std::ostream& log) {
    // (a) coefficient 0: discounted fitness mode equals the npv fitness mode
    std::vector<testutil::TinyBlock> blocks;
    Rng mk(9);
    for (int stage = 1; stage <= 2; ++stage)
        for (int z = 0; z < 3; ++z) {
            testutil::TinyBlock b;
            b.x = stage * 5;
            b.z = z;
            b.stage = stage;
            b.mass = mk.uniform(500.0, 2000.0);
            b.grades = {mk.uniform01() * 0.01, mk.uniform01() * 0.01, mk.uniform01() * 0.01};
            blocks.push_back(b);
        }
    BlockModel m = testutil::make_model(3, blocks);
    ReserveIndex index(build_units(m), m);
    EconomicConfig econ = testutil::simple_econ(1000.0, 2000.0, 1.0, 0.3, 0.1);
    econ.max_periods = 20;

    GaConfig cfg;
    cfg.population = 16;
    cfg.generations = 25;
    cfg.seed = 17;
    RiskParams zero;
    zero.mode = RiskMode::fixed;
    zero.coefficient = 0.0;

    cfg.fitness = FitnessMode::npv;
    EvolveResult res_npv = evolve(index, econ, zero, cfg);
    cfg.fitness = FitnessMode::discounted;
    EvolveResult res_disc = evolve(index, econ, zero, cfg);
    bool traces_equal = res_npv.trace.size() == res_disc.trace.size();
    for (size_t i = 0; traces_equal && i < res_npv.trace.size(); ++i)
        traces_equal = res_npv.trace[i].best == res_disc.trace[i].best &&
                       res_npv.trace[i].mean == res_disc.trace[i].mean;

    // and the fitness value itself reduces to the ensemble-mean NPV
    double max_rel = 0;
    {
        Rng rng(4);
        Genome g = spawn_value_biased(index, econ, cfg, rng);
        DecodedSchedule dec = decode(g, index, econ, MiningMode::ore_first);
        double disc0 = discounted_fitness(dec.schedule, dec.parcels, econ, 0.0);
        double npv_mean = schedule_npv_mean(dec.schedule, dec.parcels, econ);
        max_rel = std::abs(disc0 - npv_mean) / std::max(1.0, std::abs(npv_mean));
    }

    // (b) zero-variance ensemble: identical member rows, all stds zero
    std::vector<testutil::TinyBlock> zb;
    for (int z = 0; z < 3; ++z) {
        testutil::TinyBlock b;
        b.z = z;
        b.mass = 1000.0 + 100.0 * z;
        b.grades = {0.005, 0.005, 0.005, 0.005};
        zb.push_back(b);
    }
    BlockModel zm = testutil::make_model(4, zb);
    ReserveIndex zindex(build_units(zm), zm);
    Genome g;
    g.sequence = {0, 1, 2};
    g.cutoffs.set(Destination::mill, 1, {0.001});
    EconomicConfig zecon = testutil::simple_econ(1000.0, 1500.0, 1.0, 0.3, 0.1);
    DecodedSchedule dec = decode(g, zindex, zecon, MiningMode::ore_first);
    auto matrix = evaluate_schedule(dec.schedule, dec.parcels, zecon, 4);
    bool rows_identical = true;
    for (size_t e = 1; e < matrix.size(); ++e) rows_identical = rows_identical && matrix[e] == matrix[0];
    EnsembleReport report = period_stats(matrix);
    bool stds_zero = true;
    for (const auto& row : report.rows) stds_zero = stds_zero && row.stddev == 0.0;

    log << "traces " << (traces_equal ? "identical" : "DIFFER") << ", |disc0-npv| rel=" << max_rel
        << ", zero-variance rows " << (rows_identical ? "identical" : "DIFFER") << ", stds "
        << (stds_zero ? "all zero" : "NONZERO");
    return traces_equal && max_rel <= 1e-12 && rows_identical && stds_zero;
}

bool criterion_10_reproducibility(std::ostream& log) {
    auto dir = std::filesystem::temp_directory_path() / "mineplan_acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    TestModelParams params;
    params.box_nx = 8;
    params.box_ny = 8;
    params.box_nz = 2;
    params.waste_layer_benches = 1;
    params.members = 5;
    BlockModel model = generate_test_model(params);
    std::string model_path = (dir / "model.csv").string();
    save_block_model(model, model_path);

    RunConfig cfg = default_run_config();
    cfg.econ.mill_capacity = 2.5e5;
    cfg.econ.mining_capacity = 1.2e6;
    cfg.econ.max_periods = 30;
    cfg.ga.population = 40;
    cfg.ga.generations = 60;
    cfg.ga.seed = 7;
    cfg.ga.fitness = FitnessMode::discounted;
    cfg.ga.threads = 2;  // reproducibility must not depend on worker count

    auto read_bytes = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    auto a = run_optimize(model_path, cfg, (dir / "a").string());
    auto b = run_optimize(model_path, cfg, (dir / "b").string());
    bool sched_equal = read_bytes(a.schedule_path) == read_bytes(b.schedule_path);
    bool trace_equal = read_bytes(a.trace_path) == read_bytes(b.trace_path);
    log << "schedule.json " << (sched_equal ? "byte-identical" : "DIFFERS") << ", trace.csv "
        << (trace_equal ? "byte-identical" : "DIFFERS");
    return sched_equal && trace_equal;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0) continue;
        only.insert(std::atoi(argv[i]));
    }

    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::ostream&)> run;
    };
    std::vector<Criterion> criteria{
        {1, "quantile constants", criterion_1_quantile_constants},
        {2, "chance-constraint oracle equivalence", criterion_2_oracle_equivalence},
        {3, "guarantee property", criterion_3_guarantee_property},
        {4, "statistics identities", criterion_4_statistics_identities},
        {5, "directional test-model reproduction", criterion_5_directional_reproduction},
        {6, "interleaving behavior", criterion_6_interleaving},
        {7, "GA sanity oracle", criterion_7_ga_sanity},
        {8, "decode feasibility suite", criterion_8_decode_feasibility},
        {9, "reductions", criterion_9_reductions},
        {10, "reproducibility", criterion_10_reproducibility},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && only.find(c.id) == only.end()) continue;
        std::ostringstream detail;
        bool pass = false;
        auto t0 = Clock::now();
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << std::setw(2) << c.id << ". " << c.name
                  << " (" << std::fixed << std::setprecision(1) << seconds_since(t0) << "s)"
                  << std::defaultfloat << " -- " << detail.str() << "\n"
                  << std::flush;
        if (!pass) ++failures;
    }
    if (failures == 0)
        std::cout << "all acceptance criteria passed\n";
    else
        std::cout << failures << " acceptance criteria FAILED\n";
    return failures;
}
