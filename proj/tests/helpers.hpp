#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here recomputes results from first principles so library code paths are
// checked against a second route.

#include <cmath>
#include <numbers>
#include <vector>

#include "mineplan/cli.hpp"

namespace testutil {

inline bool near_abs(double got, double expect, double tol) {
    return std::abs(got - expect) <= tol;
}

// ---------------------------------------------------------------------------
// Normal CDF by Taylor series (no erf/erfc), and its bisection inverse.
// Phi(x) = 1/2 + pdf(x) * sum_{k>=0} x^(2k+1) / (1*3*5*...*(2k+1))
// ---------------------------------------------------------------------------

inline double series_normal_cdf(double x) {
    if (x < -12.0) return 0.0;
    if (x > 12.0) return 1.0;
    double term = x;
    double sum = x;
    for (int k = 1; k < 400; ++k) {
        term *= x * x / (2.0 * k + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return 0.5 + pdf * sum;
}

inline double bisect_inverse_normal_cdf(double p) {
    double lo = -12.0, hi = 12.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (series_normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Brute-force ensemble statistics (population convention)
// ---------------------------------------------------------------------------

inline double bf_mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double bf_variance(const std::vector<double>& v) {
    double m = bf_mean(v), s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

inline double bf_covariance(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = bf_mean(a), mb = bf_mean(b), s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size());
}

// SV per the definition: Var summed over parcels, Cov summed over ordered
// distinct pairs, clamped at zero before the square root.
inline double bf_standard_variance(const std::vector<mineplan::ParcelProfitStats>& stats) {
    if (stats.empty()) return 0.0;
    double var = 0, cov = 0;
    for (const auto& s : stats) var += bf_variance(s.profits);
    for (size_t i = 0; i < stats.size(); ++i)
        for (size_t j = 0; j < stats.size(); ++j)
            if (i != j) cov += bf_covariance(stats[i].profits, stats[j].profits);
    return std::sqrt(var + std::max(0.0, cov));
}

// ---------------------------------------------------------------------------
// Compact block-model builder for hand-made fixtures
// ---------------------------------------------------------------------------

struct TinyBlock {
    int x = 0, y = 0, z = 0;
    int domain = 1;
    int stage = 1;
    double mass = 1000.0;               // tonnes (density derived, 10m cubes)
    std::vector<double> grades;         // fraction, one per member
};

inline mineplan::BlockModel make_model(int members, const std::vector<TinyBlock>& blocks) {
    mineplan::BlockModel model;
    model.n_members = members;
    model.block_size = {10.0, 10.0, 10.0};
    int mx = 0, my = 0, mz = 0;
    for (const TinyBlock& tb : blocks) {
        mineplan::Block b;
        b.x = tb.x;
        b.y = tb.y;
        b.z = tb.z;
        b.domain = tb.domain;
        b.stage = tb.stage;
        b.density = tb.mass / 1000.0;
        model.blocks.push_back(b);
        for (int e = 0; e < members; ++e)
            model.grades.push_back(tb.grades.empty() ? 0.0 : tb.grades[static_cast<size_t>(e)]);
        mx = std::max(mx, tb.x);
        my = std::max(my, tb.y);
        mz = std::max(mz, tb.z);
    }
    model.dims = {mx + 1, my + 1, mz + 1};
    model.validate();
    return model;
}

// Economics where a milled tonne of grade g is worth g * metal_value and all
// costs are zero unless stated; keeps hand-computed expectations simple.
inline mineplan::EconomicConfig simple_econ(double metal_value = 1000.0, double mill_capacity = 1e9,
                                            double q = 0.0, double n = 0.0, double h = 0.0) {
    mineplan::EconomicConfig econ;
    econ.price = metal_value;
    econ.selling_cost = 0.0;
    econ.processing_cost = q;
    econ.mining_cost = n;
    econ.rehab_cost = h;
    econ.recovery_default = 1.0;
    econ.discount_rate = 0.08;
    econ.mill_capacity = mill_capacity;
    econ.max_periods = 50;
    return econ;
}

// All precedence-valid sequences under the concurrent policy: every
// interleaving of the per-stage top-down chains.
inline void enumerate_sequences_rec(std::map<int, std::vector<int>>& chains,
                                    std::map<int, size_t>& cursor, std::vector<int>& prefix,
                                    size_t total, std::vector<std::vector<int>>& out) {
    if (prefix.size() == total) {
        out.push_back(prefix);
        return;
    }
    for (auto& [stage, chain] : chains) {
        size_t& at = cursor[stage];
        if (at >= chain.size()) continue;
        prefix.push_back(chain[at]);
        ++at;
        enumerate_sequences_rec(chains, cursor, prefix, total, out);
        --at;
        prefix.pop_back();
    }
}

inline std::vector<std::vector<int>> all_valid_sequences(const mineplan::ReserveIndex& index) {
    std::map<int, std::vector<int>> chains;
    for (const auto& u : index.units()) chains[u.stage].push_back(u.id);
    for (auto& [stage, chain] : chains)
        std::sort(chain.begin(), chain.end(), [&](int a, int b) {
            return index.units()[static_cast<size_t>(a)].bench >
                   index.units()[static_cast<size_t>(b)].bench;
        });
    std::map<int, size_t> cursor;
    std::vector<int> prefix;
    std::vector<std::vector<int>> out;
    enumerate_sequences_rec(chains, cursor, prefix, index.size(), out);
    return out;
}

// Best NPV over all valid sequences and a grid of mill cutoffs (one shared
// cutoff applied to every ore domain).
inline double brute_force_best_npv(const mineplan::ReserveIndex& index,
                                   const mineplan::EconomicConfig& econ,
                                   const std::vector<double>& cutoff_grid,
                                   mineplan::MiningMode mode = mineplan::MiningMode::ore_first) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& seq : all_valid_sequences(index)) {
        for (double c : cutoff_grid) {
            mineplan::Genome g;
            g.sequence = seq;
            for (int domain : index.ore_domains())
                g.cutoffs.set(mineplan::Destination::mill, domain, {c});
            try {
                auto dec = mineplan::decode(g, index, econ, mode);
                best = std::max(best,
                                mineplan::discounted_fitness(dec.schedule, dec.parcels, econ, 0.0));
            } catch (const mineplan::HorizonError&) {
            }
        }
    }
    return best;
}

}  // namespace testutil
