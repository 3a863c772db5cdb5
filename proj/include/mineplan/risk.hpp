#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

#include "mineplan/econ.hpp"
#include "mineplan/numeric.hpp"
#include "mineplan/rng.hpp"

namespace mineplan {

enum class RiskMode { none, normal, chebyshev, fixed };

inline RiskMode risk_mode_from_string(const std::string& s) {
    if (s == "none") return RiskMode::none;
    if (s == "normal") return RiskMode::normal;
    if (s == "chebyshev") return RiskMode::chebyshev;
    if (s == "fixed") return RiskMode::fixed;
    throw std::invalid_argument("unknown risk mode: " + s);
}

inline const char* to_string(RiskMode m) {
    switch (m) {
        case RiskMode::none: return "none";
        case RiskMode::normal: return "normal";
        case RiskMode::chebyshev: return "chebyshev";
        case RiskMode::fixed: return "fixed";
    }
    return "none";
}

// F_alpha: the alpha-fractional point of the standard normal distribution.
inline double f_alpha(double alpha) {
    if (!(alpha >= 0.5 && alpha < 1.0))
        throw std::domain_error("f_alpha: alpha must be in [0.5, 1)");
    return inverse_normal_cdf(alpha);
}

// C_alpha = sqrt(alpha / (1 - alpha)), from the one-sided Chebyshev bound.
inline double c_alpha(double alpha) {
    if (!(alpha >= 0.5 && alpha < 1.0))
        throw std::domain_error("c_alpha: alpha must be in [0.5, 1)");
    return std::sqrt(alpha / (1.0 - alpha));
}

struct RiskParams {
    RiskMode mode = RiskMode::normal;
    double alpha = 0.99;
    double coefficient = 0.0;  // user K when mode == fixed
    int window = 3;            // spawner window w
    double spawner_mix = 0.5;  // fraction of blend-spawned individuals

    void validate() const {
        if (mode != RiskMode::none && !(alpha >= 0.5 && alpha < 1.0))
            throw std::invalid_argument("risk: alpha must be in [0.5, 1)");
        if (coefficient < 0.0) throw std::invalid_argument("risk: coefficient must be >= 0");
        if (window < 1) throw std::invalid_argument("risk: window must be >= 1");
        if (!(spawner_mix >= 0.0 && spawner_mix <= 1.0))
            throw std::invalid_argument("risk: spawner_mix must be in [0,1]");
    }

    double resolve_coefficient() const {
        switch (mode) {
            case RiskMode::none: return 0.0;
            case RiskMode::normal: return f_alpha(alpha);
            case RiskMode::chebyshev: return c_alpha(alpha);
            case RiskMode::fixed: return coefficient;
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// Ensemble profit statistics (population convention, 1/|E|)
// ---------------------------------------------------------------------------

struct ParcelProfitStats {
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> profits;  // p(b,t,e), length |E|
};

// Member-wise profits of a milled parcel with an explicit tonnage (split
// parcels carry their in-period mass).
inline ParcelProfitStats parcel_profit_stats(const Parcel& parcel, double mass, int period,
                                             const EconomicConfig& econ) {
    ParcelProfitStats s;
    const double r = econ.recovery_for(parcel.domain);
    s.profits.resize(parcel.grade_per_member.size());
    for (size_t e = 0; e < parcel.grade_per_member.size(); ++e)
        s.profits[e] = processed_profit(mass, parcel.grade_per_member[e], r, period, econ);
    s.mean = mean_of(s.profits);
    s.variance = population_variance(s.profits);
    return s;
}

inline ParcelProfitStats parcel_profit_stats(const Parcel& parcel, int period,
                                             const EconomicConfig& econ) {
    return parcel_profit_stats(parcel, parcel.mass, period, econ);
}

inline double pair_covariance(const ParcelProfitStats& a, const ParcelProfitStats& b) {
    if (a.profits.size() != b.profits.size())
        throw std::invalid_argument("pair_covariance: member count mismatch");
    return population_covariance(a.profits, b.profits);
}

// SV(X,t) = sqrt(Var + max(0, Cov)) with Var the summed parcel variances and
// Cov the summed distinct-pair covariances (each unordered pair twice).
// Var + Cov equals the variance of the summed profit vector, so the clamp
// reduces to sqrt(max(Var, variance-of-sum)).
inline double standard_variance(std::span<const ParcelProfitStats> milled) {
    if (milled.empty()) return 0.0;  // no milled material, no profit uncertainty
    const size_t members = milled.front().profits.size();
    std::vector<double> sum(members, 0.0);
    double var = 0.0;
    for (const ParcelProfitStats& s : milled) {
        if (s.profits.size() != members)
            throw std::invalid_argument("standard_variance: member count mismatch");
        var += s.variance;
        for (size_t e = 0; e < members; ++e) sum[e] += s.profits[e];
    }
    double var_of_sum = population_variance(sum);
    return std::sqrt(std::max(var, var_of_sum));
}

// UR(X,t) = F/|X| * SV(X,t), identical for every parcel in X.
inline double uncertainty_risk(std::span<const ParcelProfitStats> milled, double coefficient) {
    if (milled.empty()) return 0.0;
    return coefficient / static_cast<double>(milled.size()) * standard_variance(milled);
}

// ---------------------------------------------------------------------------
// Per-(parcel, period) profit vector cache
//
// Profit is linear in tonnage, so the cache stores per-tonne vectors and
// scales them to row masses. When every economic series is scalar the period
// key collapses and split rows across periods share one entry.
// ---------------------------------------------------------------------------

class ProfitStatsCache {
public:
    ProfitStatsCache(const std::vector<Parcel>& parcels, const EconomicConfig& econ)
        : parcels_(&parcels), econ_(&econ),
          period_sensitive_(!econ.price.is_scalar() || !econ.processing_cost.is_scalar() ||
                            !econ.mining_cost.is_scalar()) {}

    const ParcelProfitStats& per_tonne(int parcel_id, int period) {
        const int t = period_sensitive_ ? period : 1;
        const std::uint64_t key =
            (static_cast<std::uint64_t>(parcel_id) << 20) | static_cast<std::uint64_t>(t);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_
                     .emplace(key, parcel_profit_stats((*parcels_)[static_cast<size_t>(parcel_id)],
                                                       1.0, t, *econ_))
                     .first;
        }
        return it->second;
    }

    ParcelProfitStats scaled(int parcel_id, int period, double mass) {
        const ParcelProfitStats& unit = per_tonne(parcel_id, period);
        ParcelProfitStats s;
        s.mean = unit.mean * mass;
        s.variance = unit.variance * mass * mass;
        s.profits.resize(unit.profits.size());
        for (size_t e = 0; e < unit.profits.size(); ++e) s.profits[e] = unit.profits[e] * mass;
        return s;
    }

private:
    const std::vector<Parcel>* parcels_;
    const EconomicConfig* econ_;
    bool period_sensitive_;
    std::unordered_map<std::uint64_t, ParcelProfitStats> cache_;
};

namespace detail {

struct PeriodRiskTotals {
    std::vector<double> member_sum;  // summed milled profit per member
    double var_sum = 0.0;            // summed parcel variances
    double mean_sum = 0.0;           // summed milled profit means
    double waste_sum = 0.0;          // deterministic waste profits
    int milled_count = 0;

    double sv() const {
        if (milled_count == 0) return 0.0;
        return std::sqrt(std::max(var_sum, population_variance(member_sum)));
    }
};

inline std::vector<PeriodRiskTotals> accumulate_periods(const Schedule& schedule,
                                                        const std::vector<Parcel>& parcels,
                                                        const EconomicConfig& econ) {
    if (schedule.periods > econ.max_periods)
        throw std::out_of_range("schedule spans " + std::to_string(schedule.periods) +
                                " periods, beyond T=" + std::to_string(econ.max_periods));
    const size_t members =
        parcels.empty() ? 0 : parcels.front().grade_per_member.size();
    std::vector<PeriodRiskTotals> per_period(static_cast<size_t>(schedule.periods) + 1);
    for (auto& p : per_period) p.member_sum.assign(members, 0.0);
    ProfitStatsCache cache(parcels, econ);
    for (const ScheduleRow& row : schedule.rows) {
        if (row.period < 1 || row.period > schedule.periods)
            throw std::out_of_range("schedule row period out of range");
        PeriodRiskTotals& t = per_period[static_cast<size_t>(row.period)];
        if (row.dest == Destination::mill) {
            const ParcelProfitStats& unit = cache.per_tonne(row.parcel_id, row.period);
            t.mean_sum += unit.mean * row.mass;
            t.var_sum += unit.variance * row.mass * row.mass;
            for (size_t e = 0; e < members; ++e) t.member_sum[e] += unit.profits[e] * row.mass;
            t.milled_count += 1;
        } else {
            t.waste_sum += waste_profit(row.mass, row.period, econ);
        }
    }
    return per_period;
}

}  // namespace detail

// Total Standard Variance of a schedule: sum of per-period SV(X,t).
inline double schedule_sv(const Schedule& schedule, const std::vector<Parcel>& parcels,
                          const EconomicConfig& econ) {
    auto per_period = detail::accumulate_periods(schedule, parcels, econ);
    double total = 0;
    for (int t = 1; t <= schedule.periods; ++t) total += per_period[static_cast<size_t>(t)].sv();
    return total;
}

// f(B) = sum over (b,t) of p*(b,t) / (1+D)^t, where milled parcels carry
// p* = mu(b,t) - UR(X_t,t) and waste parcels their deterministic profit.
// coefficient == 0 reduces to the NPV fitness on ensemble-mean profits.
inline double discounted_fitness(const Schedule& schedule, const std::vector<Parcel>& parcels,
                                 const EconomicConfig& econ, double coefficient) {
    auto per_period = detail::accumulate_periods(schedule, parcels, econ);
    double fitness = 0;
    for (int t = 1; t <= schedule.periods; ++t) {
        const auto& tot = per_period[static_cast<size_t>(t)];
        double p_star = tot.mean_sum + tot.waste_sum - coefficient * tot.sv();
        fitness += discount(p_star, t, econ.discount_rate);
    }
    return fitness;
}

// ---------------------------------------------------------------------------
// Theory fitness functions and their Monte-Carlo oracle
// ---------------------------------------------------------------------------

enum class TheoryMode { normal, chebyshev };

// f(x) = E(x) - K_alpha * sqrt(Var[x]) with the full covariance expansion.
inline double knapsack_fitness(std::span<const int> x, std::span<const double> mu,
                               const std::vector<std::vector<double>>& cov, TheoryMode mode,
                               double alpha) {
    const size_t n = mu.size();
    if (x.size() != n || cov.size() != n)
        throw std::invalid_argument("knapsack_fitness: dimension mismatch");
    for (const auto& row : cov)
        if (row.size() != n) throw std::invalid_argument("knapsack_fitness: dimension mismatch");
    double expected = 0, variance = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!x[i]) continue;
        expected += mu[i];
        variance += cov[i][i];
        for (size_t j = i + 1; j < n; ++j)
            if (x[j]) variance += 2.0 * cov[i][j];
    }
    double k = mode == TheoryMode::normal ? f_alpha(alpha) : c_alpha(alpha);
    return expected - k * std::sqrt(std::max(0.0, variance));
}

// Empirical largest P with Pr(p(x) >= P) >= alpha for independent normal
// profits: the alpha-lower-quantile of sampled totals.
inline double chance_constraint_oracle(std::span<const int> x, std::span<const double> mu,
                                       std::span<const double> sigma, double alpha, int samples,
                                       Rng& rng) {
    const size_t n = mu.size();
    if (x.size() != n || sigma.size() != n)
        throw std::invalid_argument("chance_constraint_oracle: dimension mismatch");
    if (samples < 10000)
        throw std::invalid_argument("chance_constraint_oracle: need at least 10^4 samples");
    if (!(alpha >= 0.5 && alpha < 1.0))
        throw std::domain_error("chance_constraint_oracle: alpha must be in [0.5, 1)");
    std::vector<double> totals(static_cast<size_t>(samples));
    for (auto& total : totals) {
        double s = 0;
        for (size_t i = 0; i < n; ++i)
            if (x[i]) s += sigma[i] > 0 ? rng.normal(mu[i], sigma[i]) : mu[i];
        total = s;
    }
    size_t k = static_cast<size_t>(std::floor(static_cast<double>(samples) * (1.0 - alpha)));
    k = std::min(k, totals.size() - 1);
    std::nth_element(totals.begin(), totals.begin() + static_cast<long>(k), totals.end());
    return totals[k];
}

}  // namespace mineplan
