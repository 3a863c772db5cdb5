#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "mineplan/reserve.hpp"

namespace mineplan {

// Per-period value with a scalar shorthand. 1-based periods; a short vector
// clamps to its last entry for later periods.
class PeriodSeries {
public:
    PeriodSeries() : values_{0.0} {}
    PeriodSeries(double scalar) : values_{scalar} {}
    explicit PeriodSeries(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) values_.push_back(0.0);
    }

    double at(int period) const {
        size_t i = period >= 1 ? static_cast<size_t>(period - 1) : 0;
        return values_[std::min(i, values_.size() - 1)];
    }

    bool is_scalar() const { return values_.size() == 1; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

struct EconomicConfig {
    PeriodSeries price{0.0};            // i(t), $/tonne metal
    double selling_cost = 0.0;          // c, $/tonne metal
    PeriodSeries processing_cost{0.0};  // q(t), $/tonne rock
    PeriodSeries mining_cost{0.0};      // n(t), $/tonne rock
    double rehab_cost = 0.0;            // h, $/tonne rock
    std::map<int, double> recovery;     // r per domain
    double recovery_default = 1.0;
    double discount_rate = 0.08;  // D, fraction per period
    double mill_capacity = 0.0;   // tonnes rock per period
    std::optional<double> mining_capacity;
    int max_periods = 24;  // T

    double recovery_for(int domain) const {
        auto it = recovery.find(domain);
        return it != recovery.end() ? it->second : recovery_default;
    }

    void validate() const {
        if (discount_rate < 0.0) throw std::invalid_argument("econ: discount_rate must be >= 0");
        if (mill_capacity <= 0.0) throw std::invalid_argument("econ: mill_capacity must be > 0");
        if (mining_capacity && *mining_capacity <= 0.0)
            throw std::invalid_argument("econ: mining_capacity must be > 0");
        if (max_periods < 1) throw std::invalid_argument("econ: max_periods must be >= 1");
        if (rehab_cost < 0.0 || selling_cost < 0.0)
            throw std::invalid_argument("econ: costs must be >= 0");
        auto check_series = [](const PeriodSeries& s, const char* what) {
            for (double v : s.values())
                if (v < 0.0) throw std::invalid_argument(std::string("econ: ") + what + " must be >= 0");
        };
        check_series(price, "price");
        check_series(processing_cost, "processing_cost");
        check_series(mining_cost, "mining_cost");
        for (const auto& [domain, r] : recovery)
            if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("econ: recovery must be in [0,1]");
        if (!(recovery_default >= 0.0 && recovery_default <= 1.0))
            throw std::invalid_argument("econ: recovery must be in [0,1]");
    }

    // g* = (q+n) / (r (i - c)): the grade at which processing breaks even.
    double breakeven_cutoff(int domain, int period = 1) const {
        double r = recovery_for(domain);
        double margin = r * (price.at(period) - selling_cost);
        if (margin <= 0.0) return std::numeric_limits<double>::infinity();
        return (processing_cost.at(period) + mining_cost.at(period)) / margin;
    }
};

// l = m * g * r
inline double saleable_metal(double mass, double grade, double recovery) {
    return mass * grade * recovery;
}

// v = l (i - c) - m q;  p = v - m n
inline double processed_profit(double mass, double grade, double recovery, int period,
                               const EconomicConfig& econ) {
    double l = saleable_metal(mass, grade, recovery);
    double v = l * (econ.price.at(period) - econ.selling_cost) - mass * econ.processing_cost.at(period);
    return v - mass * econ.mining_cost.at(period);
}

// p = -m (n + h)
inline double waste_profit(double mass, int period, const EconomicConfig& econ) {
    return -mass * (econ.mining_cost.at(period) + econ.rehab_cost);
}

inline double discount(double value, int period, double rate) {
    return value / std::pow(1.0 + rate, period);
}

// ---------------------------------------------------------------------------
// Schedule: parcels attributed to periods and destinations
// ---------------------------------------------------------------------------

struct ScheduleRow {
    int unit_id = 0;
    int parcel_id = 0;  // index into the decoded parcel list
    int period = 0;     // 1-based
    Destination dest = Destination::waste;
    double mass = 0.0;  // tonnes; may be a proportional split of the parcel
};

struct PeriodTotals {
    double milled = 0.0;
    double mined = 0.0;
    int milled_parcels = 0;
};

struct Schedule {
    std::vector<ScheduleRow> rows;     // decode walk order
    std::vector<PeriodTotals> totals;  // index 1..periods
    int periods = 0;
};

inline double row_profit(const ScheduleRow& row, const Parcel& parcel, double grade,
                         const EconomicConfig& econ) {
    if (row.dest == Destination::mill)
        return processed_profit(row.mass, grade, econ.recovery_for(parcel.domain), row.period, econ);
    return waste_profit(row.mass, row.period, econ);
}

// NPV of a schedule for one ensemble member's grades.
inline double schedule_npv(const Schedule& schedule, const std::vector<Parcel>& parcels,
                           const EconomicConfig& econ, int member) {
    double npv = 0;
    for (const ScheduleRow& row : schedule.rows) {
        if (row.period < 1 || row.period > econ.max_periods)
            throw std::out_of_range("schedule_npv: period " + std::to_string(row.period) +
                                    " outside [1," + std::to_string(econ.max_periods) + "]");
        const Parcel& p = parcels[static_cast<size_t>(row.parcel_id)];
        double g = p.grade_per_member.at(static_cast<size_t>(member));
        npv += discount(row_profit(row, p, g, econ), row.period, econ.discount_rate);
    }
    return npv;
}

// NPV evaluated on ensemble-mean grades.
inline double schedule_npv_mean(const Schedule& schedule, const std::vector<Parcel>& parcels,
                                const EconomicConfig& econ) {
    double npv = 0;
    for (const ScheduleRow& row : schedule.rows) {
        if (row.period < 1 || row.period > econ.max_periods)
            throw std::out_of_range("schedule_npv: period " + std::to_string(row.period) +
                                    " outside [1," + std::to_string(econ.max_periods) + "]");
        const Parcel& p = parcels[static_cast<size_t>(row.parcel_id)];
        npv += discount(row_profit(row, p, p.mean_grade, econ), row.period, econ.discount_rate);
    }
    return npv;
}

}  // namespace mineplan
