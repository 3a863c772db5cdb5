#pragma once

#include <fstream>
#include <vector>

#include <json.hpp>

#include "mineplan/risk.hpp"

namespace mineplan {

struct PeriodStatsRow {
    int period = 0;
    double max = 0, min = 0, mean = 0, stddev = 0;
    double cum_mean_npv = 0;
};

struct EnsembleReport {
    std::vector<PeriodStatsRow> rows;
    std::vector<double> per_member_npv;
    double mean_npv = 0.0;
    double total_sv = 0.0;
    int periods = 0;
};

// Replay a fixed schedule against every ensemble member: matrix of discounted
// per-period profit, [member][period-1]. Routing comes from the schedule.
inline std::vector<std::vector<double>> evaluate_schedule(const Schedule& schedule,
                                                          const std::vector<Parcel>& parcels,
                                                          const EconomicConfig& econ,
                                                          int n_members) {
    for (const Parcel& p : parcels)
        if (static_cast<int>(p.grade_per_member.size()) != n_members)
            throw std::invalid_argument("evaluate_schedule: ensemble member count mismatch");
    std::vector<std::vector<double>> matrix(
        static_cast<size_t>(n_members),
        std::vector<double>(static_cast<size_t>(schedule.periods), 0.0));
    for (const ScheduleRow& row : schedule.rows) {
        if (row.period < 1 || row.period > schedule.periods)
            throw std::out_of_range("evaluate_schedule: row period out of range");
        const Parcel& p = parcels[static_cast<size_t>(row.parcel_id)];
        if (row.dest == Destination::mill) {
            const double r = econ.recovery_for(p.domain);
            for (int e = 0; e < n_members; ++e) {
                double profit = processed_profit(row.mass, p.grade_per_member[static_cast<size_t>(e)],
                                                 r, row.period, econ);
                matrix[static_cast<size_t>(e)][static_cast<size_t>(row.period - 1)] +=
                    discount(profit, row.period, econ.discount_rate);
            }
        } else {
            double profit = discount(waste_profit(row.mass, row.period, econ), row.period,
                                     econ.discount_rate);
            for (int e = 0; e < n_members; ++e)
                matrix[static_cast<size_t>(e)][static_cast<size_t>(row.period - 1)] += profit;
        }
    }
    return matrix;
}

// Per-period max/min/mean/population std over members, plus cumulative mean
// NPV and per-member totals.
inline EnsembleReport period_stats(const std::vector<std::vector<double>>& matrix) {
    if (matrix.empty() || matrix.front().empty())
        throw std::invalid_argument("period_stats: empty profit matrix");
    const size_t members = matrix.size();
    const size_t periods = matrix.front().size();
    for (const auto& row : matrix)
        if (row.size() != periods) throw std::invalid_argument("period_stats: ragged matrix");

    EnsembleReport report;
    report.periods = static_cast<int>(periods);
    report.per_member_npv.assign(members, 0.0);
    double cum = 0;
    for (size_t t = 0; t < periods; ++t) {
        std::vector<double> column(members);
        for (size_t e = 0; e < members; ++e) {
            column[e] = matrix[e][t];
            report.per_member_npv[e] += matrix[e][t];
        }
        PeriodStatsRow row;
        row.period = static_cast<int>(t) + 1;
        row.max = *std::max_element(column.begin(), column.end());
        row.min = *std::min_element(column.begin(), column.end());
        row.mean = mean_of(column);
        row.stddev = std::sqrt(population_variance(column));
        cum += row.mean;
        row.cum_mean_npv = cum;
        report.rows.push_back(row);
    }
    report.mean_npv = mean_of(report.per_member_npv);
    return report;
}

inline EnsembleReport build_report(const Schedule& schedule, const std::vector<Parcel>& parcels,
                                   const EconomicConfig& econ, int n_members) {
    EnsembleReport report = period_stats(evaluate_schedule(schedule, parcels, econ, n_members));
    report.total_sv = schedule_sv(schedule, parcels, econ);
    return report;
}

inline void emit_report(const EnsembleReport& report, const std::string& csv_path,
                        const std::string& json_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write report: " + csv_path);
    csv << "period,max,min,mean,std,cum_mean_npv\n";
    for (const PeriodStatsRow& row : report.rows) {
        csv << row.period << ',' << format_double(row.max) << ',' << format_double(row.min) << ','
            << format_double(row.mean) << ',' << format_double(row.stddev) << ','
            << format_double(row.cum_mean_npv) << '\n';
    }
    const auto& npv = report.per_member_npv;
    csv << "total," << format_double(*std::max_element(npv.begin(), npv.end())) << ','
        << format_double(*std::min_element(npv.begin(), npv.end())) << ','
        << format_double(report.mean_npv) << ','
        << format_double(std::sqrt(population_variance(npv))) << ','
        << format_double(report.mean_npv) << '\n';
    if (!csv) throw std::runtime_error("write failed: " + csv_path);

    nlohmann::json summary;
    summary["mean_npv"] = report.mean_npv;
    summary["total_sv"] = report.total_sv;
    summary["periods"] = report.periods;
    summary["per_member_npv"] = report.per_member_npv;
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot write summary: " + json_path);
    js << summary.dump(2) << '\n';
}

// Per-period deltas (b - a), mainly the std column, for comparing two runs.
inline void emit_comparison(const EnsembleReport& a, const EnsembleReport& b,
                            const std::string& csv_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write comparison: " + csv_path);
    csv << "period,std_a,std_b,std_delta,mean_a,mean_b,mean_delta\n";
    const size_t periods = std::max(a.rows.size(), b.rows.size());
    for (size_t t = 0; t < periods; ++t) {
        const PeriodStatsRow za{}, *ra = t < a.rows.size() ? &a.rows[t] : &za;
        const PeriodStatsRow zb{}, *rb = t < b.rows.size() ? &b.rows[t] : &zb;
        csv << (t + 1) << ',' << format_double(ra->stddev) << ',' << format_double(rb->stddev)
            << ',' << format_double(rb->stddev - ra->stddev) << ',' << format_double(ra->mean)
            << ',' << format_double(rb->mean) << ',' << format_double(rb->mean - ra->mean) << '\n';
    }
    csv << "total_sv," << format_double(a.total_sv) << ',' << format_double(b.total_sv) << ','
        << format_double(b.total_sv - a.total_sv) << ',' << format_double(a.mean_npv) << ','
        << format_double(b.mean_npv) << ',' << format_double(b.mean_npv - a.mean_npv) << '\n';
    if (!csv) throw std::runtime_error("write failed: " + csv_path);
}

}  // namespace mineplan
