#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "mineplan/model.hpp"

namespace mineplan {

enum class Destination { mill, waste };

inline const char* to_string(Destination d) { return d == Destination::mill ? "mill" : "waste"; }

inline Destination destination_from_string(const std::string& s) {
    if (s == "mill") return Destination::mill;
    if (s == "waste") return Destination::waste;
    throw std::invalid_argument("unknown destination: " + s);
}

// All blocks at one bench level within one stage.
struct StageBenchUnit {
    int id = 0;
    int stage = 0;
    int bench = 0;
    std::vector<int> block_ids;
};

// One unit per non-empty (stage, bench); stage 0 blocks are never mined and
// are excluded. Ordered by stage ascending then bench descending (top-down),
// ids are positions in the returned list.
inline std::vector<StageBenchUnit> build_units(const BlockModel& model) {
    std::map<std::pair<int, int>, std::vector<int>> groups;  // (stage, -bench) -> blocks
    for (size_t b = 0; b < model.blocks.size(); ++b) {
        const Block& blk = model.blocks[b];
        if (blk.stage <= 0) continue;
        groups[{blk.stage, -blk.z}].push_back(static_cast<int>(b));
    }
    std::vector<StageBenchUnit> units;
    units.reserve(groups.size());
    for (auto& [key, ids] : groups) {
        StageBenchUnit u;
        u.id = static_cast<int>(units.size());
        u.stage = key.first;
        u.bench = -key.second;
        u.block_ids = std::move(ids);
        units.push_back(std::move(u));
    }
    return units;
}

// Ensemble-mean grade of a block set, mass-weighted; used only to assign bins
// so a genome decodes to the same material routing for every member.
inline double binning_grade(std::span<const int> block_ids, const BlockModel& model) {
    if (model.n_members < 1) throw std::invalid_argument("binning_grade: empty ensemble");
    double mass = 0, metal = 0;
    for (int b : block_ids) {
        double m = model.block_mass(b);
        mass += m;
        metal += m * model.mean_grade(b);
    }
    return mass > 0 ? metal / mass : 0.0;
}

// Ordered bin boundaries per (destination, domain). Boundaries are grade
// fractions, strictly increasing, >= 0.
class CutoffSet {
public:
    using Key = std::pair<int, int>;  // (destination, domain)

    void set(Destination dest, int domain, std::vector<double> bounds) {
        validate_bounds(bounds);
        table_[{static_cast<int>(dest), domain}] = std::move(bounds);
    }

    const std::vector<double>* find(Destination dest, int domain) const {
        auto it = table_.find({static_cast<int>(dest), domain});
        return it == table_.end() ? nullptr : &it->second;
    }

    // Merged boundaries across destinations for one domain; defines the bins.
    std::vector<double> bin_bounds(int domain) const {
        std::vector<double> merged;
        for (const auto& [key, bounds] : table_)
            if (key.second == domain) merged.insert(merged.end(), bounds.begin(), bounds.end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        return merged;
    }

    // Lowest mill boundary for a domain; bins at/above it are milled.
    // Domains without a mill cutoff are never milled.
    double mill_cutoff(int domain) const {
        const auto* bounds = find(Destination::mill, domain);
        if (bounds == nullptr || bounds->empty()) return std::numeric_limits<double>::infinity();
        return bounds->front();
    }

    const std::map<Key, std::vector<double>>& table() const { return table_; }

    bool same_structure(const CutoffSet& other) const {
        if (table_.size() != other.table_.size()) return false;
        auto a = table_.begin();
        auto b = other.table_.begin();
        for (; a != table_.end(); ++a, ++b)
            if (a->first != b->first || a->second.size() != b->second.size()) return false;
        return true;
    }

private:
    static void validate_bounds(const std::vector<double>& bounds) {
        for (size_t i = 0; i < bounds.size(); ++i) {
            if (bounds[i] < 0.0) throw std::invalid_argument("cutoff boundary below zero");
            if (i > 0 && !(bounds[i] > bounds[i - 1]))
                throw std::invalid_argument("cutoff boundaries must be strictly increasing");
        }
    }

    std::map<Key, std::vector<double>> table_;
};

// Aggregated stage-bench-domain-bin material unit.
struct Parcel {
    int unit_id = 0;
    int domain = 0;
    int bin = 0;
    double bin_low = 0.0;  // lower grade bound of the bin, fraction
    double mass = 0.0;     // tonnes
    double mean_grade = 0.0;
    std::vector<double> grade_per_member;  // mass-weighted means, length |E|
    std::vector<int> block_ids;            // may be left empty on the fast path
};

// Per-unit slices sorted by binning grade with prefix sums, so parcels for an
// arbitrary cutoff set come out of binary searches and prefix differences.
class UnitIndex {
public:
    struct DomainSlice {
        int domain = 0;
        std::vector<int> block_ids;        // sorted by binning grade ascending
        std::vector<double> sorted_grades;
        std::vector<double> prefix_mass;   // size n+1
        std::vector<double> prefix_metal;  // [(n+1) * member], mass * grade
        double max_grade = 0.0;
    };

    UnitIndex() = default;

    UnitIndex(const StageBenchUnit& unit, const BlockModel& model)
        : id_(unit.id), stage_(unit.stage), bench_(unit.bench), members_(model.n_members) {
        std::map<int, std::vector<int>> by_domain;
        for (int b : unit.block_ids) by_domain[model.blocks[static_cast<size_t>(b)].domain].push_back(b);
        for (auto& [domain, ids] : by_domain) {
            DomainSlice slice;
            slice.domain = domain;
            slice.block_ids = std::move(ids);
            std::stable_sort(slice.block_ids.begin(), slice.block_ids.end(),
                             [&](int a, int b) { return model.mean_grade(a) < model.mean_grade(b); });
            const size_t n = slice.block_ids.size();
            slice.sorted_grades.resize(n);
            slice.prefix_mass.assign(n + 1, 0.0);
            slice.prefix_metal.assign((n + 1) * static_cast<size_t>(members_), 0.0);
            for (size_t i = 0; i < n; ++i) {
                int b = slice.block_ids[i];
                double m = model.block_mass(b);
                slice.sorted_grades[i] = model.mean_grade(b);
                slice.prefix_mass[i + 1] = slice.prefix_mass[i] + m;
                for (int e = 0; e < members_; ++e) {
                    size_t at = (i + 1) * static_cast<size_t>(members_) + static_cast<size_t>(e);
                    size_t prev = i * static_cast<size_t>(members_) + static_cast<size_t>(e);
                    slice.prefix_metal[at] = slice.prefix_metal[prev] + m * model.grade(b, e);
                }
            }
            slice.max_grade = n > 0 ? slice.sorted_grades.back() : 0.0;
            total_mass_ += slice.prefix_mass[n];
            slices_.push_back(std::move(slice));
        }
    }

    int id() const { return id_; }
    int stage() const { return stage_; }
    int bench() const { return bench_; }
    int members() const { return members_; }
    double total_mass() const { return total_mass_; }
    const std::vector<DomainSlice>& slices() const { return slices_; }

    // Assign blocks to half-open bins [low, high) (top bin closed at 1) and
    // aggregate each non-empty bin into a parcel.
    std::vector<Parcel> build_parcels(const CutoffSet& cutoffs, bool with_block_ids = true) const {
        std::vector<Parcel> parcels;
        for (const DomainSlice& slice : slices_) {
            const size_t n = slice.block_ids.size();
            if (n == 0) continue;
            std::vector<double> bounds = cutoffs.bin_bounds(slice.domain);
            size_t lo = 0;
            int bin = 0;
            double bin_low = 0.0;
            auto emit = [&](size_t hi, double low_bound, int bin_index) {
                if (hi <= lo) return;
                Parcel p;
                p.unit_id = id_;
                p.domain = slice.domain;
                p.bin = bin_index;
                p.bin_low = low_bound;
                p.mass = slice.prefix_mass[hi] - slice.prefix_mass[lo];
                p.grade_per_member.resize(static_cast<size_t>(members_));
                double mean = 0;
                for (int e = 0; e < members_; ++e) {
                    double metal =
                        slice.prefix_metal[hi * static_cast<size_t>(members_) + static_cast<size_t>(e)] -
                        slice.prefix_metal[lo * static_cast<size_t>(members_) + static_cast<size_t>(e)];
                    double g = p.mass > 0 ? metal / p.mass : 0.0;
                    p.grade_per_member[static_cast<size_t>(e)] = g;
                    mean += g;
                }
                p.mean_grade = mean / static_cast<double>(members_);
                if (with_block_ids)
                    p.block_ids.assign(slice.block_ids.begin() + static_cast<long>(lo),
                                       slice.block_ids.begin() + static_cast<long>(hi));
                parcels.push_back(std::move(p));
            };
            for (double bound : bounds) {
                size_t hi = static_cast<size_t>(
                    std::lower_bound(slice.sorted_grades.begin(), slice.sorted_grades.end(), bound) -
                    slice.sorted_grades.begin());
                emit(hi, bin_low, bin);
                lo = std::max(lo, hi);
                bin_low = bound;
                ++bin;
            }
            emit(n, bin_low, bin);
        }
        return parcels;
    }

private:
    int id_ = 0;
    int stage_ = 0;
    int bench_ = 0;
    int members_ = 0;
    double total_mass_ = 0.0;
    std::vector<DomainSlice> slices_;
};

// Standalone parcel construction for a single unit.
inline std::vector<Parcel> build_parcels(const StageBenchUnit& unit, const CutoffSet& cutoffs,
                                         const BlockModel& model) {
    return UnitIndex(unit, model).build_parcels(cutoffs, true);
}

class ReserveIndex {
public:
    ReserveIndex(const std::vector<StageBenchUnit>& units, const BlockModel& model)
        : model_(&model), units_(units) {
        index_.reserve(units.size());
        for (const StageBenchUnit& u : units) index_.emplace_back(u, model);
        for (const StageBenchUnit& u : units) stages_.push_back(u.stage);
        std::sort(stages_.begin(), stages_.end());
        stages_.erase(std::unique(stages_.begin(), stages_.end()), stages_.end());
    }

    size_t size() const { return index_.size(); }
    const UnitIndex& unit(int id) const { return index_[static_cast<size_t>(id)]; }
    const std::vector<StageBenchUnit>& units() const { return units_; }
    const std::vector<int>& stage_values() const { return stages_; }
    const BlockModel& model() const { return *model_; }

    // Highest grade over all domains that carry a mill cutoff decision.
    double max_ore_grade() const {
        double g = 0;
        for (const UnitIndex& u : index_)
            for (const auto& s : u.slices())
                if (s.domain != kWasteDomain) g = std::max(g, s.max_grade);
        return g;
    }

    std::vector<int> ore_domains() const {
        std::vector<int> domains;
        for (const UnitIndex& u : index_)
            for (const auto& s : u.slices())
                if (s.domain != kWasteDomain) domains.push_back(s.domain);
        std::sort(domains.begin(), domains.end());
        domains.erase(std::unique(domains.begin(), domains.end()), domains.end());
        return domains;
    }

private:
    const BlockModel* model_;
    std::vector<StageBenchUnit> units_;
    std::vector<UnitIndex> index_;
    std::vector<int> stages_;
};

// ---------------------------------------------------------------------------
// Extraction precedence
// ---------------------------------------------------------------------------

enum class PrecedencePolicy { concurrent, strict_stage };

inline PrecedencePolicy precedence_from_string(const std::string& s) {
    if (s == "concurrent") return PrecedencePolicy::concurrent;
    if (s == "strict" || s == "strict_stage") return PrecedencePolicy::strict_stage;
    throw std::invalid_argument("unknown precedence policy: " + s);
}

// True iff benches appear top-down within each stage and, under strict_stage,
// stages appear in ascending order without interleaving. Throws if `sequence`
// is not a permutation of all unit ids.
inline bool precedence_ok(std::span<const int> sequence, const std::vector<StageBenchUnit>& units,
                          PrecedencePolicy policy = PrecedencePolicy::concurrent) {
    if (sequence.size() != units.size())
        throw std::invalid_argument("precedence_ok: sequence is not a permutation of all units");
    std::vector<char> seen(units.size(), 0);
    for (int id : sequence) {
        if (id < 0 || static_cast<size_t>(id) >= units.size() || seen[static_cast<size_t>(id)])
            throw std::invalid_argument("precedence_ok: sequence is not a permutation of all units");
        seen[static_cast<size_t>(id)] = 1;
    }
    std::map<int, int> last_bench;  // stage -> previous bench seen
    int max_stage_seen = std::numeric_limits<int>::min();
    for (int id : sequence) {
        const StageBenchUnit& u = units[static_cast<size_t>(id)];
        auto it = last_bench.find(u.stage);
        if (it != last_bench.end() && u.bench >= it->second) return false;
        last_bench[u.stage] = u.bench;
        if (policy == PrecedencePolicy::strict_stage) {
            if (u.stage < max_stage_seen) return false;
            if (u.stage > max_stage_seen) max_stage_seen = u.stage;
        }
    }
    return true;
}

}  // namespace mineplan
