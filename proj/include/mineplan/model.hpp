#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "mineplan/numeric.hpp"

namespace mineplan {

constexpr int kWasteDomain = 0;

struct GridDims {
    int nx = 0, ny = 0, nz = 0;
};

struct BlockSize {
    double x = 10.0, y = 10.0, z = 10.0;
};

struct Block {
    int x = 0, y = 0, z = 0;  // grid indices; z is the bench index (0 = lowest)
    int domain = kWasteDomain;
    double density = 0.0;  // tonnes/m^3
    int stage = 0;         // 0 = outside all pits (never mined)
};

// Regular-grid ensemble block model. Immutable after load/generation.
class BlockModel {
public:
    GridDims dims;
    BlockSize block_size;
    std::vector<Block> blocks;
    int n_members = 0;
    // grade as mass fraction, laid out [block * n_members + member]
    std::vector<double> grades;

    double block_volume() const { return block_size.x * block_size.y * block_size.z; }

    double block_mass(int b) const { return blocks[static_cast<size_t>(b)].density * block_volume(); }

    double grade(int b, int e) const {
        return grades[static_cast<size_t>(b) * static_cast<size_t>(n_members) +
                      static_cast<size_t>(e)];
    }

    double mean_grade(int b) const {
        double s = 0;
        for (int e = 0; e < n_members; ++e) s += grade(b, e);
        return s / static_cast<double>(n_members);
    }

    int bench(int b) const { return blocks[static_cast<size_t>(b)].z; }

    size_t size() const { return blocks.size(); }

    void validate() const {
        if (n_members < 1) throw std::runtime_error("block model: ensemble is empty");
        if (grades.size() != blocks.size() * static_cast<size_t>(n_members))
            throw std::runtime_error("block model: grade matrix is not rectangular");
        for (size_t b = 0; b < blocks.size(); ++b) {
            const Block& blk = blocks[b];
            if (blk.density <= 0.0)
                throw std::runtime_error("block model: non-positive density at block " +
                                         std::to_string(b));
            if (blk.stage < 0)
                throw std::runtime_error("block model: negative stage at block " +
                                         std::to_string(b));
            for (int e = 0; e < n_members; ++e) {
                double g = grades[b * static_cast<size_t>(n_members) + static_cast<size_t>(e)];
                if (!(g >= 0.0 && g <= 1.0))
                    throw std::runtime_error("block model: grade out of [0,1] at block " +
                                             std::to_string(b) + ", member " +
                                             std::to_string(e + 1));
                if (blk.domain == kWasteDomain && g != 0.0)
                    throw std::runtime_error("block model: waste-domain block " +
                                             std::to_string(b) + " has nonzero grade");
            }
        }
    }
};

// ---------------------------------------------------------------------------
// CSV + JSON sidecar I/O
//
// CSV header: x,y,z,domain,density,stage,grade_001,...,grade_M
// Grades are percent on disk, mass fraction in memory; the conversion shifts
// the decimal text so save/load round-trips are bit-exact.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string sidecar_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    if (p.extension() == ".csv") {
        p.replace_extension(".json");
        return p.string();
    }
    return csv_path + ".json";
}

inline std::vector<std::string_view> split_csv_line(std::string_view line,
                                                    std::vector<std::string_view>& out) {
    out.clear();
    size_t start = 0;
    while (true) {
        size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

[[noreturn]] inline void parse_fail(const std::string& path, size_t row, const std::string& column,
                                    const std::string& what) {
    throw std::runtime_error(path + ": row " + std::to_string(row) + ", column '" + column +
                             "': " + what);
}

inline long parse_int_field(std::string_view text, const std::string& path, size_t row,
                            const std::string& column) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        parse_fail(path, row, column, "expected integer, got '" + std::string(text) + "'");
    return v;
}

inline double parse_double_field(std::string_view text, const std::string& path, size_t row,
                                 const std::string& column, int decimal_shift = 0) {
    try {
        return parse_decimal_scaled(text, decimal_shift);
    } catch (const std::exception&) {
        parse_fail(path, row, column, "expected number, got '" + std::string(text) + "'");
    }
}

}  // namespace detail

inline BlockModel load_block_model(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open block model file: " + csv_path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(csv_path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string_view> cells;
    detail::split_csv_line(line, cells);
    static const char* fixed[] = {"x", "y", "z", "domain", "density", "stage"};
    if (cells.size() < 7)
        throw std::runtime_error(csv_path + ": header must be x,y,z,domain,density,stage,grade_001,...");
    for (size_t i = 0; i < 6; ++i) {
        if (cells[i] != fixed[i])
            throw std::runtime_error(csv_path + ": missing or misplaced column '" +
                                     std::string(fixed[i]) + "' in header");
    }
    const int n_members = static_cast<int>(cells.size()) - 6;
    std::vector<std::string> grade_columns;
    for (int e = 0; e < n_members; ++e) {
        std::string name = cells[static_cast<size_t>(6 + e)].substr(0, 6) == "grade_"
                               ? std::string(cells[static_cast<size_t>(6 + e)])
                               : std::string();
        if (name.empty())
            throw std::runtime_error(csv_path + ": expected grade_* column at position " +
                                     std::to_string(7 + e) + ", got '" +
                                     std::string(cells[static_cast<size_t>(6 + e)]) + "'");
        grade_columns.push_back(name);
    }

    BlockModel model;
    model.n_members = n_members;
    std::unordered_set<std::uint64_t> seen;
    int max_x = -1, max_y = -1, max_z = -1;

    size_t row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        detail::split_csv_line(line, cells);
        if (cells.size() != static_cast<size_t>(6 + n_members)) {
            detail::parse_fail(csv_path, row, "(row)",
                               "expected " + std::to_string(6 + n_members) + " fields, got " +
                                   std::to_string(cells.size()) +
                                   " (non-rectangular ensemble)");
        }
        Block blk;
        blk.x = static_cast<int>(detail::parse_int_field(cells[0], csv_path, row, "x"));
        blk.y = static_cast<int>(detail::parse_int_field(cells[1], csv_path, row, "y"));
        blk.z = static_cast<int>(detail::parse_int_field(cells[2], csv_path, row, "z"));
        blk.domain = static_cast<int>(detail::parse_int_field(cells[3], csv_path, row, "domain"));
        blk.density = detail::parse_double_field(cells[4], csv_path, row, "density");
        blk.stage = static_cast<int>(detail::parse_int_field(cells[5], csv_path, row, "stage"));
        if (blk.x < 0 || blk.y < 0 || blk.z < 0)
            detail::parse_fail(csv_path, row, "x/y/z", "negative block index");
        if (blk.density <= 0.0)
            detail::parse_fail(csv_path, row, "density",
                               "must be positive, got " + std::string(cells[4]));
        if (blk.stage < 0) detail::parse_fail(csv_path, row, "stage", "must be >= 0");
        std::uint64_t key = (static_cast<std::uint64_t>(blk.x) << 42) |
                            (static_cast<std::uint64_t>(blk.y) << 21) |
                            static_cast<std::uint64_t>(blk.z);
        if (!seen.insert(key).second)
            detail::parse_fail(csv_path, row, "x/y/z",
                               "duplicate block index (" + std::to_string(blk.x) + "," +
                                   std::to_string(blk.y) + "," + std::to_string(blk.z) + ")");
        for (int e = 0; e < n_members; ++e) {
            double frac = detail::parse_double_field(cells[static_cast<size_t>(6 + e)], csv_path,
                                                     row, grade_columns[static_cast<size_t>(e)],
                                                     -2);  // percent -> fraction
            if (frac < 0.0)
                detail::parse_fail(csv_path, row, grade_columns[static_cast<size_t>(e)],
                                   "negative grade");
            if (frac > 1.0)
                detail::parse_fail(csv_path, row, grade_columns[static_cast<size_t>(e)],
                                   "grade above 100%");
            if (blk.domain == kWasteDomain && frac != 0.0)
                detail::parse_fail(csv_path, row, grade_columns[static_cast<size_t>(e)],
                                   "waste-domain block with nonzero grade");
            model.grades.push_back(frac);
        }
        model.blocks.push_back(blk);
        max_x = std::max(max_x, blk.x);
        max_y = std::max(max_y, blk.y);
        max_z = std::max(max_z, blk.z);
    }
    if (model.blocks.empty()) throw std::runtime_error(csv_path + ": no data rows");

    model.dims = GridDims{max_x + 1, max_y + 1, max_z + 1};

    const std::string meta_path = detail::sidecar_path(csv_path);
    if (std::filesystem::exists(meta_path)) {
        std::ifstream meta_in(meta_path);
        nlohmann::json meta = nlohmann::json::parse(meta_in);
        if (meta.contains("block_size")) {
            auto bs = meta.at("block_size");
            model.block_size = BlockSize{bs.at(0).get<double>(), bs.at(1).get<double>(),
                                         bs.at(2).get<double>()};
        }
        if (meta.contains("dims")) {
            auto d = meta.at("dims");
            model.dims = GridDims{d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()};
        }
        if (meta.contains("n_members")) {
            int m = meta.at("n_members").get<int>();
            if (m != model.n_members)
                throw std::runtime_error(meta_path + ": n_members=" + std::to_string(m) +
                                         " does not match CSV grade columns (" +
                                         std::to_string(model.n_members) + ")");
        }
    }

    model.validate();
    return model;
}

inline void save_block_model(const BlockModel& model, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write block model file: " + csv_path);
    out << "x,y,z,domain,density,stage";
    for (int e = 1; e <= model.n_members; ++e) {
        char name[32];
        std::snprintf(name, sizeof(name), "grade_%03d", e);
        out << ',' << name;
    }
    out << '\n';
    for (size_t b = 0; b < model.blocks.size(); ++b) {
        const Block& blk = model.blocks[b];
        out << blk.x << ',' << blk.y << ',' << blk.z << ',' << blk.domain << ','
            << format_double(blk.density) << ',' << blk.stage;
        for (int e = 0; e < model.n_members; ++e)
            out << ',' << format_decimal_scaled(model.grade(static_cast<int>(b), e), 2);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + csv_path);

    nlohmann::json meta;
    meta["block_size"] = {model.block_size.x, model.block_size.y, model.block_size.z};
    meta["dims"] = {model.dims.nx, model.dims.ny, model.dims.nz};
    meta["n_members"] = model.n_members;
    std::ofstream meta_out(detail::sidecar_path(csv_path));
    if (!meta_out) throw std::runtime_error("cannot write sidecar: " + detail::sidecar_path(csv_path));
    meta_out << meta.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic two-pit test model
//
// Two identically shaped pits, each with two ore boxes separated by a waste
// layer, waste expanding with the pit slope toward the surface, plus one cap
// bench of waste on top. East pit = stage 1 (higher grades), West = stage 2.
// Member grades are constant per pit and laid out as evenly spaced ladders,
// descending for East and ascending for West.
// ---------------------------------------------------------------------------

struct TestModelParams {
    int box_nx = 20, box_ny = 20, box_nz = 5;  // blocks per axis per ore box
    int waste_layer_benches = 2;               // between the two boxes
    int cap_benches = 1;                       // waste above the upper box
    double slope_degrees = 45.0;
    double east_low_pct = 0.46, east_high_pct = 0.55;
    double west_low_pct = 0.41, west_high_pct = 0.50;
    int members = 10;
    BlockSize block_size{10.0, 10.0, 10.0};
    double ore_density = 2.7;
    double waste_density = 2.5;
    int ore_domain = 1;

    int benches_per_pit() const { return 2 * box_nz + waste_layer_benches + cap_benches; }
};

inline BlockModel generate_test_model(const TestModelParams& p = {}) {
    if (p.box_nx <= 0 || p.box_ny <= 0 || p.box_nz <= 0)
        throw std::invalid_argument("test model: ore boxes must have positive dimensions");
    if (p.members < 2) throw std::invalid_argument("test model: need at least 2 ensemble members");
    if (!(p.east_low_pct < p.east_high_pct) || !(p.west_low_pct < p.west_high_pct))
        throw std::invalid_argument("test model: grade ladders must be strictly monotone");
    if (p.waste_layer_benches < 0 || p.cap_benches < 0)
        throw std::invalid_argument("test model: waste layers cannot be negative");
    if (!(p.slope_degrees > 0.0 && p.slope_degrees <= 90.0))
        throw std::invalid_argument("test model: slope angle must be in (0, 90]");

    const int d = p.benches_per_pit();
    const double slope_rad = p.slope_degrees * std::numbers::pi / 180.0;
    const double setback = p.block_size.z / std::tan(slope_rad);
    const int exp_x = std::max(0, static_cast<int>(std::lround(setback / p.block_size.x)));
    const int exp_y = std::max(0, static_cast<int>(std::lround(setback / p.block_size.y)));

    // grade ladders, percent -> fraction
    std::vector<double> east(static_cast<size_t>(p.members)), west(static_cast<size_t>(p.members));
    const double east_step = (p.east_high_pct - p.east_low_pct) / (p.members - 1);
    const double west_step = (p.west_high_pct - p.west_low_pct) / (p.members - 1);
    for (int e = 0; e < p.members; ++e) {
        east[static_cast<size_t>(e)] = (p.east_high_pct - east_step * e) / 100.0;  // descending
        west[static_cast<size_t>(e)] = (p.west_low_pct + west_step * e) / 100.0;   // ascending
    }

    BlockModel model;
    model.n_members = p.members;
    model.block_size = p.block_size;

    const int margin = exp_x * (d - 1);
    const int west_x0 = 0;
    const int east_x0 = west_x0 + p.box_nx + 2 * margin + 2;  // 2-block gap between pits
    const int y0 = 0;

    auto add_pit = [&](int stage, int pit_x0, const std::vector<double>& ladder) {
        for (int z = 0; z < d; ++z) {
            const int ex = exp_x * z, ey = exp_y * z;
            const int x_lo = pit_x0 + margin - ex, x_hi = pit_x0 + margin + p.box_nx + ex;
            const int y_lo = y0 + margin - ey, y_hi = y0 + margin + p.box_ny + ey;
            const bool ore_bench =
                (z < p.box_nz) ||
                (z >= p.box_nz + p.waste_layer_benches && z < 2 * p.box_nz + p.waste_layer_benches);
            const int bx_lo = pit_x0 + margin, bx_hi = pit_x0 + margin + p.box_nx;
            const int by_lo = y0 + margin, by_hi = y0 + margin + p.box_ny;
            for (int x = x_lo; x < x_hi; ++x) {
                for (int y = y_lo; y < y_hi; ++y) {
                    Block blk;
                    blk.x = x;
                    blk.y = y;
                    blk.z = z;
                    blk.stage = stage;
                    const bool in_box =
                        ore_bench && x >= bx_lo && x < bx_hi && y >= by_lo && y < by_hi;
                    if (in_box) {
                        blk.domain = p.ore_domain;
                        blk.density = p.ore_density;
                        model.blocks.push_back(blk);
                        for (int e = 0; e < p.members; ++e)
                            model.grades.push_back(ladder[static_cast<size_t>(e)]);
                    } else {
                        blk.domain = kWasteDomain;
                        blk.density = p.waste_density;
                        model.blocks.push_back(blk);
                        for (int e = 0; e < p.members; ++e) model.grades.push_back(0.0);
                    }
                }
            }
        }
    };

    add_pit(1, east_x0, east);  // East = stage 1
    add_pit(2, west_x0, west);  // West = stage 2

    int max_x = 0, max_y = 0, max_z = 0;
    for (const Block& b : model.blocks) {
        max_x = std::max(max_x, b.x);
        max_y = std::max(max_y, b.y);
        max_z = std::max(max_z, b.z);
    }
    model.dims = GridDims{max_x + 1, max_y + 1, max_z + 1};

    model.validate();
    return model;
}

}  // namespace mineplan
