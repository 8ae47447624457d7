#include "cachege/charmodel.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string_view>

#include <fmt/format.h>

#include "cachege/cache_config.hpp"
#include "cachege/error.hpp"

namespace cachege {

void DramParams::check() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0; };
    if (size_bytes == 0 || !positive(access_time) || !positive(bandwidth) || !positive(access_power))
        throw ValidationError("DRAM parameters must be strictly positive and finite");
}

DramParams dram_from_kv(const KeyValueFile& kv, DramParams base) {
    if (auto v = kv.get_double("dram.access_time_s")) base.access_time = *v;
    if (auto v = kv.get_double("dram.bandwidth_bps")) base.bandwidth = *v;
    if (auto v = kv.get_double("dram.access_power_w")) base.access_power = *v;
    if (auto v = kv.get_int("dram.size_bytes")) {
        if (*v <= 0) throw ValidationError("dram.size_bytes must be positive");
        base.size_bytes = static_cast<std::uint64_t>(*v);
    }
    base.check();
    return base;
}

void CharTable::insert(const CharRow& row) {
    if (!(std::isfinite(row.access_time) && row.access_time > 0) ||
        !(std::isfinite(row.access_energy) && row.access_energy > 0))
        throw InputError(fmt::format("non-positive cost for ({},{},{})", row.size, row.block, row.assoc));
    if (!rows_.emplace(Key{row.size, row.block, row.assoc}, row).second)
        throw InputError(fmt::format("duplicate characterization for ({},{},{})", row.size, row.block, row.assoc));
}

AccessCost CharTable::lookup(std::uint32_t size, std::uint32_t block, std::uint32_t assoc) const {
    const auto it = rows_.find(Key{size, block, assoc});
    if (it == rows_.end())
        throw LookupError(fmt::format("no characterization for size={} block={} assoc={}", size, block, assoc));
    return {it->second.access_time, it->second.access_energy};
}

bool CharTable::contains(std::uint32_t size, std::uint32_t block, std::uint32_t assoc) const {
    return rows_.contains(Key{size, block, assoc});
}

std::vector<CharRow> CharTable::rows() const {
    std::vector<CharRow> out;
    out.reserve(rows_.size());
    for (const auto& [key, row] : rows_) out.push_back(row);
    return out;
}

std::string CharTable::first_missing_triple() const {
    for (auto s : kCacheSizes)
        for (auto b : kLineSizes)
            for (auto a : kAssocs)
                if (!contains(s, b, a)) return fmt::format("size={} block={} assoc={}", s, b, a);
    return {};
}

CharTable CharTable::with_energy_scaled(double factor) const {
    CharTable out;
    for (auto [key, row] : rows_) {
        row.access_energy *= factor;
        out.insert(row);
    }
    return out;
}

namespace {

constexpr std::string_view kHeader = "size,block,assoc,access_time_s,access_energy_j";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

template <class T>
T parse_field(std::string_view s, std::size_t line_no) {
    s = trim(s);
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(fmt::format("bad field '{}'", s), line_no);
    return v;
}

}  // namespace

CharTable load_table(std::istream& in, bool strict) {
    CharTable table;
    std::string raw;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!seen_header) {
            if (line != kHeader) throw ParseError(fmt::format("expected header '{}'", kHeader), line_no);
            seen_header = true;
            continue;
        }
        std::vector<std::string_view> cols;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            cols.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        if (cols.size() != 5) throw ParseError(fmt::format("expected 5 columns, got {}", cols.size()), line_no);
        CharRow row{parse_field<std::uint32_t>(cols[0], line_no), parse_field<std::uint32_t>(cols[1], line_no),
                    parse_field<std::uint32_t>(cols[2], line_no), parse_field<double>(cols[3], line_no),
                    parse_field<double>(cols[4], line_no)};
        try {
            table.insert(row);
        } catch (const InputError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (!seen_header) throw InputError("characterization table is empty (no header)");
    if (strict) {
        if (auto missing = table.first_missing_triple(); !missing.empty())
            throw InputError("characterization table is missing triple " + missing);
    }
    return table;
}

CharTable load_table_file(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open characterization file: " + path);
    try {
        return load_table(in, strict);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_table(std::ostream& out, const CharTable& table) {
    out << kHeader << '\n';
    for (const auto& r : table.rows())
        out << fmt::format("{},{},{},{:.6e},{:.6e}\n", r.size, r.block, r.assoc, r.access_time, r.access_energy);
}

CharTable surrogate_generate(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto jitter = [&] { return 0.9 + 0.2 * static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    const double t0 = 2.5e-10 * jitter();
    const double t_size = 2.0e-10 * jitter();
    const double t_assoc = 1.5e-10 * jitter();
    const double t_block = 0.3e-10 * jitter();
    const double e0 = 8e-12 * jitter();
    const double e_size = 2.5e-11 * jitter();
    const double e_assoc = 3e-11 * jitter();
    const double e_block = 8e-12 * jitter();

    CharTable table;
    for (auto s : kCacheSizes) {
        for (auto b : kLineSizes) {
            for (auto a : kAssocs) {
                const double ls = std::countr_zero(s) - 9;  // log2(512) = 9
                const double lb = std::countr_zero(b) - 3;  // log2(8) = 3
                const double la = std::countr_zero(a);
                // Values are rounded to the printed precision so a written
                // table reloads to identical doubles.
                auto rounded = [](double v) { return std::stod(fmt::format("{:.6e}", v)); };
                table.insert({s, b, a, rounded(t0 + t_size * ls + t_assoc * la + t_block * lb),
                              rounded(e0 + e_size * ls + e_assoc * la + e_block * lb)});
            }
        }
    }
    return table;
}

}  // namespace cachege
