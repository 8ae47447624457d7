#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "cachege/kvfile.hpp"

namespace cachege {

/// Per-access cost of one cache organization. Instruction and data caches
/// share rows; only size, block and associativity matter.
struct CharRow {
    std::uint32_t size = 0;
    std::uint32_t block = 0;
    std::uint32_t assoc = 0;
    double access_time = 0;    // s
    double access_energy = 0;  // J

    friend bool operator==(const CharRow&, const CharRow&) = default;
};

struct AccessCost {
    double time = 0;    // s
    double energy = 0;  // J

    friend bool operator==(const AccessCost&, const AccessCost&) = default;
};

/// Main-memory constants. Defaults: 64 MB embedded DRAM, 3.9889 ns,
/// 6.7108864e9 B/s, 1.051 W.
struct DramParams {
    std::uint64_t size_bytes = 64ull * 1024 * 1024;
    double access_time = 3.9889e-9;  // s
    double bandwidth = 6.7108864e9;  // B/s
    double access_power = 1.051;     // W

    void check() const;
};

/// Overrides from keys dram.access_time_s, dram.bandwidth_bps,
/// dram.access_power_w, dram.size_bytes.
DramParams dram_from_kv(const KeyValueFile& kv, DramParams base = {});

class CharTable {
public:
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;

    /// Throws InputError on duplicate triples or non-positive values.
    void insert(const CharRow& row);
    /// Throws LookupError when the triple is absent.
    AccessCost lookup(std::uint32_t size, std::uint32_t block, std::uint32_t assoc) const;
    bool contains(std::uint32_t size, std::uint32_t block, std::uint32_t assoc) const;
    std::size_t size() const { return rows_.size(); }
    /// Rows ordered by (size, block, assoc).
    std::vector<CharRow> rows() const;
    /// Names the first grammar triple without a row, or empty when complete.
    std::string first_missing_triple() const;

    /// Scales the energy column by a positive factor.
    CharTable with_energy_scaled(double factor) const;

private:
    std::map<Key, CharRow> rows_;
};

/// CSV with header "size,block,assoc,access_time_s,access_energy_j".
/// Strict mode requires all 8 x 4 x 8 = 256 grammar triples.
CharTable load_table(std::istream& in, bool strict = false);
CharTable load_table_file(const std::string& path, bool strict = false);
void write_table(std::ostream& out, const CharTable& table);

/// Deterministic 256-row stand-in for a circuit-level characterization:
/// affine in log2(size), log2(assoc) and log2(block) with seed-jittered
/// positive coefficients, so cost rises strictly with size and associativity.
CharTable surrogate_generate(std::uint64_t seed);

}  // namespace cachege
