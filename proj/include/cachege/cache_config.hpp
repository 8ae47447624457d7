#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cachege {

enum class Replacement : std::uint8_t { Lru, Fifo, Random };
enum class FetchPolicy : std::uint8_t { MissPrefetch, Demand, AlwaysPrefetch };
enum class WritePolicy : std::uint8_t { WriteBack, WriteThrough };

// Dinero flag letters: l/f/r, m/d/a, a/n.
char to_flag(Replacement r);
char to_flag(FetchPolicy f);
char to_flag(WritePolicy w);
std::optional<Replacement> replacement_from_flag(std::string_view s);
std::optional<FetchPolicy> fetch_from_flag(std::string_view s);
std::optional<WritePolicy> write_policy_from_flag(std::string_view s);

inline constexpr std::array<std::uint32_t, 8> kCacheSizes = {512, 1024, 2048, 4096, 8192, 16384, 32768, 65536};
inline constexpr std::array<std::uint32_t, 4> kLineSizes = {8, 16, 32, 64};
inline constexpr std::array<std::uint32_t, 8> kAssocs = {1, 2, 4, 8, 16, 32, 64, 128};
inline constexpr std::array<Replacement, 3> kReplacements = {Replacement::Lru, Replacement::Fifo, Replacement::Random};
inline constexpr std::array<FetchPolicy, 3> kFetchPolicies = {FetchPolicy::MissPrefetch, FetchPolicy::Demand,
                                                             FetchPolicy::AlwaysPrefetch};
inline constexpr std::array<WritePolicy, 2> kWritePolicies = {WritePolicy::WriteBack, WritePolicy::WriteThrough};

/// Geometry and policies of one L1 cache.
struct CacheSide {
    std::uint32_t size = 16384;  // bytes
    std::uint32_t block = 32;    // bytes
    std::uint32_t assoc = 4;     // ways
    Replacement repl = Replacement::Lru;
    FetchPolicy fetch = FetchPolicy::Demand;

    std::uint64_t sets() const { return std::uint64_t{size} / (std::uint64_t{block} * assoc); }
    friend bool operator==(const CacheSide&, const CacheSide&) = default;
};

/// The 11-parameter split L1 design point. Defaults are the GP2X-like reference
/// cache: 16 KB, 32 B lines, 4-way, LRU, on-demand, write-back data side.
struct CacheConfig {
    CacheSide icache;
    CacheSide dcache;
    WritePolicy dwback = WritePolicy::WriteBack;

    friend bool operator==(const CacheConfig&, const CacheConfig&) = default;
};

CacheConfig baseline_config();

enum class Side { Instruction, Data };

struct Feasibility {
    bool feasible = true;
    std::optional<Side> side;  // set when infeasible
    std::string reason;

    explicit operator bool() const { return feasible; }
};

/// Checks terminal-set membership and that size / (block * assoc) is a whole
/// number of sets, at least one, for both caches.
Feasibility validate(const CacheConfig& config);
Feasibility validate_side(const CacheSide& side, Side which);

/// Geometry only: nonzero block and ways, and a whole number of sets, at least
/// one. Any such cache can be simulated, including sizes outside the grammar.
Feasibility validate_geometry(const CacheSide& side, Side which);

/// Renders the canonical Dinero flag text in fixed flag order, single spaces.
std::string render_flags(const CacheConfig& config);

/// Parses flag text holding all 11 flags exactly once, any order.
/// Throws InputError on missing/duplicate/unknown flags and values outside the
/// terminal sets.
CacheConfig parse_flags(std::string_view text);

}  // namespace cachege
