#include "cachege/cache_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "cachege/error.hpp"

namespace cachege {

char to_flag(Replacement r) {
    switch (r) {
        case Replacement::Lru: return 'l';
        case Replacement::Fifo: return 'f';
        case Replacement::Random: return 'r';
    }
    return '?';
}

char to_flag(FetchPolicy f) {
    switch (f) {
        case FetchPolicy::MissPrefetch: return 'm';
        case FetchPolicy::Demand: return 'd';
        case FetchPolicy::AlwaysPrefetch: return 'a';
    }
    return '?';
}

char to_flag(WritePolicy w) { return w == WritePolicy::WriteBack ? 'a' : 'n'; }

std::optional<Replacement> replacement_from_flag(std::string_view s) {
    if (s == "l") return Replacement::Lru;
    if (s == "f") return Replacement::Fifo;
    if (s == "r") return Replacement::Random;
    return std::nullopt;
}

std::optional<FetchPolicy> fetch_from_flag(std::string_view s) {
    if (s == "m") return FetchPolicy::MissPrefetch;
    if (s == "d") return FetchPolicy::Demand;
    if (s == "a") return FetchPolicy::AlwaysPrefetch;
    return std::nullopt;
}

std::optional<WritePolicy> write_policy_from_flag(std::string_view s) {
    if (s == "a") return WritePolicy::WriteBack;
    if (s == "n") return WritePolicy::WriteThrough;
    return std::nullopt;
}

CacheConfig baseline_config() { return CacheConfig{}; }

namespace {

template <std::size_t N>
bool member(const std::array<std::uint32_t, N>& set, std::uint32_t v) {
    return std::find(set.begin(), set.end(), v) != set.end();
}

const char* side_name(Side s) { return s == Side::Instruction ? "I-cache" : "D-cache"; }

}  // namespace

Feasibility validate_side(const CacheSide& c, Side which) {
    auto fail = [&](std::string msg) {
        return Feasibility{false, which, fmt::format("{}: {}", side_name(which), msg)};
    };
    if (!member(kCacheSizes, c.size)) return fail(fmt::format("size {} not in the allowed set", c.size));
    if (!member(kLineSizes, c.block)) return fail(fmt::format("block size {} not in the allowed set", c.block));
    if (!member(kAssocs, c.assoc)) return fail(fmt::format("associativity {} not in the allowed set", c.assoc));
    return validate_geometry(c, which);
}

Feasibility validate_geometry(const CacheSide& c, Side which) {
    auto fail = [&](std::string msg) {
        return Feasibility{false, which, fmt::format("{}: {}", side_name(which), msg)};
    };
    if (c.block == 0 || c.assoc == 0) return fail("block size and associativity must be nonzero");
    const std::uint64_t way_bytes = std::uint64_t{c.block} * c.assoc;
    if (c.size < way_bytes)
        return fail(fmt::format("size {} < block {} x assoc {} = {}", c.size, c.block, c.assoc, way_bytes));
    if (c.size % way_bytes != 0)
        return fail(fmt::format("size {} is not a multiple of block x assoc = {}", c.size, way_bytes));
    return {};
}

Feasibility validate(const CacheConfig& config) {
    if (auto v = validate_side(config.icache, Side::Instruction); !v) return v;
    return validate_side(config.dcache, Side::Data);
}

std::string render_flags(const CacheConfig& c) {
    return fmt::format(
        "-l1-isize {} -l1-ibsize {} -l1-irepl {} -l1-iassoc {} -l1-ifetch {} "
        "-l1-dsize {} -l1-dbsize {} -l1-drepl {} -l1-dassoc {} -l1-dfetch {} -l1-dwback {}",
        c.icache.size, c.icache.block, to_flag(c.icache.repl), c.icache.assoc, to_flag(c.icache.fetch),
        c.dcache.size, c.dcache.block, to_flag(c.dcache.repl), c.dcache.assoc, to_flag(c.dcache.fetch),
        to_flag(c.dwback));
}

namespace {

constexpr std::array<std::string_view, 11> kFlagOrder = {
    "-l1-isize", "-l1-ibsize", "-l1-irepl", "-l1-iassoc", "-l1-ifetch", "-l1-dsize",
    "-l1-dbsize", "-l1-drepl", "-l1-dassoc", "-l1-dfetch", "-l1-dwback"};

template <std::size_t N>
std::uint32_t number_in(std::string_view flag, std::string_view value, const std::array<std::uint32_t, N>& set) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !member(set, v))
        throw InputError(fmt::format("value '{}' for {} outside the allowed set", value, flag));
    return v;
}

template <class T>
T letter_in(std::string_view flag, std::string_view value, std::optional<T> parsed) {
    if (!parsed) throw InputError(fmt::format("value '{}' for {} outside the allowed set", value, flag));
    return *parsed;
}

}  // namespace

CacheConfig parse_flags(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }

    std::map<std::string_view, std::string_view> values;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const auto flag = tokens[t];
        if (std::find(kFlagOrder.begin(), kFlagOrder.end(), flag) == kFlagOrder.end())
            throw InputError(fmt::format("unknown flag '{}'", flag));
        if (t + 1 >= tokens.size()) throw InputError(fmt::format("flag {} has no value", flag));
        if (!values.emplace(flag, tokens[t + 1]).second) throw InputError(fmt::format("duplicate flag {}", flag));
        ++t;
    }
    for (auto flag : kFlagOrder)
        if (!values.contains(flag)) throw InputError(fmt::format("missing flag {}", flag));

    auto v = [&](std::string_view f) { return values.at(f); };
    CacheConfig c;
    c.icache.size = number_in("-l1-isize", v("-l1-isize"), kCacheSizes);
    c.icache.block = number_in("-l1-ibsize", v("-l1-ibsize"), kLineSizes);
    c.icache.repl = letter_in("-l1-irepl", v("-l1-irepl"), replacement_from_flag(v("-l1-irepl")));
    c.icache.assoc = number_in("-l1-iassoc", v("-l1-iassoc"), kAssocs);
    c.icache.fetch = letter_in("-l1-ifetch", v("-l1-ifetch"), fetch_from_flag(v("-l1-ifetch")));
    c.dcache.size = number_in("-l1-dsize", v("-l1-dsize"), kCacheSizes);
    c.dcache.block = number_in("-l1-dbsize", v("-l1-dbsize"), kLineSizes);
    c.dcache.repl = letter_in("-l1-drepl", v("-l1-drepl"), replacement_from_flag(v("-l1-drepl")));
    c.dcache.assoc = number_in("-l1-dassoc", v("-l1-dassoc"), kAssocs);
    c.dcache.fetch = letter_in("-l1-dfetch", v("-l1-dfetch"), fetch_from_flag(v("-l1-dfetch")));
    c.dwback = letter_in("-l1-dwback", v("-l1-dwback"), write_policy_from_flag(v("-l1-dwback")));
    return c;
}

}  // namespace cachege
