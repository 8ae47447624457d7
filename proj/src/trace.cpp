#include "cachege/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include <fmt/format.h>

#include "cachege/error.hpp"

namespace cachege {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Splits on runs of spaces/tabs.
std::vector<std::string_view> fields(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

TraceRecord parse_line(std::string_view line, std::size_t line_no) {
    const auto f = fields(line);
    if (f.size() != 2) throw ParseError(fmt::format("expected 2 fields, got {}", f.size()), line_no);

    TraceRecord rec;
    if (f[0] == "0")
        rec.kind = AccessKind::Read;
    else if (f[0] == "1")
        rec.kind = AccessKind::Write;
    else if (f[0] == "2")
        rec.kind = AccessKind::IFetch;
    else
        throw ParseError("invalid label", line_no);

    std::string_view hex = f[1];
    if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    const char* end = hex.data() + hex.size();
    auto [ptr, ec] = std::from_chars(hex.data(), end, rec.address, 16);
    if (hex.empty() || ec != std::errc{} || ptr != end) throw ParseError("invalid address", line_no);
    return rec;
}

}  // namespace

Trace parse_din(std::istream& in, std::optional<std::size_t> max_records) {
    Trace out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (max_records && out.size() >= *max_records) break;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        out.push_back(parse_line(body, line_no));
    }
    return out;
}

Trace parse_din_text(std::string_view text) {
    Trace out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        const auto body = trim(line);
        if (!body.empty() && body.front() != '#') out.push_back(parse_line(body, line_no));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

Trace load_din_file(const std::string& path, std::optional<std::size_t> max_records) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace file: " + path);
    try {
        return parse_din(in, max_records);
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_din(std::ostream& out, std::span<const TraceRecord> trace) {
    for (const auto& r : trace) out << fmt::format("{} {:x}\n", static_cast<int>(r.kind), r.address);
}

std::optional<Profile> profile_from_string(std::string_view name) {
    if (name == "sequential") return Profile::Sequential;
    if (name == "loop") return Profile::Loop;
    if (name == "strided") return Profile::Strided;
    if (name == "random") return Profile::Random;
    if (name == "mixed") return Profile::Mixed;
    return std::nullopt;
}

std::string_view to_string(Profile profile) {
    switch (profile) {
        case Profile::Sequential: return "sequential";
        case Profile::Loop: return "loop";
        case Profile::Strided: return "strided";
        case Profile::Random: return "random";
        case Profile::Mixed: return "mixed";
    }
    return "?";
}

namespace {

constexpr std::uint64_t kCodeBase = 0x00000000;
constexpr std::uint64_t kDataBase = 0x00100000;
constexpr std::uint64_t kHeapBase = 0x00200000;
constexpr std::uint64_t kStackTop = 0x7fff0000;

// Uniform draw in [0, n) by rejection, so results do not depend on the
// standard library's distribution implementations.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do x = rng(); while (x >= limit);
    return x % n;
}

bool chance(std::mt19937_64& rng, std::uint64_t num, std::uint64_t den) { return below(rng, den) < num; }

Trace gen_loop(std::size_t n, std::mt19937_64& rng) {
    // 48-instruction loop body; every third instruction touches a 2 KiB array,
    // one data access in four is a store.
    constexpr std::uint64_t kBody = 48;
    constexpr std::uint64_t kArrayWords = 512;
    Trace out;
    out.reserve(n);
    std::uint64_t pc = 0;
    std::uint64_t elem = 0;
    while (out.size() < n) {
        out.push_back({AccessKind::IFetch, kCodeBase + 0x1000 + pc * 4});
        if (out.size() < n && pc % 3 == 2) {
            const auto kind = chance(rng, 1, 4) ? AccessKind::Write : AccessKind::Read;
            out.push_back({kind, kDataBase + (elem % kArrayWords) * 4});
            ++elem;
        }
        pc = (pc + 1) % kBody;
    }
    return out;
}

Trace gen_strided(std::size_t n, std::mt19937_64& rng) {
    // 64 B stride over a 32 KiB region, wrapping.
    constexpr std::uint64_t kStride = 64;
    constexpr std::uint64_t kRegion = 32 * 1024;
    Trace out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto kind = chance(rng, 1, 5) ? AccessKind::Write : AccessKind::Read;
        out.push_back({kind, kDataBase + (i * kStride) % kRegion});
    }
    return out;
}

Trace gen_random(std::size_t n, std::mt19937_64& rng) {
    Trace out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = below(rng, 3);
        if (k == 2)
            out.push_back({AccessKind::IFetch, kCodeBase + below(rng, 16 * 1024 / 4) * 4});
        else
            out.push_back({static_cast<AccessKind>(k), kDataBase + below(rng, 64 * 1024 / 4) * 4});
    }
    return out;
}

Trace gen_mixed(std::size_t n, std::mt19937_64& rng) {
    // Instruction-heavy program shape: straight-line runs with backward loop
    // branches and occasional calls into a 32 KiB code area; data split over a
    // hot stack frame, a streamed array and a random heap.
    Trace out;
    out.reserve(n);
    std::uint64_t pc = 0x400;
    std::uint64_t loop_start = pc;
    std::uint64_t array_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (chance(rng, 3, 4)) {
            out.push_back({AccessKind::IFetch, kCodeBase + pc});
            if (chance(rng, 1, 16)) {
                pc = loop_start;
            } else if (chance(rng, 1, 64)) {
                pc = below(rng, 32 * 1024 / 64) * 64;
                loop_start = pc;
            } else {
                pc = (pc + 4) % (32 * 1024);
            }
            continue;
        }
        const auto kind = chance(rng, 3, 10) ? AccessKind::Write : AccessKind::Read;
        const auto region = below(rng, 10);
        std::uint64_t addr;
        if (region < 5) {
            addr = kStackTop - 4 - below(rng, 64) * 4;
        } else if (region < 8) {
            addr = kDataBase + array_pos;
            array_pos = (array_pos + 4) % (16 * 1024);
        } else {
            addr = kHeapBase + below(rng, 64 * 1024 / 4) * 4;
        }
        out.push_back({kind, addr});
    }
    return out;
}

}  // namespace

Trace gen_synthetic(Profile profile, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    switch (profile) {
        case Profile::Sequential: {
            Trace out(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = {AccessKind::IFetch, kCodeBase + 4 * i};
            return out;
        }
        case Profile::Loop: return gen_loop(n, rng);
        case Profile::Strided: return gen_strided(n, rng);
        case Profile::Random: return gen_random(n, rng);
        case Profile::Mixed: return gen_mixed(n, rng);
    }
    return {};
}

TraceStats trace_stats(std::span<const TraceRecord> trace) {
    TraceStats s;
    for (const auto& r : trace) {
        switch (r.kind) {
            case AccessKind::IFetch: ++s.n_ifetch; break;
            case AccessKind::Read: ++s.n_read; break;
            case AccessKind::Write: ++s.n_write; break;
        }
    }
    return s;
}

}  // namespace cachege
