#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cachege {

enum class AccessKind : std::uint8_t { Read = 0, Write = 1, IFetch = 2 };

struct TraceRecord {
    AccessKind kind = AccessKind::Read;
    std::uint64_t address = 0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

/// Reads a classic two-field din trace ("label hexaddr" per line).
/// Blank lines and '#' comments are skipped, CRLF is tolerated.
/// Stops after max_records records when a cap is given.
/// Throws ParseError carrying the 1-based line number.
Trace parse_din(std::istream& in, std::optional<std::size_t> max_records = std::nullopt);
Trace parse_din_text(std::string_view text);
Trace load_din_file(const std::string& path, std::optional<std::size_t> max_records = std::nullopt);

/// Writes records as "label hexaddr" lines; parse_din reads them back exactly.
void write_din(std::ostream& out, std::span<const TraceRecord> trace);

enum class Profile { Sequential, Loop, Strided, Random, Mixed };

std::optional<Profile> profile_from_string(std::string_view name);
std::string_view to_string(Profile profile);

/// Deterministic synthetic trace for a fixed (profile, n, seed).
Trace gen_synthetic(Profile profile, std::size_t n, std::uint64_t seed);

struct TraceStats {
    std::size_t n_ifetch = 0;
    std::size_t n_read = 0;
    std::size_t n_write = 0;

    std::size_t total() const { return n_ifetch + n_read + n_write; }
    friend bool operator==(const TraceStats&, const TraceStats&) = default;
};

TraceStats trace_stats(std::span<const TraceRecord> trace);

}  // namespace cachege
