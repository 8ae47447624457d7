#include <cmath>
#include <sstream>

#include "cachege/cache_config.hpp"
#include "cachege/charmodel.hpp"
#include "cachege/error.hpp"
#include "doctest.h"

using namespace cachege;

namespace {

std::string full_table_text(bool drop_last = false, bool duplicate = false) {
    std::ostringstream os;
    os << "size,block,assoc,access_time_s,access_energy_j\n";
    int n = 0;
    for (auto s : kCacheSizes)
        for (auto b : kLineSizes)
            for (auto a : kAssocs) {
                if (drop_last && s == 65536 && b == 64 && a == 128) continue;
                os << s << ',' << b << ',' << a << ',' << 1e-9 + n * 1e-12 << ',' << 1e-11 << '\n';
                ++n;
            }
    if (duplicate) os << "512,8,1,2e-9,2e-11\n";
    return os.str();
}

CharTable load_text(const std::string& text, bool strict) {
    std::istringstream in(text);
    return load_table(in, strict);
}

}  // namespace

TEST_CASE("full table loads") {
    const auto t = load_text(full_table_text(), true);
    CHECK(t.size() == 256);
    CHECK(t.first_missing_triple().empty());
}

TEST_CASE("lookup returns the stored values verbatim") {
    const std::string text =
        "size,block,assoc,access_time_s,access_energy_j\n"
        "16384,32,4,1.23e-9,4.5e-11\n"
        "512,8,1,3e-10,1e-12\n";
    const auto t = load_text(text, false);
    CHECK(t.lookup(16384, 32, 4) == AccessCost{1.23e-9, 4.5e-11});
    CHECK(t.lookup(512, 8, 1) == AccessCost{3e-10, 1e-12});
    CHECK_THROWS_AS(t.lookup(1024, 32, 4), LookupError);
    CHECK_THROWS_WITH(t.lookup(1024, 32, 4), "no characterization for size=1024 block=32 assoc=4");
}

TEST_CASE("duplicate triple is an error") {
    CHECK_THROWS_AS(load_text(full_table_text(false, true), false), InputError);
}

TEST_CASE("strict load names the missing triple") {
    CHECK_THROWS_WITH_AS(load_text(full_table_text(true), true),
                         "characterization table is missing triple size=65536 block=64 assoc=128", InputError);
    CHECK(load_text(full_table_text(true), false).size() == 255);
}

TEST_CASE("malformed tables") {
    CHECK_THROWS_AS(load_text("", false), InputError);
    CHECK_THROWS_AS(load_text("size,block,assoc\n", false), ParseError);
    const std::string hdr = "size,block,assoc,access_time_s,access_energy_j\n";
    CHECK_THROWS_AS(load_text(hdr + "512,8,1,0,1e-12\n", false), InputError);
    CHECK_THROWS_AS(load_text(hdr + "512,8,1,1e-9,-1e-12\n", false), InputError);
    CHECK_THROWS_AS(load_text(hdr + "512,8,1,abc,1e-12\n", false), ParseError);
    CHECK_THROWS_AS(load_text(hdr + "512,8,1,1e-9\n", false), ParseError);
    CharTable t;
    CHECK_THROWS_AS(t.insert({512, 8, 1, 1e-9, 0}), InputError);
}

TEST_CASE("surrogate: complete, positive, monotone, in range") {
    const auto t = surrogate_generate(1);
    CHECK(t.size() == 256);
    CHECK(t.first_missing_triple().empty());
    for (auto s : kCacheSizes)
        for (auto b : kLineSizes)
            for (auto a : kAssocs) {
                const auto c = t.lookup(s, b, a);
                CHECK(c.time > 1e-10);
                CHECK(c.time < 5e-9);
                CHECK(c.energy > 1e-12);
                CHECK(c.energy < 1e-9);
                if (s < 65536) {
                    const auto bigger = t.lookup(s * 2, b, a);
                    CHECK(bigger.time > c.time);
                    CHECK(bigger.energy > c.energy);
                }
                if (a < 128) {
                    const auto wider = t.lookup(s, b, a * 2);
                    CHECK(wider.time > c.time);
                    CHECK(wider.energy > c.energy);
                }
            }
}

TEST_CASE("surrogate: seed determinism and write/load round-trip") {
    const auto a = surrogate_generate(42);
    CHECK(a.rows() == surrogate_generate(42).rows());
    CHECK_FALSE(a.rows() == surrogate_generate(43).rows());
    std::stringstream ss;
    write_table(ss, a);
    const auto back = load_table(ss, true);
    CHECK(back.rows() == a.rows());
}

TEST_CASE("energy rescaling leaves time untouched") {
    const auto a = surrogate_generate(5);
    const auto b = a.with_energy_scaled(3.0);
    const auto c0 = a.lookup(4096, 16, 2);
    const auto c1 = b.lookup(4096, 16, 2);
    CHECK(c1.time == c0.time);
    CHECK(c1.energy == doctest::Approx(3.0 * c0.energy).epsilon(1e-15));
}

TEST_CASE("DRAM defaults and overrides") {
    const DramParams d;
    CHECK(d.access_time == 3.9889e-9);
    CHECK(d.bandwidth == 6.7108864e9);
    CHECK(d.access_power == 1.051);
    CHECK(d.size_bytes == 67108864u);
    CHECK_NOTHROW(d.check());

    const auto kv = KeyValueFile::parse("[dram]\naccess_time_s = 5e-9\n# comment\naccess_power_w = 2\n");
    const auto o = dram_from_kv(kv);
    CHECK(o.access_time == 5e-9);
    CHECK(o.access_power == 2.0);
    CHECK(o.bandwidth == d.bandwidth);

    DramParams bad;
    bad.bandwidth = 0;
    CHECK_THROWS_AS(bad.check(), ValidationError);
    CHECK_THROWS_AS(dram_from_kv(KeyValueFile::parse("dram.access_time_s = fast\n")), InputError);
}

TEST_CASE("key-value file parsing") {
    const auto kv = KeyValueFile::parse("a = 1\n[ge]\npopulation = \"50\"\n; comment\nname = x y\n");
    CHECK(kv.get("a") == "1");
    CHECK(kv.get_int("ge.population") == 50);
    CHECK(kv.get("ge.name") == "x y");
    CHECK_FALSE(kv.get("missing").has_value());
    CHECK_THROWS_AS(KeyValueFile::parse("[open\n"), ParseError);
    CHECK_THROWS_AS(KeyValueFile::parse("novalue\n"), ParseError);
}
