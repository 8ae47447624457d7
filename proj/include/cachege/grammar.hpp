#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cachege/cache_config.hpp"

namespace cachege {

struct Symbol {
    std::string text;
    bool nonterminal = false;

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

using Alternative = std::vector<Symbol>;

struct Rule {
    std::string lhs;
    std::vector<Alternative> alternatives;
};

/// A BNF grammar {N, T, S, P}. Alternative order is significant: the mapping
/// picks alternatives by index.
class Grammar {
public:
    Grammar(std::vector<Rule> rules, std::string start);

    const std::vector<Rule>& rules() const { return rules_; }
    const Rule& rule(std::string_view nonterminal) const;
    const std::string& start() const { return start_; }
    std::vector<std::string> nonterminals() const;
    std::vector<std::string> terminals() const;

    /// Number of distinct derivations from the start symbol. Throws
    /// InputError for recursive grammars or on overflow.
    std::uint64_t count_derivations() const;

private:
    std::vector<Rule> rules_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::string start_;
};

/// Parses "<lhs> ::= a b | c" rules. A rule may continue over following lines
/// until the next "::=". The first rule's left-hand side is the start symbol.
/// Lines starting with '#' are comments.
Grammar parse_bnf(std::string_view text);
Grammar load_bnf_file(const std::string& path);

/// The shipped cache grammar: one start rule with the 11 Dinero flags in
/// canonical order, then sizes, line sizes, replacement, associativity,
/// prefetch and write policy alternatives.
std::string_view default_grammar_text();
const Grammar& default_grammar();

using Codon = std::uint8_t;
using Genotype = std::vector<Codon>;

struct DecodeStep {
    std::string nonterminal;
    std::size_t codon_index = 0;
    Codon codon = 0;
    std::size_t alternatives = 0;
    std::size_t choice = 0;
    int wrap = 0;  // wraps completed before this codon was read
};

struct MapResult {
    std::optional<std::string> phenotype;  // absent when the wrap limit was hit
    std::vector<DecodeStep> steps;
    int wraps = 0;

    bool ok() const { return phenotype.has_value(); }
};

/// Leftmost derivation from the start symbol. Each nonterminal expansion reads
/// the next codon c and takes alternative c mod k; after the last codon the
/// reading wraps to codon 0, at most max_wraps times. The opening expansion of
/// a single-alternative start symbol reads no codon.
MapResult map_genotype(std::span<const Codon> genotype, const Grammar& grammar, int max_wraps);

/// Flag text to config; see parse_flags.
CacheConfig phenotype_to_config(std::string_view phenotype);

/// Canonical memo key: rendered in rule-I flag order when the text parses as a
/// full config, whitespace-normalized text otherwise.
std::string memo_key(std::string_view phenotype);

}  // namespace cachege
