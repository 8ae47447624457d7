#include "cachege/grammar.hpp"

#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "cachege/error.hpp"

namespace cachege {

Grammar::Grammar(std::vector<Rule> rules, std::string start) : rules_(std::move(rules)), start_(std::move(start)) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (!index_.emplace(rules_[i].lhs, i).second) throw InputError("duplicate rule for " + rules_[i].lhs);
        if (rules_[i].alternatives.empty()) throw InputError("rule " + rules_[i].lhs + " has no alternatives");
    }
    if (!index_.contains(start_)) throw InputError("missing start symbol " + start_);
    for (const auto& r : rules_)
        for (const auto& alt : r.alternatives)
            for (const auto& s : alt)
                if (s.nonterminal && !index_.contains(s.text)) throw InputError("undefined nonterminal " + s.text);
}

const Rule& Grammar::rule(std::string_view nonterminal) const {
    const auto it = index_.find(nonterminal);
    if (it == index_.end()) throw InputError(fmt::format("undefined nonterminal {}", nonterminal));
    return rules_[it->second];
}

std::vector<std::string> Grammar::nonterminals() const {
    std::vector<std::string> out;
    for (const auto& r : rules_) out.push_back(r.lhs);
    return out;
}

std::vector<std::string> Grammar::terminals() const {
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& r : rules_)
        for (const auto& alt : r.alternatives)
            for (const auto& s : alt)
                if (!s.nonterminal && seen.insert(s.text).second) out.push_back(s.text);
    return out;
}

std::uint64_t Grammar::count_derivations() const {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::map<std::string, std::uint64_t, std::less<>> memo;
    std::set<std::string, std::less<>> active;
    std::function<std::uint64_t(const std::string&)> count = [&](const std::string& nt) -> std::uint64_t {
        if (auto it = memo.find(nt); it != memo.end()) return it->second;
        if (!active.insert(nt).second) throw InputError("grammar is recursive through " + nt);
        std::uint64_t total = 0;
        for (const auto& alt : rule(nt).alternatives) {
            std::uint64_t product = 1;
            for (const auto& s : alt) {
                if (!s.nonterminal) continue;
                const auto c = count(s.text);
                if (c != 0 && product > kMax / c) throw InputError("derivation count overflows 64 bits");
                product *= c;
            }
            if (total > kMax - product) throw InputError("derivation count overflows 64 bits");
            total += product;
        }
        active.erase(nt);
        memo.emplace(nt, total);
        return total;
    };
    return count(start_);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

bool is_nonterminal_token(std::string_view t) { return t.size() >= 3 && t.front() == '<' && t.back() == '>'; }

Alternative tokenize(std::string_view text) {
    Alternative out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) out.push_back({tok, is_nonterminal_token(tok)});
    return out;
}

struct PendingRule {
    std::string lhs;
    std::string rhs;
    std::size_t line = 0;
};

}  // namespace

Grammar parse_bnf(std::string_view text) {
    std::vector<PendingRule> pending;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto def = line.find("::=");
        if (def == std::string_view::npos) {
            if (pending.empty()) throw ParseError("text before the first rule", line_no);
            pending.back().rhs += ' ';
            pending.back().rhs += line;
            continue;
        }
        const auto lhs = trim(line.substr(0, def));
        if (!is_nonterminal_token(lhs) || lhs.find_first_of(" \t") != std::string_view::npos)
            throw ParseError(fmt::format("left-hand side '{}' is not a <nonterminal>", lhs), line_no);
        pending.push_back({std::string(lhs), std::string(line.substr(def + 3)), line_no});
    }
    if (pending.empty()) throw InputError("missing start symbol: grammar has no rules");

    std::vector<Rule> rules;
    std::set<std::string, std::less<>> defined;
    for (const auto& p : pending) {
        if (!defined.insert(p.lhs).second) throw ParseError("duplicate rule for " + p.lhs, p.line);
        Rule r{p.lhs, {}};
        std::string_view rhs = p.rhs;
        std::size_t start = 0;
        while (true) {
            const auto bar = rhs.find('|', start);
            const auto piece = rhs.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
            auto alt = tokenize(piece);
            if (alt.empty()) throw ParseError("empty alternative in rule " + p.lhs, p.line);
            r.alternatives.push_back(std::move(alt));
            if (bar == std::string_view::npos) break;
            start = bar + 1;
        }
        rules.push_back(std::move(r));
    }
    for (const auto& p : pending) {
        for (const auto& alt : rules[&p - pending.data()].alternatives)
            for (const auto& s : alt)
                if (s.nonterminal && !defined.contains(s.text))
                    throw ParseError("undefined nonterminal " + s.text, p.line);
    }
    auto start = rules.front().lhs;
    return Grammar(std::move(rules), std::move(start));
}

Grammar load_bnf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open grammar file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_bnf(ss.str());
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string_view default_grammar_text() {
    static constexpr std::string_view kText =
        "<DineroParams> ::= -l1-isize <CacheSizeB>\n"
        "                   -l1-ibsize <LineSizeB>\n"
        "                   -l1-irepl <ReplAlg>\n"
        "                   -l1-iassoc <Assoc>\n"
        "                   -l1-ifetch <PrefAlg>\n"
        "                   -l1-dsize <CacheSizeB>\n"
        "                   -l1-dbsize <LineSizeB>\n"
        "                   -l1-drepl <ReplAlg>\n"
        "                   -l1-dassoc <Assoc>\n"
        "                   -l1-dfetch <PrefAlg>\n"
        "                   -l1-dwback <WritePol>\n"
        "<CacheSizeB> ::= 512 | 1024 | 2048 | 4096\n"
        "               | 8192 | 16384 | 32768\n"
        "               | 65536\n"
        "<LineSizeB> ::= 8 | 16 | 32 | 64\n"
        "<ReplAlg> ::= l | f | r\n"
        "<Assoc> ::= 1 | 2 | 4 | 8 | 16 | 32 | 64\n"
        "          | 128\n"
        "<PrefAlg> ::= m | d | a\n"
        "<WritePol> ::= a | n\n";
    return kText;
}

const Grammar& default_grammar() {
    static const Grammar g = parse_bnf(default_grammar_text());
    return g;
}

MapResult map_genotype(std::span<const Codon> genotype, const Grammar& grammar, int max_wraps) {
    MapResult result;
    std::vector<const Symbol*> stack;  // top is back()
    std::vector<std::string_view> out;
    std::size_t next = 0;
    bool failed = false;

    auto push_alternative = [&](const Alternative& alt) {
        for (auto it = alt.rbegin(); it != alt.rend(); ++it) stack.push_back(&*it);
    };
    auto expand = [&](const std::string& nt) {
        const auto& rule = grammar.rule(nt);
        if (genotype.empty()) {
            failed = true;
            return;
        }
        if (next == genotype.size()) {
            if (result.wraps >= max_wraps) {
                failed = true;
                return;
            }
            ++result.wraps;
            next = 0;
        }
        const Codon c = genotype[next];
        const std::size_t k = rule.alternatives.size();
        const std::size_t choice = c % k;
        result.steps.push_back({nt, next, c, k, choice, result.wraps});
        ++next;
        push_alternative(rule.alternatives[choice]);
    };

    const auto& start = grammar.rule(grammar.start());
    if (start.alternatives.size() == 1)
        push_alternative(start.alternatives.front());
    else
        expand(grammar.start());

    while (!failed && !stack.empty()) {
        const Symbol* s = stack.back();
        stack.pop_back();
        if (s->nonterminal)
            expand(s->text);
        else
            out.push_back(s->text);
    }
    if (failed) return result;

    std::string text;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i) text += ' ';
        text += out[i];
    }
    result.phenotype = std::move(text);
    return result;
}

CacheConfig phenotype_to_config(std::string_view phenotype) { return parse_flags(phenotype); }

std::string memo_key(std::string_view phenotype) {
    try {
        return render_flags(parse_flags(phenotype));
    } catch (const InputError&) {
        std::istringstream in{std::string(phenotype)};
        std::string tok, key;
        while (in >> tok) {
            if (!key.empty()) key += ' ';
            key += tok;
        }
        return key;
    }
}

}  // namespace cachege
