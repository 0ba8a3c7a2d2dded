// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bellsim/empirical_model.hpp"

namespace bellsim {

// Self-describing text interchange format for empirical models:
//
//   bellsim-model v1
//   provenance analytic            (or: provenance sampled shots=N seed=M)
//   setting a : +1 -1
//   ...
//   context a b : 1/2 0 0 1/2
//   ...
//   end
//
// Context rows list the cell probabilities in assignment-rank order (first
// setting most significant). Probabilities are rational ("1/2") or decimal
// ("0.25", "4.2e-1") strings; both parse to exact rationals, so
// parse(print(m)) == m whenever m carries exact tables. '#' starts a comment.

namespace detail {

struct Token {
    std::string text;
    int column;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        out.push_back(Token{line.substr(start, i - start), static_cast<int>(start + 1)});
    }
    return out;
}

inline double strtod_exact(const std::string& s, int line, int col) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size()) throw ParseError("malformed number '" + s + "'", line, col);
    return v;
}

}  // namespace detail

inline void print_model(std::ostream& os, const EmpiricalModel& model) {
    const Scenario& sc = model.scenario();
    os << "bellsim-model v1\n";
    if (model.provenance() == Provenance::analytic) {
        os << "provenance analytic\n";
    } else {
        os << "provenance sampled shots=" << model.sample_info().shots
           << " seed=" << model.sample_info().seed << "\n";
    }
    for (std::size_t s = 0; s < sc.num_settings(); ++s) {
        os << "setting " << sc.settings()[s] << " :";
        for (const std::string& o : sc.outcomes()[s]) os << " " << o;
        os << "\n";
    }
    char buf[64];
    for (std::size_t c = 0; c < sc.num_contexts(); ++c) {
        os << "context";
        for (std::size_t s : sc.contexts()[c]) os << " " << sc.settings()[s];
        os << " :";
        const ContextTable& t = model.table(c);
        for (std::size_t k = 0; k < t.p.size(); ++k) {
            if (t.exact) {
                os << " " << rational_to_string((*t.exact)[k]);
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", t.p[k]);
                os << " " << buf;
            }
        }
        os << "\n";
    }
    os << "end\n";
}

inline std::string print_model(const EmpiricalModel& model) {
    std::ostringstream os;
    print_model(os, model);
    return os.str();
}

/// Parse the interchange format. Throws ParseError with a 1-based line and
/// column on malformed input.
inline EmpiricalModel parse_model(std::istream& is) {
    using detail::Token;
    std::string line;
    int lineno = 0;

    auto next_tokens = [&](std::vector<Token>& out) -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            out = detail::tokenize(line);
            if (!out.empty()) return true;
        }
        return false;
    };

    std::vector<Token> tok;
    if (!next_tokens(tok)) throw ParseError("empty document", 1, 1);
    if (tok.size() != 2 || tok[0].text != "bellsim-model" || tok[1].text != "v1")
        throw ParseError("expected header 'bellsim-model v1'", lineno, tok[0].column);

    Provenance prov = Provenance::analytic;
    SampleInfo sample;
    if (!next_tokens(tok)) throw ParseError("missing provenance line", lineno, 1);
    if (tok[0].text != "provenance")
        throw ParseError("expected 'provenance'", lineno, tok[0].column);
    if (tok.size() == 2 && tok[1].text == "analytic") {
        prov = Provenance::analytic;
    } else if (tok.size() == 4 && tok[1].text == "sampled") {
        prov = Provenance::sampled;
        for (std::size_t i = 2; i < 4; ++i) {
            const std::string& t = tok[i].text;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ParseError("expected key=value in provenance", lineno, tok[i].column);
            std::string key = t.substr(0, eq), val = t.substr(eq + 1);
            try {
                if (key == "shots")
                    sample.shots = std::stoull(val);
                else if (key == "seed")
                    sample.seed = std::stoull(val);
                else
                    throw ParseError("unknown provenance key '" + key + "'", lineno, tok[i].column);
            } catch (const std::logic_error&) {
                throw ParseError("malformed provenance value '" + val + "'", lineno, tok[i].column);
            }
        }
    } else {
        throw ParseError("expected 'analytic' or 'sampled shots=N seed=M'", lineno,
                         tok.size() > 1 ? tok[1].column : tok[0].column);
    }

    std::vector<std::string> settings;
    std::vector<std::vector<std::string>> outcomes;
    struct RawContext {
        std::vector<std::string> labels;
        std::vector<double> p;
        std::vector<Rational> exact;
        int line;
        int column;
    };
    std::vector<RawContext> raw_contexts;

    bool saw_end = false;
    while (next_tokens(tok)) {
        const std::string& kind = tok[0].text;
        if (kind == "end") {
            if (tok.size() != 1) throw ParseError("trailing tokens after 'end'", lineno, tok[1].column);
            saw_end = true;
            break;
        }
        auto colon = std::find_if(tok.begin(), tok.end(), [](const Token& t) { return t.text == ":"; });
        if (kind == "setting") {
            if (colon == tok.end() || colon - tok.begin() != 2)
                throw ParseError("expected 'setting <label> : <outcomes...>'", lineno, tok[0].column);
            if (!raw_contexts.empty())
                throw ParseError("settings must precede contexts", lineno, tok[0].column);
            settings.push_back(tok[1].text);
            std::vector<std::string> alphabet;
            for (auto it = colon + 1; it != tok.end(); ++it) alphabet.push_back(it->text);
            if (alphabet.empty()) throw ParseError("setting has no outcomes", lineno, tok[1].column);
            outcomes.push_back(std::move(alphabet));
        } else if (kind == "context") {
            if (colon == tok.end() || colon == tok.begin() + 1)
                throw ParseError("expected 'context <settings...> : <probs...>'", lineno, tok[0].column);
            RawContext rc;
            rc.line = lineno;
            rc.column = tok[0].column;
            for (auto it = tok.begin() + 1; it != colon; ++it) rc.labels.push_back(it->text);
            for (auto it = colon + 1; it != tok.end(); ++it) {
                Rational q;
                if (!parse_rational(it->text, q))
                    throw ParseError("malformed probability '" + it->text + "'", lineno, it->column);
                rc.exact.push_back(std::move(q));
                // Decimal tokens cache the strtod value so a printed double
                // survives the round trip bit for bit.
                rc.p.push_back(it->text.find('/') == std::string::npos
                                   ? detail::strtod_exact(it->text, lineno, it->column)
                                   : to_double(rc.exact.back()));
            }
            if (rc.p.empty()) throw ParseError("context has no probabilities", lineno, tok[0].column);
            raw_contexts.push_back(std::move(rc));
        } else {
            throw ParseError("unknown directive '" + kind + "'", lineno, tok[0].column);
        }
    }
    if (!saw_end) throw ParseError("missing 'end'", lineno + 1, 1);
    if (settings.empty()) throw ParseError("no settings declared", lineno, 1);
    if (raw_contexts.empty()) throw ParseError("no contexts declared", lineno, 1);

    std::vector<std::vector<std::size_t>> context_indices;
    for (const RawContext& rc : raw_contexts) {
        std::vector<std::size_t> idx;
        for (const std::string& label : rc.labels) {
            auto it = std::find(settings.begin(), settings.end(), label);
            if (it == settings.end())
                throw ParseError("context references unknown setting '" + label + "'", rc.line, rc.column);
            idx.push_back(static_cast<std::size_t>(it - settings.begin()));
        }
        context_indices.push_back(std::move(idx));
    }

    Scenario sc = [&] {
        try {
            return Scenario(settings, outcomes, context_indices);
        } catch (const Error& e) {
            throw ParseError(e.what(), raw_contexts.front().line, 1);
        }
    }();

    std::vector<ContextTable> tables;
    for (std::size_t c = 0; c < raw_contexts.size(); ++c) {
        RawContext& rc = raw_contexts[c];
        if (rc.p.size() != sc.context_table_size(c))
            throw ParseError("context expects " + std::to_string(sc.context_table_size(c)) +
                                 " probabilities, got " + std::to_string(rc.p.size()),
                             rc.line, rc.column);
        tables.push_back(ContextTable{std::move(rc.p), std::move(rc.exact)});
    }

    try {
        return EmpiricalModel(std::move(sc), std::move(tables), prov, sample);
    } catch (const Error& e) {
        throw ParseError(e.what(), raw_contexts.front().line, 1);
    }
}

inline EmpiricalModel parse_model(const std::string& text) {
    std::istringstream is(text);
    return parse_model(is);
}

}  // namespace bellsim
