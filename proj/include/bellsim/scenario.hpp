// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "bellsim/errors.hpp"

namespace bellsim {

// Measurement scenario: settings X, a cover M of jointly measurable contexts,
// and a finite outcome alphabet per setting. Assignments over a context are
// ranked in mixed radix with the first setting most significant, which fixes
// the row order of every table in the library and in model files.

using Assignment = std::vector<std::size_t>;  // outcome indices, aligned to a setting list

class Scenario {
  public:
    Scenario(std::vector<std::string> settings, std::vector<std::vector<std::string>> outcomes,
             std::vector<std::vector<std::size_t>> contexts)
        : settings_(std::move(settings)), outcomes_(std::move(outcomes)), contexts_(std::move(contexts)) {
        if (settings_.empty()) throw Error("scenario: no settings");
        if (outcomes_.size() != settings_.size()) throw Error("scenario: outcomes list size != settings size");
        for (const auto& alphabet : outcomes_)
            if (alphabet.empty()) throw Error("scenario: empty outcome alphabet");
        std::set<std::string> names(settings_.begin(), settings_.end());
        if (names.size() != settings_.size()) throw Error("scenario: duplicate setting labels");

        std::vector<bool> covered(settings_.size(), false);
        std::set<std::vector<std::size_t>> seen;
        for (auto& c : contexts_) {
            if (c.empty()) throw Error("scenario: empty context");
            std::sort(c.begin(), c.end());
            if (std::adjacent_find(c.begin(), c.end()) != c.end())
                throw Error("scenario: repeated setting inside a context");
            for (std::size_t s : c) {
                if (s >= settings_.size()) throw Error("scenario: context references unknown setting");
                covered[s] = true;
            }
            if (!seen.insert(c).second) throw Error("scenario: duplicate context");
        }
        for (std::size_t s = 0; s < settings_.size(); ++s)
            if (!covered[s]) throw Error("scenario: setting '" + settings_[s] + "' appears in no context");
    }

    const std::vector<std::string>& settings() const { return settings_; }
    const std::vector<std::vector<std::string>>& outcomes() const { return outcomes_; }
    const std::vector<std::vector<std::size_t>>& contexts() const { return contexts_; }

    std::size_t num_settings() const { return settings_.size(); }
    std::size_t num_contexts() const { return contexts_.size(); }
    std::size_t alphabet_size(std::size_t setting) const { return outcomes_[setting].size(); }

    std::size_t setting_index(const std::string& label) const {
        for (std::size_t i = 0; i < settings_.size(); ++i)
            if (settings_[i] == label) return i;
        throw Error("scenario: unknown setting '" + label + "'");
    }

    /// Number of assignments over a list of settings.
    std::size_t assignment_count(const std::vector<std::size_t>& over) const {
        std::size_t n = 1;
        for (std::size_t s : over) n *= alphabet_size(s);
        return n;
    }

    std::size_t context_table_size(std::size_t context) const {
        return assignment_count(contexts_.at(context));
    }

    /// |O^X|: size of the global assignment space.
    std::size_t global_size() const {
        std::size_t n = 1;
        for (std::size_t s = 0; s < settings_.size(); ++s) n *= alphabet_size(s);
        return n;
    }

    std::size_t rank(const std::vector<std::size_t>& over, const Assignment& a) const {
        std::size_t r = 0;
        for (std::size_t k = 0; k < over.size(); ++k) r = r * alphabet_size(over[k]) + a[k];
        return r;
    }

    Assignment unrank(const std::vector<std::size_t>& over, std::size_t r) const {
        Assignment a(over.size());
        for (std::size_t k = over.size(); k-- > 0;) {
            a[k] = r % alphabet_size(over[k]);
            r /= alphabet_size(over[k]);
        }
        return a;
    }

    std::vector<std::size_t> all_settings() const {
        std::vector<std::size_t> all(settings_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }

    bool operator==(const Scenario& other) const {
        return settings_ == other.settings_ && outcomes_ == other.outcomes_ && contexts_ == other.contexts_;
    }

  private:
    std::vector<std::string> settings_;
    std::vector<std::vector<std::string>> outcomes_;
    std::vector<std::vector<std::size_t>> contexts_;
};

/// Componentwise projection of an assignment over `from` onto `to` (a subset
/// of `from`). The event-presheaf restriction map.
inline Assignment restrict_assignment(const std::vector<std::size_t>& from, const Assignment& a,
                                      const std::vector<std::size_t>& to) {
    if (a.size() != from.size()) throw Error("restrict: assignment length != setting list length");
    Assignment out;
    out.reserve(to.size());
    for (std::size_t s : to) {
        auto it = std::find(from.begin(), from.end(), s);
        if (it == from.end()) throw NotSubset("restrict: target setting not contained in source context");
        out.push_back(a[static_cast<std::size_t>(it - from.begin())]);
    }
    return out;
}

/// The CHSH scenario: X = {a, a', b, b'}, contexts {a,b},{a,b'},{a',b},{a',b'},
/// outcomes {+1, -1} per setting.
inline Scenario chsh_scenario() {
    std::vector<std::string> settings{"a", "a'", "b", "b'"};
    std::vector<std::string> pm{"+1", "-1"};
    return Scenario(settings, {pm, pm, pm, pm}, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
}

}  // namespace bellsim
