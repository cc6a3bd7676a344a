#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cyclepatrol/errors.hpp"

namespace cyclepatrol {

// Cyclic word over {+1, -1}; letter i is the orientation of robot i.
class OrientationWord {
public:
    OrientationWord() = default;
    explicit OrientationWord(std::vector<int> letters) : letters_(std::move(letters)) {
        for (int c : letters_)
            if (c != 1 && c != -1) throw ValidationError("input", "orientation letters must be +1 or -1");
    }

    // Accepts '+', '-' and the unicode minus sign.
    static OrientationWord parse(std::string_view s) {
        std::vector<int> out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '+') {
                out.push_back(1);
            } else if (s[i] == '-') {
                out.push_back(-1);
            } else if (s.substr(i, 3) == "\xE2\x88\x92") {
                out.push_back(-1);
                i += 2;
            } else {
                throw ValidationError("input", "bad orientation letter in '" + std::string(s) + "'");
            }
        }
        return OrientationWord(std::move(out));
    }

    std::string str() const {
        std::string s;
        for (int c : letters_) s.push_back(c > 0 ? '+' : '-');
        return s;
    }

    std::size_t size() const { return letters_.size(); }
    int operator[](std::size_t i) const { return letters_[i % letters_.size()]; }
    int& operator[](std::size_t i) { return letters_[i % letters_.size()]; }
    const std::vector<int>& letters() const { return letters_; }

    std::size_t n_plus() const { return std::count(letters_.begin(), letters_.end(), 1); }
    std::size_t n_minus() const { return letters_.size() - n_plus(); }
    std::size_t n_bal() const { return std::min(n_plus(), n_minus()); }
    bool balanced() const { return n_plus() == n_minus(); }

    bool operator==(const OrientationWord&) const = default;

private:
    std::vector<int> letters_;
};

// Indices i with w[i] = + and w[i+1] = - (cyclic). Such pairs never overlap.
inline std::vector<std::size_t> pair_starts(const OrientationWord& w) {
    std::vector<std::size_t> out;
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i)
        if (w[i] == 1 && w[(i + 1) % n] == -1) out.push_back(i);
    return out;
}

inline OrientationWord step_word(const OrientationWord& w) {
    if (w.n_bal() == 0) throw ValidationError("A2", "orientation word has a single letter kind");
    OrientationWord out = w;
    for (auto i : pair_starts(w)) {
        out[i] = -1;
        out[i + 1] = 1;
    }
    return out;
}

struct Interlacing {
    bool interlaced = false;
    std::vector<std::size_t> witness;  // pair starts, 0-based
};

inline Interlacing is_interlaced(const OrientationWord& w) {
    if (w.n_bal() == 0) throw ValidationError("A2", "orientation word has a single letter kind");
    Interlacing r;
    r.witness = pair_starts(w);
    r.interlaced = r.witness.size() == w.n_bal();
    return r;
}

struct Sequence {
    std::size_t start = 0;  // 0-based, may wrap the seam
    std::size_t length = 0;
    bool operator==(const Sequence&) const = default;
};

// Maximal chains of back-to-back "+-" pairs. A chain that closes on itself is
// one sequence of length n starting at the smallest pair start.
inline std::vector<Sequence> decompose(const OrientationWord& w) {
    const std::size_t n = w.size();
    auto starts = pair_starts(w);
    std::vector<bool> is_start(n, false);
    for (auto i : starts) is_start[i] = true;
    std::vector<Sequence> out;
    for (auto s : starts) {
        if (is_start[(s + n - 2) % n] && n > 2) continue;
        std::size_t len = 0, i = s;
        while (is_start[i] && len < n) {
            len += 2;
            i = (i + 2) % n;
        }
        out.push_back({s, len});
    }
    if (out.empty() && !starts.empty()) out.push_back({starts.front(), n});
    return out;
}

// Positions not covered by any sequence.
inline std::vector<std::size_t> free_letters(const OrientationWord& w) {
    std::vector<bool> covered(w.size(), false);
    for (const auto& s : decompose(w))
        for (std::size_t k = 0; k < s.length; ++k) covered[(s.start + k) % w.size()] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!covered[i]) out.push_back(i);
    return out;
}

enum class Rule { move_plus, move_minus, expand, reduce, disappear };

inline const char* to_string(Rule r) {
    switch (r) {
        case Rule::move_plus: return "Move+";
        case Rule::move_minus: return "Move-";
        case Rule::expand: return "Expand";
        case Rule::reduce: return "Reduce";
        case Rule::disappear: return "Disappear";
    }
    return "?";
}

struct SequenceTransition {
    Sequence before;
    Rule rule = Rule::move_plus;
    Sequence predicted;                 // own span after the rule, before merging
    bool merged = false;                // shares its successor with another sequence
    std::optional<std::size_t> successor;  // index into decompose(w')
};

struct TransitionReport {
    std::vector<SequenceTransition> items;
    std::vector<Sequence> after;  // decompose(w')
    bool sound = true;
    std::string diagnostic;
};

namespace detail {

inline std::vector<bool> span_mask(std::size_t n, const Sequence& s) {
    std::vector<bool> m(n, false);
    for (std::size_t k = 0; k < s.length; ++k) m[(s.start + k) % n] = true;
    return m;
}

}  // namespace detail

// Labels every sequence of w by its neighbouring letters, predicts the spans
// of w', merges touching spans and compares the result with decompose(w').
inline TransitionReport classify_transition(const OrientationWord& w, const OrientationWord& w2) {
    const std::size_t n = w.size();
    if (w2.size() != n) throw ValidationError("input", "words differ in length");
    TransitionReport rep;
    rep.after = decompose(w2);
    for (const auto& s : decompose(w)) {
        SequenceTransition t;
        t.before = s;
        if (s.length == n) {
            t.rule = Rule::move_plus;
            t.predicted = {(s.start + n - 1) % n, n};
        } else {
            const int left = w[(s.start + n - 1) % n];
            const int right = w[(s.start + s.length) % n];
            if (left == 1 && right == 1) {
                t.rule = Rule::move_plus;
                t.predicted = {(s.start + n - 1) % n, s.length};
            } else if (left == -1 && right == -1) {
                t.rule = Rule::move_minus;
                t.predicted = {(s.start + 1) % n, s.length};
            } else if (left == 1 && right == -1) {
                t.rule = Rule::expand;
                t.predicted = {(s.start + n - 1) % n, s.length + 2};
            } else if (s.length == 2) {
                t.rule = Rule::disappear;
                t.predicted = {s.start, 0};
            } else {
                t.rule = Rule::reduce;
                t.predicted = {(s.start + 1) % n, s.length - 2};
            }
        }
        rep.items.push_back(t);
    }

    // Groups of item indices whose predicted spans touch, in cyclic order.
    std::vector<std::size_t> live;
    for (std::size_t q = 0; q < rep.items.size(); ++q)
        if (rep.items[q].predicted.length > 0) live.push_back(q);
    std::sort(live.begin(), live.end(),
              [&](auto a, auto b) { return rep.items[a].predicted.start < rep.items[b].predicted.start; });
    std::vector<std::vector<std::size_t>> groups;
    for (auto q : live) groups.push_back({q});
    auto group_span = [&](const std::vector<std::size_t>& g) {
        Sequence s{rep.items[g.front()].predicted.start, 0};
        for (auto q : g) s.length += rep.items[q].predicted.length;
        return s;
    };
    bool changed = true;
    while (changed && groups.size() > 1) {
        changed = false;
        for (std::size_t a = 0; a < groups.size(); ++a) {
            std::size_t b = (a + 1) % groups.size();
            Sequence sa = group_span(groups[a]);
            if ((sa.start + sa.length) % n != rep.items[groups[b].front()].predicted.start) continue;
            groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
            groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(b));
            changed = true;
            break;
        }
    }

    std::vector<bool> matched(rep.after.size(), false);
    for (const auto& g : groups) {
        Sequence span = group_span(g);
        if (span.length > n) {
            rep.sound = false;
            rep.diagnostic += "predicted span longer than the word; ";
            continue;
        }
        auto mask = detail::span_mask(n, span);
        std::optional<std::size_t> hit;
        for (std::size_t j = 0; j < rep.after.size(); ++j)
            if (detail::span_mask(n, rep.after[j]) == mask) hit = j;
        if (!hit) {
            rep.sound = false;
            rep.diagnostic += "unmatchable span at " + std::to_string(span.start) + " length " +
                              std::to_string(span.length) + "; ";
            continue;
        }
        matched[*hit] = true;
        for (auto q : g) {
            rep.items[q].successor = hit;
            rep.items[q].merged = g.size() > 1;
        }
    }
    for (std::size_t j = 0; j < rep.after.size(); ++j)
        if (!matched[j]) {
            rep.sound = false;
            rep.diagnostic += "sequence at " + std::to_string(rep.after[j].start) + " has no predecessor; ";
        }
    return rep;
}

struct HistoryRow {
    std::size_t round = 0;
    std::size_t sequence_id = 0;
    std::size_t length = 0;
};

struct Evolution {
    std::size_t rounds = 0;
    bool interlaced = false;
    std::vector<OrientationWord> trajectory;
    std::vector<HistoryRow> history;
    std::string diagnostic;
};

// Steps the word until it is interlaced. Sequence ids follow the survivor of
// each merge: the Expand member if any, else the longest, else the lowest id.
inline Evolution evolve_until_interlaced(const OrientationWord& w0, std::optional<std::size_t> max_rounds = {}) {
    if (w0.n_bal() == 0) throw ValidationError("A2", "orientation word has a single letter kind");
    const std::size_t cap = max_rounds.value_or(w0.size());
    Evolution ev;
    OrientationWord w = w0;
    ev.trajectory.push_back(w);
    std::vector<std::size_t> ids;
    std::size_t next_id = 1;
    for (const auto& s : decompose(w)) {
        ids.push_back(next_id++);
        ev.history.push_back({0, ids.back(), s.length});
    }
    for (std::size_t k = 0;; ++k) {
        if (is_interlaced(w).interlaced) {
            ev.interlaced = true;
            ev.rounds = k;
            return ev;
        }
        if (k >= cap) {
            ev.rounds = k;
            ev.diagnostic = "not interlaced after " + std::to_string(k) + " rounds";
            return ev;
        }
        OrientationWord w2 = step_word(w);
        auto rep = classify_transition(w, w2);
        if (!rep.sound) {
            ev.rounds = k;
            ev.diagnostic = rep.diagnostic;
            return ev;
        }
        std::vector<std::optional<std::size_t>> owner(rep.after.size());
        for (std::size_t q = 0; q < rep.items.size(); ++q) {
            const auto& it = rep.items[q];
            if (!it.successor) continue;
            auto& o = owner[*it.successor];
            if (!o) {
                o = q;
                continue;
            }
            const auto& cur = rep.items[*o];
            const bool ie = it.rule == Rule::expand, ce = cur.rule == Rule::expand;
            bool better;
            if (ie != ce) better = ie;
            else if (it.predicted.length != cur.predicted.length) better = it.predicted.length > cur.predicted.length;
            else better = ids[q] < ids[*o];
            if (better) o = q;
        }
        std::vector<std::size_t> new_ids(rep.after.size());
        for (std::size_t j = 0; j < rep.after.size(); ++j) new_ids[j] = ids[*owner[j]];
        const std::size_t mark = ev.history.size();
        for (std::size_t q = 0; q < rep.items.size(); ++q) {
            const auto& it = rep.items[q];
            const bool survives = it.successor && *owner[*it.successor] == q;
            if (!survives) ev.history.push_back({k + 1, ids[q], 0});
        }
        for (std::size_t j = 0; j < rep.after.size(); ++j)
            ev.history.push_back({k + 1, new_ids[j], rep.after[j].length});
        std::sort(ev.history.begin() + static_cast<std::ptrdiff_t>(mark), ev.history.end(),
                  [](const HistoryRow& a, const HistoryRow& b) { return a.sequence_id < b.sequence_id; });
        ids = std::move(new_ids);
        w = w2;
        ev.trajectory.push_back(w);
    }
}

}  // namespace cyclepatrol
