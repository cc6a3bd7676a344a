#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cyclepatrol/words.hpp"

namespace cyclepatrol {

// Violation counters for the sequence lemmas over one word trajectory.
struct WordLemmaReport {
    std::size_t words = 0;
    std::size_t unsound = 0;            // prediction differs from decompose(step(w))
    std::size_t created = 0;            // a sequence of w' without predecessor, or count increased
    std::size_t speed = 0;              // a sequence moved more than one position
    std::size_t reduce = 0;             // a Reduce sequence stopped reducing or missed its l/2 deadline
    std::size_t move_taint = 0;         // Expand or opposite move after Move+ / Move-
    std::size_t minority_survivor = 0;  // minority-move or balanced tainted sequence alive at the horizon
    std::size_t no_expand_chain = 0;    // no always-Expand chain up to interlacing
    std::size_t slow_interlace = 0;     // interlacing took n_bal rounds or more
    std::size_t lost_interlace = 0;     // interlaced word stepped to a non-interlaced one
    std::size_t steady_rule = 0;        // interlaced: wrong rule (unbalanced) or not one full sequence (balanced)

    std::size_t total() const {
        return unsound + created + speed + reduce + move_taint + minority_survivor + no_expand_chain +
               slow_interlace + lost_interlace + steady_rule;
    }

    WordLemmaReport& operator+=(const WordLemmaReport& o) {
        words += o.words;
        unsound += o.unsound;
        created += o.created;
        speed += o.speed;
        reduce += o.reduce;
        move_taint += o.move_taint;
        minority_survivor += o.minority_survivor;
        no_expand_chain += o.no_expand_chain;
        slow_interlace += o.slow_interlace;
        lost_interlace += o.lost_interlace;
        steady_rule += o.steady_rule;
        return *this;
    }

    std::map<std::string, std::size_t> as_map() const {
        return {{"unsound", unsound},
                {"created", created},
                {"speed", speed},
                {"reduce", reduce},
                {"move_taint", move_taint},
                {"minority_survivor", minority_survivor},
                {"no_expand_chain", no_expand_chain},
                {"slow_interlace", slow_interlace},
                {"lost_interlace", lost_interlace},
                {"steady_rule", steady_rule}};
    }
};

namespace detail {

struct Taint {
    bool plus = false;   // has run Move+ (not as a full-cycle sequence)
    bool minus = false;  // has run Move-
    bool reduce = false;
    std::size_t reduce_deadline = 0;  // round at which it must be gone
};

}  // namespace detail

// Runs w for 3n+4 rounds and checks every lemma along the way. Full-cycle
// sequences have no neighbouring letters and are left out of rule checks.
inline WordLemmaReport check_word_lemmas(const OrientationWord& w0) {
    WordLemmaReport rep;
    rep.words = 1;
    const std::size_t n = w0.size();
    const std::size_t horizon = 3 * n + 4;
    const bool balanced = w0.balanced();
    const bool plus_major = w0.n_plus() >= w0.n_minus();

    OrientationWord w = w0;
    std::vector<detail::Taint> taint(decompose(w).size());
    // Sequences that have expanded in every round so far.
    std::vector<bool> chain(taint.size(), true);
    bool chain_alive = true;
    std::optional<std::size_t> interlaced_at;
    if (is_interlaced(w).interlaced) interlaced_at = 0;

    for (std::size_t k = 0; k < horizon; ++k) {
        OrientationWord w2 = step_word(w);
        auto tr = classify_transition(w, w2);
        if (!tr.sound) {
            ++rep.unsound;
            return rep;
        }
        if (tr.after.size() > tr.items.size()) ++rep.created;

        // Speed limit, checked on positions rather than rule spans: every
        // position of a new sequence lies within one step of a predecessor.
        std::vector<std::vector<bool>> reach(tr.after.size(), std::vector<bool>(n, false));
        for (const auto& it : tr.items) {
            if (!it.successor) continue;
            auto& m = reach[*it.successor];
            for (std::size_t o = 0; o < it.before.length; ++o) {
                const std::size_t pos = (it.before.start + o) % n;
                m[(pos + n - 1) % n] = m[pos] = m[(pos + 1) % n] = true;
            }
        }
        for (std::size_t j = 0; j < tr.after.size(); ++j)
            for (std::size_t off = 0; off < tr.after[j].length; ++off)
                if (!reach[j][(tr.after[j].start + off) % n]) {
                    ++rep.speed;
                    break;
                }

        std::vector<detail::Taint> next(tr.after.size());
        std::vector<bool> next_chain(tr.after.size(), false);
        for (std::size_t q = 0; q < tr.items.size(); ++q) {
            const auto& it = tr.items[q];
            const bool full = it.before.length == n;
            const auto& t = taint[q];
            if (!full) {
                if (t.reduce && it.rule != Rule::reduce && it.rule != Rule::disappear) ++rep.reduce;
                if (t.reduce && it.rule == Rule::disappear && k + 1 != t.reduce_deadline) ++rep.reduce;
                if (t.reduce && it.merged) ++rep.reduce;
                if (t.minus && (it.rule == Rule::expand || it.rule == Rule::move_plus)) ++rep.move_taint;
                if (t.plus && (it.rule == Rule::expand || it.rule == Rule::move_minus)) ++rep.move_taint;
            }
            if (!it.successor) continue;
            auto& nt = next[*it.successor];
            nt.plus = nt.plus || t.plus || (it.rule == Rule::move_plus && !full);
            nt.minus = nt.minus || t.minus || it.rule == Rule::move_minus;
            if (it.rule == Rule::reduce) {
                nt.reduce = true;
                nt.reduce_deadline = t.reduce ? t.reduce_deadline : k + it.before.length / 2;
            }
            if (chain[q] && it.rule == Rule::expand) next_chain[*it.successor] = true;
        }
        if (!interlaced_at) {
            bool any = false;
            for (bool c : next_chain) any = any || c;
            if (!any) chain_alive = false;
        }

        const bool was_interlaced = is_interlaced(w).interlaced;
        const bool now_interlaced = is_interlaced(w2).interlaced;
        if (was_interlaced && !now_interlaced) ++rep.lost_interlace;
        if (was_interlaced && !balanced) {
            const Rule want = plus_major ? Rule::move_plus : Rule::move_minus;
            for (const auto& it : tr.items)
                if (it.rule != want) ++rep.steady_rule;
        }
        if (!interlaced_at && now_interlaced) interlaced_at = k + 1;

        taint = std::move(next);
        chain = std::move(next_chain);
        w = w2;
    }

    if (!interlaced_at || (*interlaced_at > 0 && *interlaced_at >= w0.n_bal())) ++rep.slow_interlace;
    if (interlaced_at && *interlaced_at > 0 && !chain_alive) ++rep.no_expand_chain;
    if (balanced) {
        auto seqs = decompose(w);
        if (seqs.size() != 1 || seqs.front().length != n) ++rep.steady_rule;
    }
    // The minority move ends in Reduce; in the balanced case both do.
    for (const auto& t : taint) {
        if (plus_major && t.minus) ++rep.minority_survivor;
        if (!plus_major && t.plus) ++rep.minority_survivor;
        if (balanced && (t.plus || t.minus)) ++rep.minority_survivor;
    }
    return rep;
}

// All cyclic words of length n with both letters present, as bit masks.
template <class F>
void for_each_word(std::size_t n, F&& f) {
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t bits = 1; bits + 1 < count; ++bits) {
        std::vector<int> letters(n);
        for (std::size_t i = 0; i < n; ++i) letters[i] = (bits >> i) & 1 ? 1 : -1;
        f(OrientationWord(std::move(letters)));
    }
}

}  // namespace cyclepatrol
