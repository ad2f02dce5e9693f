#pragma once

// Exhaustive branch-and-bound makespan oracle for straight-line blocks.
// Test-only: verifies that the list scheduler hits the true optimum on
// small instances. Branches cycle by cycle over maximal feasible issue
// sets; operations that consume no limited resource are issued greedily
// (provably dominant), so the tree only forks on port- or unit-limited
// choices. Lower bounds: critical path from earliest starts, and per-bank
// port saturation.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lfir/ir.hpp"
#include "lfir/schedule.hpp"

namespace lftest {

class BnbScheduler {
  public:
    BnbScheduler(const lf::Function& f, const lf::Block& b,
                 const lf::ResourceModel& r)
        : r_(r), g_(lf::build_dfg(f, b, r)) {
        n_ = g_.nodes.size();
        cls_.resize(n_);
        lat_.resize(n_);
        capped_.resize(n_);
        for (size_t v = 0; v < n_; v++) {
            cls_[v] = lf::classify(b.insts[g_.nodes[v]]);
            lat_[v] = r.latency_of(cls_[v]);
            capped_[v] = !g_.bank[v].empty() || r.units.count(cls_[v]) > 0;
        }
        ins_.resize(n_);
        for (size_t u = 0; u < n_; u++)
            for (const auto& e : g_.succs[u]) ins_[e.to].push_back({u, e.weight});
        lp_.assign(n_, 0);
        for (size_t v = n_; v-- > 0;) {
            lp_[v] = lat_[v];
            for (const auto& e : g_.succs[v])
                lp_[v] = std::max(lp_[v], e.weight + lp_[e.to]);
        }
        best_ = lf::schedule_block(f, b, r).latency;
    }

    // Optimal makespan. `expansions` (if given) reports search effort so
    // tests can assert the guard was never hit.
    int64_t solve(uint64_t budget = 50'000'000, uint64_t* expansions = nullptr) {
        budget_ = budget;
        expansions_ = 0;
        start_.assign(n_, -1);
        depth_.assign(n_, 0);
        excluded_.assign(n_, -1);
        if (n_ > 0) at_cycle(0, 0, 0);
        if (expansions) *expansions = expansions_;
        return n_ == 0 ? 0 : best_;
    }

    bool exhausted() const { return expansions_ > budget_; }

  private:
    bool eligible(size_t v, int64_t c) const {
        if (start_[v] >= 0) return false;
        for (const auto& [u, w] : ins_[v])
            if (start_[u] < 0 || start_[u] + w > c) return false;
        return true;
    }

    // Chain depth if issued at cycle c; -1 when over the limit or a
    // resource is unavailable.
    int64_t admit(size_t v, int64_t c,
                  const std::map<std::string, int64_t>& ports,
                  const std::map<lf::OpClass, int64_t>& units) const {
        if (!g_.bank[v].empty()) {
            auto it = ports.find(g_.bank[v]);
            if (it != ports.end() && it->second >= r_.ports) return -1;
        }
        auto cap = r_.units.find(cls_[v]);
        if (cap != r_.units.end()) {
            auto it = units.find(cls_[v]);
            if (it != units.end() && it->second >= cap->second) return -1;
        }
        int64_t d = 0;
        if (r_.chainable(cls_[v])) {
            d = 1;
            for (const auto& [u, w] : ins_[v])
                if (start_[u] == c && r_.chainable(cls_[u]))
                    d = std::max(d, depth_[u] + 1);
            if (d > r_.chain_depth) return -1;
        }
        return d;
    }

    void at_cycle(int64_t c, size_t placed, int64_t completion) {
        if (placed == n_) {
            best_ = std::min(best_, completion);
            return;
        }
        if (++expansions_ > budget_) return;
        // Lower bound: forward earliest starts for the unplaced suffix.
        std::vector<int64_t> est(n_, 0);
        int64_t lb = completion;
        for (size_t v = 0; v < n_; v++) {
            if (start_[v] >= 0) continue;
            est[v] = c;
            for (const auto& [u, w] : ins_[v])
                est[v] = std::max(est[v],
                                  (start_[u] >= 0 ? start_[u] : est[u]) + w);
            lb = std::max(lb, est[v] + lp_[v]);
        }
        struct BankLoad {
            int64_t count = 0;
            int64_t emin = std::numeric_limits<int64_t>::max();
            int64_t lmin = std::numeric_limits<int64_t>::max();
        };
        std::map<std::string, BankLoad> banks;
        for (size_t v = 0; v < n_; v++) {
            if (start_[v] >= 0 || g_.bank[v].empty()) continue;
            BankLoad& bl = banks[g_.bank[v]];
            bl.count++;
            bl.emin = std::min(bl.emin, est[v]);
            bl.lmin = std::min(bl.lmin, lat_[v]);
        }
        for (const auto& [name, bl] : banks)
            lb = std::max(lb, bl.emin + (bl.count + r_.ports - 1) / r_.ports -
                                  1 + bl.lmin);
        if (lb >= best_) return;
        std::map<std::string, int64_t> ports;
        std::map<lf::OpClass, int64_t> units;
        subset(c, 0, placed, completion, ports, units);
    }

    // Greedily issue every eligible op that consumes no limited resource:
    // issuing such an op at the earliest cycle never hurts. Returns the
    // issued ops for undo.
    std::vector<size_t> issue_free(int64_t c, size_t& placed,
                                   int64_t& completion,
                                   const std::map<std::string, int64_t>& ports,
                                   const std::map<lf::OpClass, int64_t>& units) {
        std::vector<size_t> done;
        bool again = true;
        while (again) {
            again = false;
            for (size_t v = 0; v < n_; v++) {
                if (capped_[v] || !eligible(v, c)) continue;
                int64_t d = admit(v, c, ports, units);
                if (d < 0) continue;
                start_[v] = c;
                depth_[v] = d;
                placed++;
                completion = std::max(completion, c + lat_[v]);
                done.push_back(v);
                again = true;
            }
        }
        return done;
    }

    void subset(int64_t c, size_t from, size_t placed, int64_t completion,
                std::map<std::string, int64_t>& ports,
                std::map<lf::OpClass, int64_t>& units) {
        if (expansions_ > budget_) return;
        std::vector<size_t> freed = issue_free(c, placed, completion, ports, units);
        size_t pick = n_;
        for (size_t v = from; v < n_; v++)
            if (capped_[v] && eligible(v, c) && admit(v, c, ports, units) >= 0) {
                pick = v;
                break;
            }
        if (pick == n_) {
            // Subset closed. A candidate that was explicitly passed over
            // this cycle but is still addable makes this closure non-maximal
            // (its include branch explored the superset): prune. A candidate
            // that became addable only after later placements was never
            // branched on: branch on it now.
            bool dominated = false;
            size_t missed = n_;
            for (size_t v = 0; v < from && !dominated; v++) {
                if (!capped_[v] || !eligible(v, c) ||
                    admit(v, c, ports, units) < 0)
                    continue;
                if (excluded_[v] == c) dominated = true;
                else if (missed == n_) missed = v;
            }
            if (dominated) {
                // fall through to undo
            } else if (missed < n_) {
                subset(c, missed, placed, completion, ports, units);
            } else if (placed < n_) {
                int64_t nc = std::numeric_limits<int64_t>::max();
                for (size_t v = 0; v < n_; v++) {
                    if (start_[v] >= 0) continue;
                    bool ready = true;
                    int64_t e = 0;
                    for (const auto& [u, w] : ins_[v]) {
                        if (start_[u] < 0) {
                            ready = false;
                            break;
                        }
                        e = std::max(e, start_[u] + w);
                    }
                    if (ready) nc = std::min(nc, e);
                }
                nc = std::max(nc, c + 1);
                at_cycle(nc, placed, completion);
            } else {
                best_ = std::min(best_, completion);
            }
        } else {
            int64_t d = admit(pick, c, ports, units);
            start_[pick] = c;
            depth_[pick] = d;
            if (!g_.bank[pick].empty()) ports[g_.bank[pick]]++;
            units[cls_[pick]]++;
            subset(c, pick + 1, placed + 1,
                   std::max(completion, c + lat_[pick]), ports, units);
            if (!g_.bank[pick].empty()) ports[g_.bank[pick]]--;
            units[cls_[pick]]--;
            start_[pick] = -1;
            depth_[pick] = 0;
            int64_t prev = excluded_[pick];
            excluded_[pick] = c;
            subset(c, pick + 1, placed, completion, ports, units);
            excluded_[pick] = prev;
        }
        for (size_t v : freed) {
            start_[v] = -1;
            depth_[v] = 0;
        }
    }

    const lf::ResourceModel& r_;
    lf::DepGraph g_;
    size_t n_ = 0;
    std::vector<lf::OpClass> cls_;
    std::vector<int64_t> lat_, lp_;
    std::vector<bool> capped_;
    std::vector<std::vector<std::pair<size_t, int64_t>>> ins_;
    std::vector<int64_t> start_, depth_, excluded_;
    int64_t best_ = 0;
    uint64_t budget_ = 0, expansions_ = 0;
};

inline int64_t bnb_optimal_makespan(const lf::Function& f, const lf::Block& b,
                                    const lf::ResourceModel& r,
                                    uint64_t* expansions = nullptr,
                                    bool* exhausted = nullptr) {
    BnbScheduler s(f, b, r);
    int64_t got = s.solve(50'000'000, expansions);
    if (exhausted) *exhausted = s.exhausted();
    return got;
}

}  // namespace lftest
