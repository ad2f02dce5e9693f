#include "lfir/cfg.hpp"

#include <algorithm>

namespace lf {

Cfg Cfg::build(const Function& f) {
    Cfg cfg;
    int n = static_cast<int>(f.blocks.size());
    cfg.succs.resize(n);
    cfg.preds.resize(n);
    for (int i = 0; i < n; i++) cfg.index[f.blocks[i].label] = i;
    for (int i = 0; i < n; i++) {
        const Instruction* term = f.blocks[i].terminator();
        if (!term || term->op != Opcode::Br) continue;
        for (const std::string& lbl : term->labels) {
            int t = cfg.block_of(lbl);
            if (t < 0) continue;  // validator reports unknown labels
            if (std::find(cfg.succs[i].begin(), cfg.succs[i].end(), t) ==
                cfg.succs[i].end()) {
                cfg.succs[i].push_back(t);
                cfg.preds[t].push_back(i);
            }
        }
    }
    return cfg;
}

namespace {

void post_order(const Cfg& cfg, int b, std::vector<bool>& seen, std::vector<int>& out) {
    seen[b] = true;
    for (int s : cfg.succs[b])
        if (!seen[s]) post_order(cfg, s, seen, out);
    out.push_back(b);
}

}  // namespace

std::vector<int> reverse_post_order(const Cfg& cfg) {
    if (cfg.succs.empty()) return {};
    std::vector<bool> seen(cfg.succs.size(), false);
    std::vector<int> po;
    post_order(cfg, 0, seen, po);
    std::reverse(po.begin(), po.end());
    return po;
}

std::vector<int> immediate_dominators(const Cfg& cfg, const std::vector<int>& rpo) {
    int n = static_cast<int>(cfg.succs.size());
    std::vector<int> idom(n, -1);
    if (rpo.empty()) return idom;
    std::vector<int> rpo_pos(n, -1);
    for (size_t i = 0; i < rpo.size(); i++) rpo_pos[rpo[i]] = static_cast<int>(i);
    idom[rpo[0]] = rpo[0];

    auto intersect = [&](int a, int b) {
        while (a != b) {
            while (rpo_pos[a] > rpo_pos[b]) a = idom[a];
            while (rpo_pos[b] > rpo_pos[a]) b = idom[b];
        }
        return a;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 1; i < rpo.size(); i++) {
            int b = rpo[i];
            int new_idom = -1;
            for (int p : cfg.preds[b]) {
                if (idom[p] < 0) continue;  // not yet processed or unreachable
                new_idom = (new_idom < 0) ? p : intersect(p, new_idom);
            }
            if (new_idom >= 0 && idom[b] != new_idom) {
                idom[b] = new_idom;
                changed = true;
            }
        }
    }
    return idom;
}

bool dominates(const std::vector<int>& idom, int a, int b) {
    // Walk b's dominator chain up to the entry (idom[entry] == entry).
    while (true) {
        if (b == a) return true;
        int up = idom[b];
        if (up < 0 || up == b) return b == a;
        b = up;
    }
}

std::vector<NaturalLoop> natural_loops(const Cfg& cfg, const std::vector<int>& idom) {
    std::vector<NaturalLoop> loops;
    int n = static_cast<int>(cfg.succs.size());
    for (int latch = 0; latch < n; latch++) {
        if (idom[latch] < 0) continue;
        for (int header : cfg.succs[latch]) {
            if (idom[header] < 0 || !dominates(idom, header, latch)) continue;
            NaturalLoop loop;
            loop.header = header;
            loop.latch = latch;
            loop.body.push_back(header);
            // Collect the body by walking predecessors backwards from the latch.
            std::vector<int> work;
            std::vector<bool> in_body(n, false);
            in_body[header] = true;
            if (!in_body[latch]) {
                in_body[latch] = true;
                loop.body.push_back(latch);
                work.push_back(latch);
            }
            while (!work.empty()) {
                int b = work.back();
                work.pop_back();
                for (int p : cfg.preds[b]) {
                    if (idom[p] < 0 || in_body[p]) continue;
                    in_body[p] = true;
                    loop.body.push_back(p);
                    work.push_back(p);
                }
            }
            loops.push_back(std::move(loop));
        }
    }
    // Nesting depth: +1 for each other loop that strictly contains the header.
    for (auto& a : loops) {
        for (const auto& b : loops) {
            if (&a == &b) continue;
            if (b.contains(a.header) && b.contains(a.latch) &&
                b.body.size() > a.body.size())
                a.depth++;
        }
    }
    return loops;
}

}  // namespace lf
