#pragma once

#include <unordered_map>
#include <vector>

#include "lfir/ir.hpp"

namespace lf {

/// Block-level control-flow view of a function. Indices are positions in
/// Function::blocks; successor/predecessor lists hold unique block indices.
struct Cfg {
    std::vector<std::vector<int>> succs;
    std::vector<std::vector<int>> preds;
    std::unordered_map<std::string, int> index;  // label -> block index

    static Cfg build(const Function& f);

    int block_of(const std::string& label) const {
        auto it = index.find(label);
        return it == index.end() ? -1 : it->second;
    }
};

/// Reverse post-order over the blocks reachable from block 0.
std::vector<int> reverse_post_order(const Cfg& cfg);

/// Immediate dominators, Cooper-Harvey-Kennedy style. idom[entry] == entry;
/// unreachable blocks get -1.
std::vector<int> immediate_dominators(const Cfg& cfg, const std::vector<int>& rpo);

/// True when a dominates b (reflexive). Both must be reachable.
bool dominates(const std::vector<int>& idom, int a, int b);

/// A natural loop found from a back edge latch -> header.
struct NaturalLoop {
    int header = -1;
    int latch = -1;
    std::vector<int> body;  // member blocks, header first
    int depth = 1;          // 1 = outermost

    bool contains(int b) const {
        for (int x : body)
            if (x == b) return true;
        return false;
    }
};

/// All natural loops of the function, one per back edge. `depth` counts
/// how many other discovered loops strictly contain the header.
std::vector<NaturalLoop> natural_loops(const Cfg& cfg, const std::vector<int>& idom);

}  // namespace lf
