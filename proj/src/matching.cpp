#include "blowup/matching.hpp"

#include <queue>
#include <stdexcept>

namespace blowup {

namespace {

constexpr std::size_t kFree = Bitset::npos;

struct HopcroftKarp {
    const BipartiteInstance& inst;
    std::vector<std::size_t> match_left, match_right, layer;

    explicit HopcroftKarp(const BipartiteInstance& instance)
        : inst(instance),
          match_left(instance.left_count, kFree),
          match_right(instance.right_count, kFree),
          layer(instance.left_count, kFree) {}

    bool bfs_layers() {
        std::queue<std::size_t> q;
        for (std::size_t l = 0; l < inst.left_count; ++l) {
            layer[l] = match_left[l] == kFree ? 0 : kFree;
            if (layer[l] == 0) q.push(l);
        }
        bool reached_free_right = false;
        while (!q.empty()) {
            std::size_t l = q.front();
            q.pop();
            inst.edges[l].for_each([&](std::size_t r) {
                std::size_t l2 = match_right[r];
                if (l2 == kFree) {
                    reached_free_right = true;
                } else if (layer[l2] == kFree) {
                    layer[l2] = layer[l] + 1;
                    q.push(l2);
                }
            });
        }
        return reached_free_right;
    }

    bool dfs_augment(std::size_t l) {
        std::size_t found = kFree;
        inst.edges[l].for_each([&](std::size_t r) {
            if (found != kFree) return;
            std::size_t l2 = match_right[r];
            if (l2 == kFree || (layer[l2] == layer[l] + 1 && dfs_augment(l2))) found = r;
        });
        if (found == kFree) {
            layer[l] = kFree; // dead end for this phase
            return false;
        }
        match_left[l] = found;
        match_right[found] = l;
        return true;
    }

    void run() {
        while (bfs_layers())
            for (std::size_t l = 0; l < inst.left_count; ++l)
                if (match_left[l] == kFree) dfs_augment(l);
    }
};

} // namespace

std::vector<std::pair<std::size_t, std::size_t>> max_matching(const BipartiteInstance& inst) {
    HopcroftKarp hk(inst);
    hk.run();
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t l = 0; l < inst.left_count; ++l)
        if (hk.match_left[l] != kFree) out.emplace_back(l, hk.match_left[l]);
    return out;
}

PerfectOrViolator perfect_or_violator(const BipartiteInstance& inst) {
    if (inst.left_count != inst.right_count)
        throw std::invalid_argument("perfect_or_violator: instance must be square");
    HopcroftKarp hk(inst);
    hk.run();

    PerfectOrViolator result;
    std::vector<std::size_t> unmatched;
    for (std::size_t l = 0; l < inst.left_count; ++l)
        if (hk.match_left[l] == kFree) unmatched.push_back(l);

    if (unmatched.empty()) {
        std::vector<std::pair<std::size_t, std::size_t>> m;
        m.reserve(inst.left_count);
        for (std::size_t l = 0; l < inst.left_count; ++l) m.emplace_back(l, hk.match_left[l]);
        result.matching = std::move(m);
        return result;
    }

    // Alternate left->right on any edge, right->left on matched edges. Every
    // reached right is matched back into S, so |N(S)| = |S| - |unmatched|.
    std::vector<char> seen_left(inst.left_count, 0), seen_right(inst.right_count, 0);
    std::queue<std::size_t> q;
    for (auto l : unmatched) {
        seen_left[l] = 1;
        q.push(l);
    }
    while (!q.empty()) {
        std::size_t l = q.front();
        q.pop();
        inst.edges[l].for_each([&](std::size_t r) {
            if (seen_right[r]) return;
            seen_right[r] = 1;
            std::size_t l2 = hk.match_right[r];
            if (l2 != kFree && !seen_left[l2]) {
                seen_left[l2] = 1;
                q.push(l2);
            }
        });
    }
    for (std::size_t l = 0; l < inst.left_count; ++l)
        if (seen_left[l]) result.violator.push_back(l);
    return result;
}

bool violator_is_valid(const BipartiteInstance& inst, const std::vector<std::size_t>& violator) {
    if (violator.empty()) return false;
    Bitset joint(inst.right_count);
    for (auto l : violator) joint |= inst.edges.at(l);
    return joint.count() < violator.size();
}

} // namespace blowup
