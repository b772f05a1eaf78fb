#include "verifai/hnsw.hpp"

#include "verifai/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace verifai {
namespace {

constexpr int kMaxLevel = 16;

struct WorseFirst {
    bool operator()(const Candidate& a, const Candidate& b) const noexcept { return a.first > b.first; }
};

struct BetterFirst {
    bool operator()(const Candidate& a, const Candidate& b) const noexcept { return a.first < b.first; }
};

} // namespace

HnswGraph::HnswGraph(HnswParams params)
    : params_(params),
      level_mult_(1.0 / std::log(static_cast<double>(std::max<std::size_t>(params.m, 2)))),
      rng_(params.seed) {
    if (params_.m < 2) {
        throw_invalid("hnsw m must be >= 2");
    }
    if (params_.ef_construction < 1 || params_.ef_search < 1) {
        throw_invalid("hnsw ef parameters must be >= 1");
    }
}

int HnswGraph::draw_level() {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = 1.0 - uniform(rng_);  // (0, 1]
    return std::min(kMaxLevel, static_cast<int>(-std::log(u) * level_mult_));
}

std::span<const std::uint32_t> HnswGraph::neighbors(std::uint32_t node, int level) const {
    const auto& levels = links_.at(node);
    if (level < 0 || static_cast<std::size_t>(level) >= levels.size()) {
        return {};
    }
    return levels[static_cast<std::size_t>(level)];
}

std::vector<Candidate> HnswGraph::search_layer(const QuerySimilarity& sim, std::vector<Candidate> entry_points,
                                               std::size_t ef, int level) const {
    std::vector<std::uint8_t> visited(links_.size(), 0);
    std::priority_queue<Candidate, std::vector<Candidate>, BetterFirst> frontier;
    std::priority_queue<Candidate, std::vector<Candidate>, WorseFirst> best;
    for (const auto& ep : entry_points) {
        if (visited[ep.second]) {
            continue;
        }
        visited[ep.second] = 1;
        frontier.push(ep);
        best.push(ep);
        if (best.size() > ef) {
            best.pop();
        }
    }
    while (!frontier.empty()) {
        const auto current = frontier.top();
        if (best.size() >= ef && current.first < best.top().first) {
            break;
        }
        frontier.pop();
        for (auto nb : neighbors(current.second, level)) {
            if (visited[nb]) {
                continue;
            }
            visited[nb] = 1;
            const float s = sim(nb);
            if (best.size() < ef || s > best.top().first) {
                frontier.emplace(s, nb);
                best.emplace(s, nb);
                if (best.size() > ef) {
                    best.pop();
                }
            }
        }
    }
    std::vector<Candidate> out;
    out.reserve(best.size());
    while (!best.empty()) {
        out.push_back(best.top());
        best.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<std::uint32_t> HnswGraph::select_neighbors(
    std::vector<Candidate> candidates, std::size_t limit,
    const std::function<float(std::uint32_t, std::uint32_t)>& sim) const {
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.first > b.first; });
    std::vector<std::uint32_t> chosen;
    std::vector<std::uint32_t> pruned;
    for (const auto& [score, id] : candidates) {
        if (chosen.size() >= limit) {
            break;
        }
        // Keep a candidate only if no already-chosen neighbor is closer to it than the base is.
        bool diverse = std::none_of(chosen.begin(), chosen.end(),
                                    [&](std::uint32_t r) { return sim(id, r) > score; });
        (diverse ? chosen : pruned).push_back(id);
    }
    for (auto id : pruned) {
        if (chosen.size() >= limit) {
            break;
        }
        chosen.push_back(id);
    }
    return chosen;
}

void HnswGraph::insert(std::uint32_t node, const PairSimilarity& sim) {
    if (node != links_.size()) {
        throw Error(ErrorKind::internal, "hnsw nodes must be inserted in order");
    }
    const int level = draw_level();
    links_.emplace_back(static_cast<std::size_t>(level) + 1);
    if (max_level_ < 0) {
        entry_ = node;
        max_level_ = level;
        return;
    }
    QuerySimilarity to_node = [&](std::uint32_t other) { return sim(node, other); };
    std::vector<Candidate> ep{{to_node(entry_), entry_}};
    for (int lc = max_level_; lc > level; --lc) {
        ep = search_layer(to_node, std::move(ep), 1, lc);
    }
    for (int lc = std::min(level, max_level_); lc >= 0; --lc) {
        auto found = search_layer(to_node, ep, params_.ef_construction, lc);
        auto chosen = select_neighbors(found, params_.m, sim);
        const auto ulc = static_cast<std::size_t>(lc);
        for (auto nb : chosen) {
            auto& list = links_[nb][ulc];
            list.push_back(node);
            if (list.size() > max_links(lc)) {
                std::vector<Candidate> pool;
                pool.reserve(list.size());
                for (auto x : list) {
                    pool.emplace_back(sim(nb, x), x);
                }
                list = select_neighbors(std::move(pool), max_links(lc), sim);
            }
        }
        links_[node][ulc] = std::move(chosen);
        ep = std::move(found);
    }
    if (level > max_level_) {
        entry_ = node;
        max_level_ = level;
    }
}

std::vector<Candidate> HnswGraph::search(const QuerySimilarity& sim, std::size_t k, std::size_t ef) const {
    if (links_.empty() || k == 0) {
        return {};
    }
    std::vector<Candidate> ep{{sim(entry_), entry_}};
    for (int lc = max_level_; lc > 0; --lc) {
        ep = search_layer(sim, std::move(ep), 1, lc);
    }
    auto found = search_layer(sim, std::move(ep), std::max(ef, k), 0);
    if (found.size() > k) {
        found.resize(k);
    }
    return found;
}

void HnswGraph::serialize(binary::Writer& w) const {
    w.put<std::uint64_t>(links_.size());
    w.put<std::uint32_t>(entry_);
    w.put<std::int32_t>(max_level_);
    for (const auto& levels : links_) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(levels.size()));
        for (const auto& list : levels) {
            w.put<std::uint32_t>(static_cast<std::uint32_t>(list.size()));
            w.put_array<std::uint32_t>(list);
        }
    }
}

HnswGraph HnswGraph::deserialize(binary::Reader& r, HnswParams params) {
    HnswGraph g(params);
    const auto n = r.get<std::uint64_t>();
    g.entry_ = r.get<std::uint32_t>();
    g.max_level_ = r.get<std::int32_t>();
    g.links_.resize(n);
    for (auto& levels : g.links_) {
        const auto n_levels = r.get<std::uint32_t>();
        if (n_levels == 0 || n_levels > kMaxLevel + 1) {
            r.fail("bad level count");
        }
        levels.resize(n_levels);
        for (auto& list : levels) {
            const auto count = r.get<std::uint32_t>();
            list.resize(count);
            for (auto& id : list) {
                id = r.get<std::uint32_t>();
                if (id >= n) {
                    r.fail("neighbor id out of range");
                }
            }
        }
    }
    if (n > 0 && (g.entry_ >= n || g.max_level_ != g.level_of(g.entry_))) {
        r.fail("bad entry point");
    }
    return g;
}

} // namespace verifai
