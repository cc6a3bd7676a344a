#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include "cyclepatrol/errors.hpp"

namespace cyclepatrol {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Task {
    int id = 0;
    Point2 pos;
};

struct TaskSet {
    std::vector<Task> tasks;
};

// Closed walk through the tasks. Edge s joins waypoint s to s+1; the last
// edge closes back to waypoint 0.
struct CycleGraph {
    std::vector<Point2> waypoints;
    std::vector<int> task_ids;
    std::vector<double> cumulative_lengths;
    double total_length = 0.0;
};

inline void validate_tasks(const TaskSet& ts) {
    if (ts.tasks.empty()) throw ValidationError("input", "task set is empty");
    std::set<int> ids;
    for (const auto& t : ts.tasks) {
        if (!ids.insert(t.id).second)
            throw ValidationError("input", "duplicate task id " + std::to_string(t.id));
        if (!std::isfinite(t.pos.x) || !std::isfinite(t.pos.y))
            throw ValidationError("input", "task " + std::to_string(t.id) + " has a non-finite coordinate");
    }
}

inline CycleGraph make_cycle(const TaskSet& ts, const std::vector<std::size_t>& order) {
    CycleGraph g;
    double acc = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Task& t = ts.tasks[order[k]];
        if (k > 0) acc += distance(g.waypoints.back(), t.pos);
        g.waypoints.push_back(t.pos);
        g.task_ids.push_back(t.id);
        g.cumulative_lengths.push_back(acc);
    }
    g.total_length = acc + distance(g.waypoints.back(), g.waypoints.front());
    return g;
}

namespace detail {

// Task indices sorted by id.
inline std::vector<std::size_t> by_id(const TaskSet& ts) {
    std::vector<std::size_t> idx(ts.tasks.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return ts.tasks[a].id < ts.tasks[b].id; });
    return idx;
}

}  // namespace detail

struct MstEdge {
    std::size_t a;  // task index
    std::size_t b;
    double weight;
};

// Kruskal over the complete Euclidean graph; ties in weight go to the
// lexicographically smaller (id, id) pair.
inline std::vector<MstEdge> euclidean_mst(const TaskSet& ts) {
    validate_tasks(ts);
    const std::size_t m = ts.tasks.size();
    std::vector<std::tuple<double, int, int, std::size_t, std::size_t>> edges;
    edges.reserve(m * (m - 1) / 2);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            int ia = ts.tasks[a].id, ib = ts.tasks[b].id;
            auto [lo, hi] = std::minmax(ia, ib);
            edges.emplace_back(distance(ts.tasks[a].pos, ts.tasks[b].pos), lo, hi, a, b);
        }
    std::sort(edges.begin(), edges.end());
    std::vector<std::size_t> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<MstEdge> out;
    for (const auto& [w, lo, hi, a, b] : edges) {
        auto ra = find(a), rb = find(b);
        if (ra == rb) continue;
        parent[ra] = rb;
        out.push_back({a, b, w});
        if (out.size() + 1 == m) break;
    }
    return out;
}

// Depth-first walk of the MST with every edge doubled, rooted at the lowest
// id and visiting children in ascending id.
inline CycleGraph build_tour_mst(const TaskSet& ts) {
    auto mst = euclidean_mst(ts);
    const std::size_t m = ts.tasks.size();
    std::vector<std::vector<std::size_t>> adj(m);
    for (const auto& e : mst) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    for (auto& nb : adj)
        std::sort(nb.begin(), nb.end(), [&](auto a, auto b) { return ts.tasks[a].id < ts.tasks[b].id; });

    const std::size_t root = detail::by_id(ts).front();
    std::vector<std::size_t> walk{root};
    std::vector<bool> seen(m, false);
    seen[root] = true;
    // (vertex, next child position)
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
        auto& [u, k] = stack.back();
        if (k < adj[u].size()) {
            std::size_t c = adj[u][k++];
            if (seen[c]) continue;
            seen[c] = true;
            walk.push_back(c);
            stack.emplace_back(c, 0);
        } else {
            stack.pop_back();
            if (!stack.empty()) walk.push_back(stack.back().first);
        }
    }
    // The walk ends back at the root; the closing edge supplies that step.
    if (walk.size() > 1) walk.pop_back();
    return make_cycle(ts, walk);
}

// Nearest-neighbour tour from the lowest id; distance ties go to the lower id.
inline CycleGraph build_tour_nn(const TaskSet& ts) {
    validate_tasks(ts);
    auto ids = detail::by_id(ts);
    std::vector<bool> used(ts.tasks.size(), false);
    std::vector<std::size_t> order{ids.front()};
    used[ids.front()] = true;
    while (order.size() < ts.tasks.size()) {
        const Point2& here = ts.tasks[order.back()].pos;
        std::size_t best = 0;
        double best_d = INFINITY;
        for (auto c : ids) {
            if (used[c]) continue;
            double d = distance(here, ts.tasks[c].pos);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        used[best] = true;
        order.push_back(best);
    }
    return make_cycle(ts, order);
}

inline Point2 map_1d_to_2d(const CycleGraph& g, double p) {
    if (!(p >= 0.0 && p <= g.total_length))
        throw RangeError("cycle position " + std::to_string(p) + " outside [0, " +
                         std::to_string(g.total_length) + "]");
    const std::size_t s_count = g.waypoints.size();
    if (p == g.total_length || s_count == 1) return g.waypoints.front();
    // Last edge s with L_s <= p.
    auto it = std::upper_bound(g.cumulative_lengths.begin(), g.cumulative_lengths.end(), p);
    std::size_t s = static_cast<std::size_t>(it - g.cumulative_lengths.begin()) - 1;
    const Point2& a = g.waypoints[s];
    const Point2& b = g.waypoints[(s + 1) % s_count];
    const double start = g.cumulative_lengths[s];
    const double end = s + 1 < s_count ? g.cumulative_lengths[s + 1] : g.total_length;
    if (end <= start) return b;
    const double f = (p - start) / (end - start);
    return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

}  // namespace cyclepatrol
