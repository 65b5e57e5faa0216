#include "overtaking/detail/graph.hpp"

#include <algorithm>
#include <functional>

namespace overtaking::detail {

Adjacency support_graph(const Eigen::MatrixXd& m) {
    Adjacency g(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) > 0.0) g[static_cast<std::size_t>(i)].push_back(static_cast<std::size_t>(j));
    return g;
}

// Tarjan; recursion depth is bounded by the state count, which stays small here.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Adjacency& g) {
    const std::size_t n = g.size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    std::size_t counter = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : g[v]) {
            if (index[w] == unvisited) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            out.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] == unvisited) visit(v);
    return out;
}

std::vector<bool> reachable_from(const Adjacency& g, const std::vector<std::size_t>& roots) {
    std::vector<bool> seen(g.size(), false);
    std::vector<std::size_t> work;
    for (std::size_t r : roots)
        if (!seen[r]) {
            seen[r] = true;
            work.push_back(r);
        }
    while (!work.empty()) {
        const std::size_t v = work.back();
        work.pop_back();
        for (std::size_t w : g[v])
            if (!seen[w]) {
                seen[w] = true;
                work.push_back(w);
            }
    }
    return seen;
}

std::vector<bool> can_reach(const Adjacency& g, const std::vector<std::size_t>& targets) {
    Adjacency reversed(g.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        for (std::size_t w : g[v]) reversed[w].push_back(v);
    return reachable_from(reversed, targets);
}

} // namespace overtaking::detail
