#pragma once

#include "pctladp/mdp.hpp"

#include <array>
#include <set>

namespace pctladp::grid {

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum Action : ActionId { up = 0, down = 1, left = 2, right = 3 };

inline constexpr std::array<const char*, 4> action_names{"U", "D", "L", "R"};
inline constexpr std::array<Cell, 4> action_offsets{Cell{0, 1}, Cell{0, -1}, Cell{-1, 0}, Cell{1, 0}};

struct GridConfig {
    int width = 11;
    int height = 11;
    std::set<Cell> obstacles;
    Cell start{0, 0};
    Cell goal{8, 10};
    std::map<std::string, std::vector<Cell>> regions;
    double slip_base = 0.1;
    double goal_reward = 100.0;
    double discount = 0.9;

    bool in_bounds(Cell c) const { return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height; }
    bool blocked(Cell c) const { return !in_bounds(c) || obstacles.count(c) > 0; }

    /// Free cells in state order (x-major, then y).
    std::vector<Cell> cells() const
    {
        std::vector<Cell> out;
        for (int x = 0; x < width; ++x)
            for (int y = 0; y < height; ++y)
                if (!obstacles.count({x, y}))
                    out.push_back({x, y});
        return out;
    }

    int num_states() const { return width * height - static_cast<int>(obstacles.size()); }

    /// State index of a free cell.
    StateId index(Cell c) const
    {
        if (blocked(c))
            throw InputError("cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") is not a free cell");
        StateId s = c.x * height + c.y;
        for (const Cell& o : obstacles)
            if (o < c)
                --s;
        return s;
    }
};

inline std::string cell_name(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

inline Cell shift(Cell c, Cell d) { return {c.x + d.x, c.y + d.y}; }

/// Throws InputError naming the first violated invariant.
inline void validate(const GridConfig& g)
{
    if (g.width < 1 || g.height < 1)
        throw InputError("grid dimensions must be positive");
    if (!g.in_bounds(g.start) || g.obstacles.count(g.start))
        throw InputError("start cell " + cell_name(g.start) + " is out of bounds or an obstacle");
    if (!g.in_bounds(g.goal) || g.obstacles.count(g.goal))
        throw InputError("goal cell " + cell_name(g.goal) + " is out of bounds or an obstacle");
    for (const Cell& c : g.obstacles)
        if (!g.in_bounds(c))
            throw InputError("obstacle " + cell_name(c) + " is out of bounds");
    for (const auto& [name, cells] : g.regions)
        for (const Cell& c : cells)
            if (g.blocked(c))
                throw InputError("region " + name + " cell " + cell_name(c) + " is out of bounds or an obstacle");
    if (!(g.slip_base >= 0.0) || 1.0 - 5.0 * g.slip_base < 0.0)
        throw InputError("slip_base must satisfy 0 <= slip_base <= 0.2");
    if (!(g.discount > 0.0 && g.discount <= 1.0))
        throw InputError("discount must lie in (0, 1]");
}

/// The cell itself plus its in-bounds 4-neighbors (obstacles included).
inline std::vector<Cell> neighborhood(const GridConfig& g, Cell c)
{
    std::vector<Cell> out{c};
    for (const Cell& d : action_offsets)
        if (g.in_bounds(shift(c, d)))
            out.push_back(shift(c, d));
    return out;
}

/**
 * Builds the gridworld MDP over the free cells.
 *
 * From a cell with neighborhood size N (self included), the intended cell is reached
 * with probability 1 - slip * N and the residual slip * N is shared equally by the
 * other neighborhood members. If the intended cell is off the grid each member gets
 * `slip`. Mass aimed at an obstacle, like mass aimed at the wall, stays put.
 */
inline Mdp build(const GridConfig& g)
{
    validate(g);
    const auto cells = g.cells();
    const int n = static_cast<int>(cells.size());
    Mdp m = make_mdp(n, 4, g.discount);
    for (int a = 0; a < 4; ++a)
        m.action_names[a] = action_names[a];
    for (StateId s = 0; s < n; ++s)
        m.state_names[s] = cell_name(cells[s]);

    for (StateId s = 0; s < n; ++s) {
        const Cell c = cells[s];
        const auto hood = neighborhood(g, c);
        const int N = static_cast<int>(hood.size());
        for (int a = 0; a < 4; ++a) {
            auto put = [&](Cell dest, double p) { m.transition[a](s, g.blocked(dest) ? s : g.index(dest)) += p; };
            const Cell intended = shift(c, action_offsets[a]);
            if (N == 1) {
                put(c, 1.0);
            } else if (g.in_bounds(intended)) {
                put(intended, 1.0 - g.slip_base * N);
                for (const Cell& h : hood)
                    if (h != intended)
                        put(h, g.slip_base * N / (N - 1));
            } else {
                put(c, 1.0 - g.slip_base * N);
                for (const Cell& h : hood)
                    put(h, g.slip_base);
            }
        }
    }

    const StateId goal = g.index(g.goal);
    for (StateId s = 0; s < n; ++s)
        for (int a = 0; a < 4; ++a)
            if (m.transition[a](s, goal) > 0.5)
                m.reward(s, a) = g.goal_reward;

    m.initial = Vector::Zero(n);
    m.initial(g.index(g.start)) = 1.0;

    StateMask goal_mask(n, false), start_mask(n, false), obstacle_mask(n, false);
    goal_mask[goal] = true;
    start_mask[g.index(g.start)] = true;
    m.labels["goal"] = goal_mask;
    m.labels["start"] = start_mask;
    // Obstacles are not states; the label exists so formulas may mention it.
    m.labels["obstacle"] = obstacle_mask;
    for (const auto& [name, region] : g.regions) {
        StateMask mask(n, false);
        for (const Cell& c : region)
            mask[g.index(c)] = true;
        m.labels[name] = mask;
    }
    require_valid(m);
    return m;
}

/// Cells of the rectangle [x0, x1] x [y0, y1] that are not obstacles.
inline std::vector<Cell> rect(const GridConfig& g, int x0, int x1, int y0, int y1)
{
    std::vector<Cell> out;
    for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y)
            if (!g.obstacles.count({x, y}))
                out.push_back({x, y});
    return out;
}

/// 11x11 reach-avoid layout with start (0,0), goal (8,10) and discount 0.5. The obstacle layout is approximate.
inline GridConfig experiment1_config()
{
    GridConfig g;
    g.discount = 0.5;
    g.obstacles = {{2, 2}, {2, 3}, {2, 4}, {3, 7}, {4, 7}, {6, 7}, {7, 2}, {7, 3}, {8, 3}, {9, 6}, {9, 7}};
    return g;
}

/// experiment1_config plus the regions A and B used by the cost constraint.
inline GridConfig experiment2_config()
{
    GridConfig g = experiment1_config();
    g.regions["A"] = rect(g, 4, 5, 4, 5);
    g.regions["B"] = rect(g, 3, 4, 0, 1);
    return g;
}

/// Kernel centers {0, 5, 10}^2 as state indices, skipping cells that are not free.
inline std::vector<StateId> kernel_centers(const GridConfig& g)
{
    std::vector<StateId> out;
    for (int x : {0, 5, 10})
        for (int y : {0, 5, 10})
            if (!g.blocked({x, y}))
                out.push_back(g.index({x, y}));
    return out;
}

}  // namespace pctladp::grid
