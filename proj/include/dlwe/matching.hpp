#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dlwe {

struct Point2 {
    double r = 0, s = 0;
};

inline double distance(const Point2 &a, const Point2 &b) { return std::hypot(a.r - b.r, a.s - b.s); }

inline double diameter(const std::vector<Point2> &pts) {
    double d = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
    return d;
}

/// Directed and symmetric Hausdorff distances between finite point sets.
inline double hausdorff(const std::vector<Point2> &a, const std::vector<Point2> &b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<Point2> &x, const std::vector<Point2> &y) {
        double worst = 0;
        for (const Point2 &p : x) {
            double best = std::numeric_limits<double>::infinity();
            for (const Point2 &q : y) best = std::min(best, distance(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

/// Minimum-cost perfect assignment of rows to columns (Jonker-Volgenant
/// style shortest augmenting paths, O(n^2 m)). Requires rows <= cols; the
/// returned vector maps each row to its column.
inline std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>> &cost) {
    std::size_t n = cost.size();
    if (n == 0) return {};
    std::size_t m = cost[0].size();
    if (n > m) throw std::invalid_argument("min_cost_assignment: rows must not exceed cols");
    for (const auto &row : cost)
        if (row.size() != m) throw std::invalid_argument("min_cost_assignment: ragged cost matrix");

    const double INF = std::numeric_limits<double>::infinity();
    // 1-based potentials over rows (u) and columns (v); way[j] = augmenting
    // predecessor of column j; p[j] = row matched to column j
    std::vector<double> u(n + 1, 0), v(m + 1, 0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, INF);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            std::size_t i0 = p[j0], j1 = 0;
            double delta = INF;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> match(n, 0);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] != 0) match[p[j] - 1] = j - 1;
    return match;
}

struct MatchedPair {
    std::size_t from, to;
    double dist;
};

/// Optimal one-to-one matching of the smaller set into the larger by total
/// euclidean distance.
inline std::vector<MatchedPair> match_points(const std::vector<Point2> &a, const std::vector<Point2> &b) {
    bool swapped = a.size() > b.size();
    const std::vector<Point2> &rows = swapped ? b : a;
    const std::vector<Point2> &cols = swapped ? a : b;
    if (rows.empty()) return {};
    std::vector<std::vector<double>> cost(rows.size(), std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) cost[i][j] = distance(rows[i], cols[j]);
    auto match = min_cost_assignment(cost);
    std::vector<MatchedPair> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::size_t j = match[i];
        if (swapped)
            out.push_back({j, i, cost[i][j]});
        else
            out.push_back({i, j, cost[i][j]});
    }
    std::sort(out.begin(), out.end(), [](const MatchedPair &x, const MatchedPair &y) { return x.from < y.from; });
    return out;
}

}  // namespace dlwe
