#include <cmath>
#include <limits>
#include <stdexcept>

#include "ct/alignment.hpp"

namespace ct::alignment {

namespace {

struct Solution {
    std::vector<int> row_to_col;
    std::vector<double> u, v;  // row and column potentials
};

// Shortest augmenting path with potentials (Kuhn-Munkres), O(n^3).
Solution solve(const Matrix& a) {
    const int n = static_cast<int>(a.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
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
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    Solution s;
    s.row_to_col.assign(n, -1);
    for (int j = 1; j <= n; ++j) s.row_to_col[p[j] - 1] = j - 1;
    s.u.assign(u.begin() + 1, u.end());
    s.v.assign(v.begin() + 1, v.end());
    return s;
}

// Walks rows in order and moves each onto the smallest column that still
// admits a perfect matching of zero reduced cost edges. Every optimal
// assignment uses only such edges, so the result is the lexicographically
// smallest optimum.
class LexRefiner {
public:
    LexRefiner(const Matrix& a, const Solution& s) : a_(a), s_(s), n_(static_cast<int>(a.rows())) {
        double scale = 1.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) scale = std::max(scale, std::abs(a.data()[i]));
        eps_ = 1e-11 * scale * std::max(1, n_);
        row_to_col_ = s.row_to_col;
        col_to_row_.assign(n_, -1);
        for (int i = 0; i < n_; ++i) col_to_row_[row_to_col_[i]] = i;
        col_fixed_.assign(n_, 0);
    }

    std::vector<int> run() {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < row_to_col_[i]; ++j) {
                if (col_fixed_[j] || !tight(i, j)) continue;
                if (reroute(i, j)) break;
            }
            col_fixed_[row_to_col_[i]] = 1;
        }
        return row_to_col_;
    }

private:
    bool tight(int i, int j) const { return std::abs(a_(i, j) - s_.u[i] - s_.v[j]) <= eps_; }

    bool reroute(int i, int j) {
        free_col_ = row_to_col_[i];
        blocked_col_ = j;
        visited_.assign(n_, 0);
        const int displaced = col_to_row_[j];
        if (!augment(displaced)) return false;
        row_to_col_[i] = j;
        col_to_row_[j] = i;
        return true;
    }

    bool augment(int row) {
        for (int c = 0; c < n_; ++c) {
            if (col_fixed_[c] || visited_[c] || c == blocked_col_ || !tight(row, c)) continue;
            visited_[c] = 1;
            if (c == free_col_ || augment(col_to_row_[c])) {
                row_to_col_[row] = c;
                col_to_row_[c] = row;
                return true;
            }
        }
        return false;
    }

    const Matrix& a_;
    const Solution& s_;
    int n_;
    double eps_ = 0.0;
    std::vector<int> row_to_col_, col_to_row_;
    std::vector<char> col_fixed_, visited_;
    int free_col_ = -1, blocked_col_ = -1;
};

}  // namespace

Assignment hungarian(const Matrix& cost) {
    if (cost.rows() != cost.cols()) throw std::invalid_argument("hungarian: cost matrix must be square");
    if (!cost.allFinite()) throw std::invalid_argument("hungarian: cost matrix has non-finite entries");
    Assignment out;
    if (cost.rows() == 0) return out;
    const Solution s = solve(cost);
    out.columns = LexRefiner(cost, s).run();
    std::vector<char> seen(out.columns.size(), 0);
    for (std::size_t i = 0; i < out.columns.size(); ++i) {
        const int c = out.columns[i];
        if (c < 0 || seen[static_cast<std::size_t>(c)]) throw std::logic_error("hungarian: result is not a bijection");
        seen[static_cast<std::size_t>(c)] = 1;
        out.cost += cost(static_cast<Eigen::Index>(i), c);
    }
    return out;
}

}  // namespace ct::alignment
