#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ct/concepts.hpp"

namespace ct::concepts {

namespace {

struct Contingency {
    std::map<std::pair<int, int>, double> cells;
    std::map<int, double> rows;
    std::map<int, double> cols;
    double n = 0.0;
};

Contingency contingency(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw std::invalid_argument("label lists differ in length");
    if (a.size() < 2) throw std::invalid_argument("need at least two labels");
    Contingency t;
    for (std::size_t i = 0; i < a.size(); ++i) {
        t.cells[{a[i], b[i]}] += 1.0;
        t.rows[a[i]] += 1.0;
        t.cols[b[i]] += 1.0;
    }
    t.n = static_cast<double>(a.size());
    return t;
}

double pairs(double x) { return x * (x - 1.0) / 2.0; }

double entropy(const std::map<int, double>& counts, double n) {
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = c / n;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

double ari(std::span<const int> a, std::span<const int> b) {
    const Contingency t = contingency(a, b);
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [_, c] : t.cells) index += pairs(c);
    for (const auto& [_, c] : t.rows) sum_rows += pairs(c);
    for (const auto& [_, c] : t.cols) sum_cols += pairs(c);
    const double expected = sum_rows * sum_cols / pairs(t.n);
    const double max_index = 0.5 * (sum_rows + sum_cols);
    // Both partitions all-singletons or both a single cluster.
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

double nmi(std::span<const int> a, std::span<const int> b) {
    const Contingency t = contingency(a, b);
    const double ha = entropy(t.rows, t.n);
    const double hb = entropy(t.cols, t.n);
    if (ha == 0.0 || hb == 0.0) return 0.0;
    double mi = 0.0;
    for (const auto& [key, c] : t.cells) {
        const double ra = t.rows.at(key.first);
        const double cb = t.cols.at(key.second);
        mi += c / t.n * std::log(t.n * c / (ra * cb));
    }
    const double v = mi / (0.5 * (ha + hb));
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace ct::concepts
