#include "ct/stats.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ct::stats {

namespace {

double log_binomial_pmf(long k, long n, double log_p, double log_q) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0) + static_cast<double>(k) * log_p +
           static_cast<double>(n - k) * log_q;
}

}  // namespace

double binomial_test(long successes, long n, double p0) {
    if (n < 0 || successes < 0 || successes > n) throw std::invalid_argument("binomial_test: need 0 <= k <= n");
    if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("binomial_test: need 0 < p0 < 1");
    const double log_p = std::log(p0);
    const double log_q = std::log1p(-p0);
    std::vector<double> logs(static_cast<std::size_t>(n + 1));
    for (long k = 0; k <= n; ++k) logs[static_cast<std::size_t>(k)] = log_binomial_pmf(k, n, log_p, log_q);
    // Relative slack so that outcomes tied with the observed one in exact
    // arithmetic are not dropped by rounding.
    const double threshold = logs[static_cast<std::size_t>(successes)] + 1e-7;
    double max_log = -std::numeric_limits<double>::infinity();
    for (double l : logs)
        if (l <= threshold) max_log = std::max(max_log, l);
    double sum = 0.0;
    for (double l : logs)
        if (l <= threshold) sum += std::exp(l - max_log);
    const double p = std::exp(max_log + std::log(sum));
    return std::min(1.0, p);
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return boost::math::ibeta(0.5 * df, 0.5, x);
}

double student_t_upper_p(double t, double df) {
    const double two = student_t_two_sided_p(t, df);
    return t >= 0.0 ? 0.5 * two : 1.0 - 0.5 * two;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TTest t_test_one_sample(std::span<const double> samples, double mu0) {
    if (samples.size() < 2) throw std::invalid_argument("t-test needs at least two samples");
    const double s = sample_std(samples);
    if (!(s > 0.0)) throw std::invalid_argument("t-test needs nonzero variance");
    const double n = static_cast<double>(samples.size());
    TTest r;
    r.t = (mean(samples) - mu0) / (s / std::sqrt(n));
    r.p = student_t_two_sided_p(r.t, n - 1.0);
    return r;
}

}  // namespace ct::stats
