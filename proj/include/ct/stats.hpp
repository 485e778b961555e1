#pragma once

#include <span>

namespace ct::stats {

/// Exact two-sided binomial test: total probability of outcomes no more
/// likely than the observed count, summed in log space.
double binomial_test(long successes, long n, double p0);

struct TTest {
    double t = 0.0;
    double p = 1.0;
};

/// One-sample Student t-test, two-sided. Throws on n < 2 or zero variance.
TTest t_test_one_sample(std::span<const double> samples, double mu0);

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Upper-tail p-value of a t statistic (one-sided, alternative "greater").
double student_t_upper_p(double t, double df);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> xs);

}  // namespace ct::stats
