#pragma once

#include <vector>

namespace graderalign {

// avg/std pair for "avg.±std." reporting. std is population-style (divide
// by n), matching descriptive use.
struct SummaryStat {
    double mean = 0.0;
    double std = 0.0;
    int n = 0;
};

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_tailed = 1.0;
    bool reject_at_alpha = false;
    double alpha = 0.05;
    bool degenerate = false;  // zero-variance differences with nonzero mean
};

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;
    int n = 0;
};

SummaryStat mean_std(const std::vector<double>& xs);

// Two-tailed p = 2*P(T >= |t|) for Student's t with df degrees of freedom.
double t_tail(double t, double df);

// Paired two-tailed Student t-test; differences use sample sd (n-1), df = n-1.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                          double alpha = 0.05);

// Independent two-sample pooled-variance variant, exposed for sensitivity
// checks.
TTestResult independent_t_test(const std::vector<double>& a, const std::vector<double>& b,
                               double alpha = 0.05);

// Average ranks for ties; rho is the Pearson correlation of the rank
// vectors; p via the t-approximation with df = n-2 (|rho| = 1 gives p = 0).
SpearmanResult spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Exact permutation p-value (all n! rank permutations); n <= 8.
double spearman_exact_p(const std::vector<double>& xs, const std::vector<double>& ys);

// Midranks (average ranks for ties), 1-based.
std::vector<double> average_ranks(const std::vector<double>& xs);

}  // namespace graderalign
