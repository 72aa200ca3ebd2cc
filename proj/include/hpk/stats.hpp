#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hpk::stats {

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

KSResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
KSResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double sem = 0.0;       // standard error of the mean
};
Summary summarize(const std::vector<double>& v);

double median(std::vector<double> v);

}  // namespace hpk::stats
