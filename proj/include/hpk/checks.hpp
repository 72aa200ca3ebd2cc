#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hpk::checks {

// Parameters shared by the check suites and experiments. Unset optionals fall
// back to the per-suite defaults.
struct RunParams {
  std::optional<double> s;
  int N = 8;
  int n = 4;
  double eps = 0.1;
  double R = 100.0;
  double sigma = 1.0;
  double s_prime = 0.5;
  int m = 20;
  int M = 256;
  int draws = 0;  // 0: experiment default
  std::uint64_t seed = 1;
  int jobs = 1;

  nlohmann::json to_json() const;
};

// Suites: specfun, opuc, kernels, infinite. Throws InvalidSpec for an unknown
// suite or parameters outside the suite's preconditions.
nlohmann::json run_check(const std::string& suite, const RunParams& p);
const std::vector<std::string>& check_suites();

// Experiments: gamma2, gamma1, tails, variance, contraction.
nlohmann::json run_experiment(const std::string& name, const RunParams& p);
const std::vector<std::string>& experiment_names();

// Individual experiment drivers with explicit parameter lists.
nlohmann::json gamma2_experiment(const std::vector<double>& s_list, int N_fit, const std::vector<int>& N_list,
                                 const std::vector<double>& eps_list);
nlohmann::json tails_experiment(const std::vector<double>& s_list, int N_fit, const std::vector<int>& N_list,
                                const std::vector<double>& R_list);
nlohmann::json variance_experiment(const std::vector<double>& s_list, const std::vector<int>& N_list,
                                   const std::vector<double>& eps_list, int draws, std::uint64_t seed,
                                   int jobs);
nlohmann::json contraction_experiment(const std::vector<std::pair<double, double>>& sprime_sigma,
                                      double s_damped, double sigma_damped, int m,
                                      const std::vector<double>& growth_s);

struct Criterion {
  int id = 0;
  std::string title;
  double budget_seconds = 0.0;
};
const std::vector<Criterion>& criteria();

// Runs acceptance criterion `id` (1..12) and returns its experiment report.
nlohmann::json run_criterion(int id, int jobs = 1);

}  // namespace hpk::checks
