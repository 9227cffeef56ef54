#pragma once

#include <cstdint>
#include <vector>

#include "mvq/algorithms.hpp"

namespace mvq {

enum class Study { alg1, alg2, alg3 };

struct StudyConfig {
  Study study = Study::alg3;
  std::vector<std::size_t> q_list{2, 3};   // alg1 / alg3
  std::vector<std::size_t> n_list{30};
  std::vector<double> tau_list{0.9};       // alg2 / alg3
  std::vector<double> rho_list{-0.9, 0.0, 0.9};  // alg2
  std::size_t mc_trials = 50;
  BootstrapConfig bootstrap{};             // b, style, ci_method (seed derived per trial)
  double cvine_c = 2.0;
  double confidence = 0.95;
  double grid_step = 0.05;                 // alg2
  bool interpolate = true;                 // alg2
  std::size_t beta_samples = 100000;       // alg2 shared ground-truth samples
  std::uint64_t seed = 1;

  void validate() const;
};

struct Alg1Row {
  std::size_t q = 0, n = 0;
  double p = 0.0;  // containment fraction of the two-sided interval
};

struct Alg2Row {
  double rho = 0.0, tau = 0.0;
  std::size_t n = 0;
  double beta_true = 0.0;
  double p = 0.0;  // mean(beta_i >= beta_true)
};

struct Alg3Row {
  std::size_t q = 0, n = 0;
  double tau = 0.0;
  double p = 0.0;  // mean(F(v_hat) >= tau)
};

std::vector<Alg1Row> run_study_alg1(const StudyConfig& config);
std::vector<Alg2Row> run_study_alg2(const StudyConfig& config);
std::vector<Alg3Row> run_study_alg3(const StudyConfig& config);

}  // namespace mvq
