#include "mvq/simulation.hpp"

#include <cmath>

#include "mvq/parallel.hpp"
#include "mvq/simd/kernels.hpp"
#include "internal_math.hpp"

namespace mvq {

void StudyConfig::validate() const {
  if (mc_trials < 10) throw InvalidInputError("StudyConfig: mc_trials must be >= 10");
  bootstrap.validate();
  if (study == Study::alg1 || study == Study::alg3) {
    if (q_list.empty() || n_list.empty())
      throw InvalidInputError("StudyConfig: empty parameter grid");
  }
  if (study == Study::alg3 && tau_list.empty())
    throw InvalidInputError("StudyConfig: empty tau grid");
  if (study == Study::alg2 && (rho_list.empty() || tau_list.empty() || n_list.empty()))
    throw InvalidInputError("StudyConfig: empty parameter grid");
}

namespace {

std::uint64_t cell_seed(std::uint64_t base, std::size_t cell, std::size_t trial) {
  return Rng::derive(Rng::derive(base, cell), trial);
}

}  // namespace

std::vector<Alg1Row> run_study_alg1(const StudyConfig& config) {
  config.validate();
  std::vector<Alg1Row> rows;
  double alpha = 1.0 - config.confidence;
  PercentileRequest request{{alpha / 2.0, 1.0 - alpha / 2.0}};
  std::size_t cell = 0;
  for (std::size_t q : config.q_list) {
    for (std::size_t n : config.n_list) {
      std::vector<int> contained(config.mc_trials, 0);
      parallel_for(config.mc_trials, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
          std::uint64_t s = cell_seed(config.seed, cell, t);
          Rng rng(s);
          CorrelationMatrix C = cvine_random_correlation(q, config.cvine_c, rng.next_u64());
          double mu = rng.uniform(0.0, 100.0);
          MvnModel model(Vector::Constant(static_cast<Eigen::Index>(q), mu),
                         C.values());
          DataMatrix data = mvn_sample(model, n, rng.next_u64());
          double tau_true = joint_quantile_probability(0.90, C);
          BootstrapConfig bc = config.bootstrap;
          bc.seed = rng.next_u64();
          JointTauInterval ji = algorithm1_joint_tau_uq(data, 0.90, request, bc);
          contained[t] =
              (ji.tau_values[0] <= tau_true && tau_true <= ji.tau_values[1]) ? 1 : 0;
        }
      });
      double p = 0.0;
      for (int c : contained) p += c;
      rows.push_back({q, n, p / double(config.mc_trials)});
      ++cell;
    }
  }
  return rows;
}

std::vector<Alg3Row> run_study_alg3(const StudyConfig& config) {
  config.validate();
  std::vector<Alg3Row> rows;
  PercentileRequest request{{config.confidence}};
  std::size_t cell = 0;
  for (std::size_t q : config.q_list) {
    for (std::size_t n : config.n_list) {
      for (double tau : config.tau_list) {
        std::vector<int> exceed(config.mc_trials, 0);
        parallel_for(config.mc_trials, [&](std::size_t lo, std::size_t hi) {
          for (std::size_t t = lo; t < hi; ++t) {
            std::uint64_t s = cell_seed(config.seed, cell, t);
            Rng rng(s);
            CorrelationMatrix C =
                cvine_random_correlation(q, config.cvine_c, rng.next_u64());
            MvnModel model(Vector::Zero(static_cast<Eigen::Index>(q)), C.values());
            DataMatrix data = mvn_sample(model, n, rng.next_u64());
            BootstrapConfig bc = config.bootstrap;
            bc.seed = rng.next_u64();
            CriticalPointCi ci = algorithm3_critical_point_ci(data, tau, request, bc);
            Vector v = ci.points.row(0).transpose();
            double tau_ci = mvn_cdf_corr(v, C.values());
            exceed[t] = (tau_ci >= tau) ? 1 : 0;
          }
        });
        double p = 0.0;
        for (int c : exceed) p += c;
        rows.push_back({q, n, tau, p / double(config.mc_trials)});
        ++cell;
      }
    }
  }
  return rows;
}

std::vector<Alg2Row> run_study_alg2(const StudyConfig& config) {
  config.validate();
  std::vector<Alg2Row> rows;
  PercentileRequest request{{config.confidence}};
  GridSpec grid = GridSpec::bivariate(config.grid_step);
  std::size_t cell = 0;
  for (double rho : config.rho_list) {
    Matrix C(2, 2);
    C << 1.0, rho, rho, 1.0;
    MvnModel model(Vector::Zero(2), C);
    for (double tau : config.tau_list) {
      for (std::size_t n : config.n_list) {
        std::uint64_t seed_cell = Rng::derive(config.seed, 7777 + cell);
        // shared ground-truth sample for beta_hat and all trial beta_i
        DataMatrix shared = mvn_sample(model, config.beta_samples, seed_cell);
        const std::size_t ns = config.beta_samples;
        std::vector<double> F(ns);
        {
          std::vector<double> h(ns), k(ns);
          for (std::size_t i = 0; i < ns; ++i) {
            h[i] = shared.values()(static_cast<Eigen::Index>(i), 0);
            k[i] = shared.values()(static_cast<Eigen::Index>(i), 1);
          }
          parallel_for(ns, [&](std::size_t lo, std::size_t hi) {
            simd::kernels().bvn_cdf_v(h.data() + lo, k.data() + lo, rho,
                                      F.data() + lo, hi - lo);
          });
        }
        double beta_true = 0.0;
        for (double f : F) beta_true += (f <= tau) ? 1.0 : 0.0;
        beta_true /= double(ns);

        std::vector<double> beta_i(config.mc_trials, 0.0);
        // trials run sequentially; the grid bootstrap inside parallelizes
        for (std::size_t t = 0; t < config.mc_trials; ++t) {
          std::uint64_t s = cell_seed(config.seed, cell, t);
          Rng rng(s);
          DataMatrix data = mvn_sample(model, n, rng.next_u64());
          BootstrapConfig bc = config.bootstrap;
          bc.seed = rng.next_u64();
          QuantileCiResult res;
          try {
            res = algorithm2_quantile_ci(data, tau, request, bc, grid,
                                         config.interpolate);
          } catch (const GeometryError&) {
            beta_i[t] = 0.0;  // tau outside achievable grid range: no coverage
            continue;
          }
          const CdfGrid& g95 = res.gamma_grids[0];
          std::size_t inside = 0;
          Vector x(2);
          for (std::size_t i = 0; i < ns; ++i) {
            x(0) = (shared.values()(static_cast<Eigen::Index>(i), 0) -
                    res.centering(0)) / res.scaling(0);
            x(1) = (shared.values()(static_cast<Eigen::Index>(i), 1) -
                    res.centering(1)) / res.scaling(1);
            if (g95.interpolate(x) <= tau) ++inside;
          }
          beta_i[t] = double(inside) / double(ns);
        }
        double p = 0.0;
        for (double bi : beta_i) p += (bi >= beta_true) ? 1.0 : 0.0;
        rows.push_back({rho, tau, n, beta_true, p / double(config.mc_trials)});
        ++cell;
      }
    }
  }
  return rows;
}

}  // namespace mvq
