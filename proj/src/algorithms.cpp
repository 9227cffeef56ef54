#include "mvq/algorithms.hpp"

#include <algorithm>
#include <cmath>

#include "mvq/parallel.hpp"
#include "mvq/simd/kernels.hpp"
#include "internal_math.hpp"
#include "tri_cumulator.hpp"

namespace mvq {

namespace {

/// Correlation matrix of a resample, clamped away from +-1 and regularized
/// back to positive definiteness when duplicate-heavy draws break it.
Matrix replicate_corr(const DataMatrix& d, bool* regularized = nullptr) {
  Matrix corr = clamp_correlation(sample_corr(d));
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success) {
    bool changed = regularize_correlation(corr, 1e-9);
    corr = clamp_correlation(corr);
    if (regularized && changed) *regularized = true;
  }
  return corr;
}

void require_rows(const DataMatrix& data, const char* who) {
  if (data.n() < data.q() + 2)
    throw InsufficientSamplesError(std::string(who) + ": need n >= q + 2");
}

}  // namespace

JointTauInterval algorithm1_joint_tau_uq(const DataMatrix& data, double tau_individual,
                                         const PercentileRequest& request,
                                         const BootstrapConfig& config,
                                         const CdfAccuracy& acc) {
  require_rows(data, "algorithm1_joint_tau_uq");
  if (!(tau_individual > 0.0 && tau_individual < 1.0))
    throw InvalidInputError("algorithm1_joint_tau_uq: tau must lie in (0,1)");
  request.validate();
  config.validate();

  const std::size_t b = config.b;
  std::vector<double> reps(b);
  parallel_for(b, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      Rng rng(Rng::derive(config.seed, r));
      DataMatrix d = resample(data, BootstrapStyle::nonparametric, rng);
      reps[r] = joint_quantile_probability(tau_individual, replicate_corr(d), acc);
    }
  });

  double theta_hat =
      joint_quantile_probability(tau_individual, replicate_corr(data), acc);
  std::vector<double> jack;
  if (config.ci_method == CiMethod::bca) {
    jack.resize(data.n());
    parallel_for(data.n(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        Matrix rows(static_cast<Eigen::Index>(data.n() - 1),
                    static_cast<Eigen::Index>(data.q()));
        Eigen::Index out = 0;
        for (std::size_t r2 = 0; r2 < data.n(); ++r2)
          if (r2 != i) rows.row(out++) = data.values().row(static_cast<Eigen::Index>(r2));
        DataMatrix dm(std::move(rows));
        jack[i] = joint_quantile_probability(tau_individual, replicate_corr(dm), acc);
      }
    });
  }

  CiResult ci = bootstrap_ci(reps, config.ci_method, theta_hat, jack, request);
  JointTauInterval out;
  out.gammas = request.gammas;
  out.tau_values = ci.values;
  out.b = b;
  out.tau_individual = tau_individual;
  out.theta_hat = theta_hat;
  out.percentile_fallback = ci.percentile_fallback;
  return out;
}

CriticalPointCi algorithm3_critical_point_ci(const DataMatrix& data, double tau,
                                             const PercentileRequest& request,
                                             const BootstrapConfig& config,
                                             const CdfAccuracy& acc) {
  require_rows(data, "algorithm3_critical_point_ci");
  if (!(tau > 0.0 && tau < 1.0))
    throw InvalidInputError("algorithm3_critical_point_ci: tau must lie in (0,1)");
  request.validate();
  config.validate();
  const std::size_t q = data.q();
  const std::size_t b = config.b;

  auto statistic = [&](const DataMatrix& d) -> Vector {
    Matrix corr = replicate_corr(d);
    double v = equicoordinate_quantile(tau, corr, acc);
    return Vector(sample_mean(d) + v * sample_sd(d));
  };

  Matrix reps(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(q));
  parallel_for(b, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      Rng rng(Rng::derive(config.seed, r));
      DataMatrix d =
          config.style == BootstrapStyle::parametric
              ? mvn_sample(MvnModel(sample_mean(data), sample_cov(data)), data.n(),
                           rng.next_u64())
              : resample(data, BootstrapStyle::nonparametric, rng);
      reps.row(static_cast<Eigen::Index>(r)) = statistic(d).transpose();
    }
  });

  Vector theta_hat = statistic(data);
  Matrix jack;
  if (config.ci_method == CiMethod::bca) {
    jack.resize(static_cast<Eigen::Index>(data.n()), static_cast<Eigen::Index>(q));
    parallel_for(data.n(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        Matrix rows(static_cast<Eigen::Index>(data.n() - 1),
                    static_cast<Eigen::Index>(q));
        Eigen::Index out = 0;
        for (std::size_t r2 = 0; r2 < data.n(); ++r2)
          if (r2 != i) rows.row(out++) = data.values().row(static_cast<Eigen::Index>(r2));
        jack.row(static_cast<Eigen::Index>(i)) =
            statistic(DataMatrix(std::move(rows))).transpose();
      }
    });
  }

  CriticalPointCi out;
  out.tau = tau;
  out.gammas = request.gammas;
  out.b = b;
  out.point_estimate = theta_hat;
  out.points.resize(static_cast<Eigen::Index>(request.gammas.size()),
                    static_cast<Eigen::Index>(q));
  for (std::size_t j = 0; j < q; ++j) {
    std::vector<double> col(b), jcol;
    for (std::size_t r = 0; r < b; ++r)
      col[r] = reps(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
    if (config.ci_method == CiMethod::bca) {
      jcol.resize(data.n());
      for (std::size_t i = 0; i < data.n(); ++i)
        jcol[i] = jack(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    CiResult ci = bootstrap_ci(std::move(col), config.ci_method,
                               theta_hat(static_cast<Eigen::Index>(j)), jcol, request);
    out.percentile_fallback = out.percentile_fallback || ci.percentile_fallback;
    for (std::size_t g = 0; g < request.gammas.size(); ++g)
      out.points(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(j)) =
          ci.values[g];
  }
  return out;
}

namespace {

struct ReplicateModel {
  Vector mean;
  Matrix cov;
  bool regularized = false;
};

ReplicateModel model_of(const DataMatrix& d) {
  ReplicateModel m;
  m.mean = sample_mean(d);
  m.cov = sample_cov(d);
  Eigen::LLT<Eigen::MatrixXd> llt(m.cov);
  if (llt.info() != Eigen::Success) {
    Vector sd = m.cov.diagonal().cwiseSqrt();
    Matrix corr = clamp_correlation(corr_from_cov(m.cov));
    regularize_correlation(corr, 1e-9);
    m.cov = sd.asDiagonal() * corr * sd.asDiagonal();
    m.cov = (m.cov + Matrix(m.cov.transpose()).eval()) / 2.0;
    m.regularized = true;
  }
  return m;
}

/// Per-cell reduction of the replicate stack into per-gamma CDF values.
/// levels[g] is the percentile level to take on the CDF values (already
/// mapped from the quantile-direction gamma). For BCa, theta/jack rows of the
/// stack supply the bias and acceleration inputs.
struct CellReducer {
  CiMethod method;
  const std::vector<double>* levels;
  std::size_t b;
  std::size_t n_jack;  // 0 unless bca

  // layout within the stack: [0..b) replicates, [b] theta, [b+1 .. b+1+n_jack) jackknife
  void reduce(const double* cell_vals, std::size_t stride, double* out) const {
    thread_local std::vector<double> buf;
    buf.resize(b);
    for (std::size_t r = 0; r < b; ++r) buf[r] = cell_vals[r * stride];
    std::sort(buf.begin(), buf.end());
    if (method == CiMethod::percentile) {
      for (std::size_t g = 0; g < levels->size(); ++g)
        out[g] = std::clamp(
            detail::quantile_type7_sorted(buf.data(), b, (*levels)[g]), 0.0, 1.0);
      return;
    }
    double theta = cell_vals[b * stride];
    std::size_t below = 0;
    // buf is sorted; count strictly below theta
    below = std::lower_bound(buf.begin(), buf.end(), theta) - buf.begin();
    if (below == 0 || below == b) {  // percentile fallback per cell
      for (std::size_t g = 0; g < levels->size(); ++g)
        out[g] = std::clamp(
            detail::quantile_type7_sorted(buf.data(), b, (*levels)[g]), 0.0, 1.0);
      return;
    }
    double z0 = detail::norm_quantile(double(below) / double(b));
    double a = 0.0;
    if (method == CiMethod::bca && n_jack > 0) {
      thread_local std::vector<double> jbuf;
      jbuf.resize(n_jack);
      for (std::size_t i = 0; i < n_jack; ++i)
        jbuf[i] = cell_vals[(b + 1 + i) * stride];
      a = jackknife_acceleration(jbuf);
    }
    for (std::size_t g = 0; g < levels->size(); ++g) {
      double adj = bca_adjusted_level(z0, a, (*levels)[g]);
      out[g] =
          std::clamp(detail::quantile_type7_sorted(buf.data(), b, adj), 0.0, 1.0);
    }
  }
};

}  // namespace

QuantileCiResult algorithm2_quantile_ci(const DataMatrix& data, double tau,
                                        const PercentileRequest& request,
                                        const BootstrapConfig& config,
                                        const GridSpec& grid_spec, bool interpolate,
                                        const CdfAccuracy& acc,
                                        std::size_t stack_bytes) {
  require_rows(data, "algorithm2_quantile_ci");
  if (!(tau > 0.0 && tau < 1.0))
    throw InvalidInputError("algorithm2_quantile_ci: tau must lie in (0,1)");
  grid_spec.validate();
  if (grid_spec.q != data.q())
    throw InvalidInputError("algorithm2_quantile_ci: grid dimension != data dimension");
  request.validate();
  config.validate();

  StandardizedData std_data = standardize(data);
  const DataMatrix R(std_data.values);
  const std::size_t q = data.q();
  const std::size_t b = config.b;
  const bool need_theta = config.ci_method != CiMethod::percentile;
  const bool need_jack = config.ci_method == CiMethod::bca;
  const std::size_t n_jack = need_jack ? data.n() : 0;
  const std::size_t n_models = b + (need_theta ? 1 : 0) + n_jack;

  // phase A: replicate models (deterministic per sub-seed)
  std::vector<ReplicateModel> models(n_models);
  std::size_t regularized = 0;
  parallel_for(b, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      Rng rng(Rng::derive(config.seed, r));
      DataMatrix d = resample(R, config.style, rng);
      models[r] = model_of(d);
    }
  });
  if (need_theta) {
    // statistics of the standardized data itself: exact zero mean, corr = cov
    models[b].mean = Vector::Zero(static_cast<Eigen::Index>(q));
    models[b].cov = clamp_correlation(sample_corr(R));
    Eigen::LLT<Eigen::MatrixXd> llt(models[b].cov);
    if (llt.info() != Eigen::Success) regularize_correlation(models[b].cov, 1e-9);
  }
  if (need_jack) {
    parallel_for(n_jack, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        Matrix rows(static_cast<Eigen::Index>(R.n() - 1),
                    static_cast<Eigen::Index>(q));
        Eigen::Index out = 0;
        for (std::size_t r2 = 0; r2 < R.n(); ++r2)
          if (r2 != i) rows.row(out++) = R.values().row(static_cast<Eigen::Index>(r2));
        models[b + 1 + i] = model_of(DataMatrix(std::move(rows)));
      }
    });
  }
  for (const auto& m : models) regularized += m.regularized ? 1 : 0;

  // quantile-direction gamma -> CDF percentile level 1 - gamma
  std::vector<double> levels;
  levels.reserve(request.gammas.size());
  for (double g : request.gammas) levels.push_back(1.0 - g);

  const std::size_t m = grid_spec.nodes_per_axis();
  std::vector<double> axis(m);
  for (std::size_t i = 0; i + 1 < m; ++i) axis[i] = grid_spec.lo + double(i) * grid_spec.step;
  axis[m - 1] = grid_spec.hi;

  CellReducer reducer{config.ci_method, &levels, b, n_jack};

  std::vector<CdfGrid> gamma_grids(request.gammas.size());
  for (auto& g : gamma_grids) {
    g.axes.assign(q, axis);
    g.values.assign(grid_spec.total_cells(), 0.0);
  }

  if (q == 2) {
    // row-blocked: each replicate's rows are independent
    const std::size_t row_cells = m;
    std::size_t rows_per_block = std::max<std::size_t>(
        1, stack_bytes / (n_models * row_cells * sizeof(double)));
    rows_per_block = std::min(rows_per_block, m);
    std::vector<double> stack(n_models * rows_per_block * row_cells);
    std::vector<double> h0(m);  // standardized grid coordinates (same per axis)
    for (std::size_t i0 = 0; i0 < m; i0 += rows_per_block) {
      const std::size_t nb = std::min(rows_per_block, m - i0);
      parallel_for(n_models, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> hbuf(m), kbuf(m);
        for (std::size_t r = lo; r < hi; ++r) {
          const auto& mod = models[r];
          double s0 = std::sqrt(mod.cov(0, 0)), s1 = std::sqrt(mod.cov(1, 1));
          double rho = std::clamp(mod.cov(0, 1) / (s0 * s1), -1.0 + 1e-9, 1.0 - 1e-9);
          for (std::size_t j = 0; j < m; ++j) kbuf[j] = (axis[j] - mod.mean(1)) / s1;
          for (std::size_t i = 0; i < nb; ++i) {
            double h = (axis[i0 + i] - mod.mean(0)) / s0;
            std::fill(hbuf.begin(), hbuf.end(), h);
            simd::kernels().bvn_cdf_v(hbuf.data(), kbuf.data(), rho,
                                      stack.data() + (r * rows_per_block + i) * m, m);
          }
        }
      });
      (void)h0;
      parallel_for(nb * m, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> out(levels.size());
        for (std::size_t cell = lo; cell < hi; ++cell) {
          std::size_t i = cell / m, j = cell % m;
          const double* base = stack.data() + i * m + j;
          // stride between replicates in the stack
          thread_local std::vector<double> vals;
          vals.resize(n_models);
          for (std::size_t r = 0; r < n_models; ++r)
            vals[r] = base[r * rows_per_block * m];
          reducer.reduce(vals.data(), 1, out.data());
          for (std::size_t g = 0; g < levels.size(); ++g)
            gamma_grids[g].values[(i0 + i) * m + j] = out[g];
        }
      });
    }
  } else {
    // pivot-slice blocks with per-replicate carry state
    const std::size_t plane = m * m;
    std::size_t slices_per_block = std::max<std::size_t>(
        1, stack_bytes / (n_models * plane * sizeof(double)));
    slices_per_block = std::min(slices_per_block, m);
    std::vector<double> stack(n_models * slices_per_block * plane);
    std::vector<detail::TriCumulator> cums;
    cums.reserve(n_models);
    for (std::size_t r = 0; r < n_models; ++r)
      cums.emplace_back(MvnModel(models[r].mean, models[r].cov), axis, 0);
    for (std::size_t p0 = 0; p0 < m; p0 += slices_per_block) {
      const std::size_t nb = std::min(slices_per_block, m - p0);
      parallel_for(n_models, [&](std::size_t lo, std::size_t hi) {
        auto sc = detail::TriCumulator::make_scratch(m);
        for (std::size_t r = lo; r < hi; ++r)
          for (std::size_t s = 0; s < nb; ++s)
            cums[r].emit_slice(p0 + s,
                               stack.data() + (r * slices_per_block + s) * plane, sc);
      });
      parallel_for(nb * plane, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> out(levels.size());
        thread_local std::vector<double> vals;
        for (std::size_t cell = lo; cell < hi; ++cell) {
          std::size_t s = cell / plane, uv = cell % plane;
          vals.resize(n_models);
          for (std::size_t r = 0; r < n_models; ++r)
            vals[r] = stack[(r * slices_per_block + s) * plane + uv];
          reducer.reduce(vals.data(), 1, out.data());
          for (std::size_t g = 0; g < levels.size(); ++g)
            gamma_grids[g].values[(p0 + s) * plane + uv] = out[g];
        }
      });
    }
  }

  QuantileCiResult result;
  result.tau = tau;
  result.gammas = request.gammas;
  result.centering = std_data.centering;
  result.scaling = std_data.scaling;
  result.config = config;
  result.grid = grid_spec;
  result.interpolated = interpolate;
  result.regularized_replicates = regularized;

  for (std::size_t g = 0; g < request.gammas.size(); ++g) {
    CdfGrid grid = interpolate ? upsample_grid(gamma_grids[g], 2) : gamma_grids[g];
    QuantileSet set = extract_quantile(grid, tau);
    result.gamma_grids.push_back(std::move(grid));
    result.gamma_sets.push_back(
        destandardize_set(set, std_data.centering, std_data.scaling));
  }
  (void)acc;
  return result;
}

}  // namespace mvq
