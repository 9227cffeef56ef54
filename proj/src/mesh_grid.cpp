#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "mvq/mesh.hpp"
#include "mvq/parallel.hpp"
#include "mvq/simd/kernels.hpp"
#include "internal_math.hpp"
#include "tri_cumulator.hpp"

namespace mvq {

GridSpec GridSpec::bivariate(double step, double lo, double hi) {
  GridSpec s;
  s.q = 2;
  s.step = step;
  s.lo = lo;
  s.hi = hi;
  s.validate();
  return s;
}

GridSpec GridSpec::trivariate(double step, double lo, double hi) {
  GridSpec s;
  s.q = 3;
  s.step = step;
  s.lo = lo;
  s.hi = hi;
  s.validate();
  return s;
}

void GridSpec::validate() const {
  if (q != 2 && q != 3) throw InvalidInputError("GridSpec: q must be 2 or 3");
  if (!(lo < hi) || !(step > 0.0)) throw InvalidInputError("GridSpec: bad bounds/step");
  if (lo > -4.0)
    throw InvalidInputError("GridSpec: lo must not exceed -4 (domain mass bound)");
  if (hi < 4.0)
    throw InvalidInputError("GridSpec: hi must be at least 4 (domain mass bound)");
  double ratio = (hi - lo) / step;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
    throw InvalidInputError("GridSpec: (hi-lo)/step is not an integer");
}

std::size_t GridSpec::nodes_per_axis() const {
  return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

std::size_t GridSpec::total_cells() const {
  std::size_t m = nodes_per_axis();
  std::size_t total = 1;
  for (std::size_t i = 0; i < q; ++i) total *= m;
  return total;
}

double CdfGrid::interpolate(const Vector& x) const {
  const std::size_t qq = q();
  std::size_t idx[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < qq; ++a) {
    const auto& ax = axes[a];
    double v = x(static_cast<Eigen::Index>(a));
    if (v <= ax.front()) {
      idx[a] = 0;
      frac[a] = 0.0;
    } else if (v >= ax.back()) {
      idx[a] = ax.size() - 2;
      frac[a] = 1.0;
    } else {
      auto it = std::upper_bound(ax.begin(), ax.end(), v);
      idx[a] = static_cast<std::size_t>(it - ax.begin()) - 1;
      frac[a] = (v - ax[idx[a]]) / (ax[idx[a] + 1] - ax[idx[a]]);
    }
  }
  if (qq == 2) {
    double v00 = at(idx[0], idx[1]), v10 = at(idx[0] + 1, idx[1]);
    double v01 = at(idx[0], idx[1] + 1), v11 = at(idx[0] + 1, idx[1] + 1);
    double a0 = v00 + frac[0] * (v10 - v00);
    double a1 = v01 + frac[0] * (v11 - v01);
    return a0 + frac[1] * (a1 - a0);
  }
  double c[2][2];
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj) {
      double v0 = at(idx[0] + di, idx[1] + dj, idx[2]);
      double v1 = at(idx[0] + di, idx[1] + dj, idx[2] + 1);
      c[di][dj] = v0 + frac[2] * (v1 - v0);
    }
  double b0 = c[0][0] + frac[1] * (c[0][1] - c[0][0]);
  double b1 = c[1][0] + frac[1] * (c[1][1] - c[1][0]);
  return b0 + frac[0] * (b1 - b0);
}

double domain_mass_bound(std::size_t q) {
  if (q < 1) throw InvalidInputError("domain_mass_bound: q must be >= 1");
  double tail = 1.0 - detail::norm_cdf(4.0) + detail::norm_cdf(-4.0);
  return 1.0 - double(q) * tail;
}

namespace {

std::vector<double> make_axis(const GridSpec& spec) {
  std::size_t m = spec.nodes_per_axis();
  std::vector<double> ax(m);
  for (std::size_t i = 0; i + 1 < m; ++i) ax[i] = spec.lo + double(i) * spec.step;
  ax[m - 1] = spec.hi;
  return ax;
}

void check_cells(std::size_t cells, std::size_t cap, const char* who) {
  if (cells > cap)
    throw ResourceError(std::string(who) + ": grid of " + std::to_string(cells) +
                        " cells exceeds the cap of " + std::to_string(cap));
}

void eval_grid_bivariate(const MvnModel& model, const GridSpec& spec, CdfGrid& grid) {
  const Vector mean = model.mean();
  const Vector sig = model.sigmas();
  const Matrix corr = corr_from_cov(model.cov());
  const double rho = corr(0, 1);
  const std::size_t m0 = grid.dim(0), m1 = grid.dim(1);
  std::vector<double> h0(m0), k1(m1);
  for (std::size_t i = 0; i < m0; ++i) h0[i] = (grid.axes[0][i] - mean(0)) / sig(0);
  for (std::size_t j = 0; j < m1; ++j) k1[j] = (grid.axes[1][j] - mean(1)) / sig(1);
  parallel_for(m0, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> hbuf(m1);
    for (std::size_t i = lo; i < hi; ++i) {
      std::fill(hbuf.begin(), hbuf.end(), h0[i]);
      simd::kernels().bvn_cdf_v(hbuf.data(), k1.data(), rho,
                                grid.values.data() + i * m1, m1);
    }
  });
}

// Trivariate grids: cumulative conditioning on a pivot axis (TriCumulator).
// The largest pairwise correlation stays inside the exact bivariate term.
void eval_grid_trivariate(const MvnModel& model, const GridSpec& spec, CdfGrid& grid) {
  const Matrix corr = corr_from_cov(model.cov());
  double a01 = std::abs(corr(0, 1)), a02 = std::abs(corr(0, 2)), a12 = std::abs(corr(1, 2));
  int piv = 2;
  if (a02 >= a01 && a02 >= a12) piv = 1;
  else if (a12 >= a01 && a12 >= a02) piv = 0;
  (void)spec;

  const std::size_t m = grid.dim(0);
  detail::TriCumulator cum(model, grid.axes[0], piv);
  auto sc = detail::TriCumulator::make_scratch(m);
  const int u = cum.axis_u(), v = cum.axis_v();
  std::vector<double> plane(m * m);
  for (std::size_t ip = 0; ip < m; ++ip) {
    cum.emit_slice(ip, plane.data(), sc);
    for (std::size_t iu = 0; iu < m; ++iu)
      for (std::size_t iv2 = 0; iv2 < m; ++iv2) {
        std::size_t coords[3];
        coords[static_cast<std::size_t>(piv)] = ip;
        coords[static_cast<std::size_t>(u)] = iu;
        coords[static_cast<std::size_t>(v)] = iv2;
        grid.at(coords[0], coords[1], coords[2]) = plane[iu * m + iv2];
      }
  }
}

}  // namespace

CdfGrid evaluate_cdf_grid(const MvnModel& model, const GridSpec& spec,
                          const CdfAccuracy& acc, std::size_t cell_cap) {
  spec.validate();
  if (spec.q != model.q())
    throw InvalidInputError("evaluate_cdf_grid: model dimension does not match grid");
  if (!model.positive_definite())
    throw SingularMatrixError("evaluate_cdf_grid: covariance is not positive definite");
  check_cells(spec.total_cells(), cell_cap, "evaluate_cdf_grid");
  (void)acc;  // q<=3 paths are deterministic and tighter than any practical abs_tol

  CdfGrid grid;
  grid.axes.assign(spec.q, make_axis(spec));
  grid.values.assign(spec.total_cells(), 0.0);
  if (spec.q == 2)
    eval_grid_bivariate(model, spec, grid);
  else
    eval_grid_trivariate(model, spec, grid);
  return grid;
}

namespace {

/// Monotone piecewise-cubic interpolation of a uniformly spaced line onto a
/// refinement; Fritsch-Carlson limited central-difference tangents.
void interp_line(const double* y, std::size_t n, std::size_t factor, double* out) {
  if (n == 1) {
    out[0] = y[0];
    return;
  }
  std::vector<double> mtan(n);
  mtan[0] = y[1] - y[0];
  mtan[n - 1] = y[n - 1] - y[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) mtan[i] = 0.5 * (y[i + 1] - y[i - 1]);
  // Fritsch-Carlson limiting (slopes in units of the grid step)
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double s = y[i + 1] - y[i];
    if (s == 0.0) {
      mtan[i] = 0.0;
      mtan[i + 1] = 0.0;
      continue;
    }
    double a = mtan[i] / s, b = mtan[i + 1] / s;
    if (a < 0.0) mtan[i] = 0.0;
    if (b < 0.0) mtan[i + 1] = 0.0;
    a = mtan[i] / s;
    b = mtan[i + 1] / s;
    double r2 = a * a + b * b;
    if (r2 > 9.0) {
      double t = 3.0 / std::sqrt(r2);
      mtan[i] *= t;
      mtan[i + 1] *= t;
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out[i * factor] = y[i];
    for (std::size_t j = 1; j < factor; ++j) {
      double t = double(j) / double(factor);
      double t2 = t * t, t3 = t2 * t;
      out[i * factor + j] = (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * mtan[i] +
                            (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * mtan[i + 1];
    }
  }
  out[(n - 1) * factor] = y[n - 1];
}

std::vector<double> refine_axis(const std::vector<double>& ax, std::size_t factor) {
  std::size_t n = ax.size();
  std::vector<double> out((n - 1) * factor + 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < factor; ++j)
      out[i * factor + j] = ax[i] + (ax[i + 1] - ax[i]) * double(j) / double(factor);
  out[(n - 1) * factor] = ax[n - 1];
  return out;
}

}  // namespace

CdfGrid upsample_grid(const CdfGrid& grid, std::size_t factor, std::size_t cell_cap) {
  if (factor < 1) throw InvalidInputError("upsample_grid: factor must be >= 1");
  if (factor == 1) return grid;
  const std::size_t q = grid.q();
  std::size_t cells = 1;
  for (std::size_t a = 0; a < q; ++a) cells *= (grid.dim(a) - 1) * factor + 1;
  check_cells(cells, cell_cap, "upsample_grid");

  CdfGrid cur = grid;
  for (std::size_t axis = 0; axis < q; ++axis) {
    std::size_t n_axis = cur.dim(axis);
    std::size_t n_new = (n_axis - 1) * factor + 1;
    // lines along `axis`: iterate over the product of the other dims
    std::size_t outer = 1, inner = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= cur.dim(a);
    for (std::size_t a = axis + 1; a < q; ++a) inner *= cur.dim(a);

    CdfGrid next;
    next.axes = cur.axes;
    next.axes[axis] = refine_axis(cur.axes[axis], factor);
    next.values.assign(outer * n_new * inner, 0.0);
    parallel_for(outer, [&](std::size_t olo, std::size_t ohi) {
      std::vector<double> line(n_axis), lout(n_new);
      for (std::size_t o = olo; o < ohi; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
          for (std::size_t i = 0; i < n_axis; ++i)
            line[i] = cur.values[(o * n_axis + i) * inner + in];
          interp_line(line.data(), n_axis, factor, lout.data());
          for (std::size_t i = 0; i < n_new; ++i)
            next.values[(o * n_new + i) * inner + in] = lout[i];
        }
      }
    });
    cur = std::move(next);
  }
  for (double& v : cur.values) v = std::min(1.0, std::max(0.0, v));
  return cur;
}

}  // namespace mvq
