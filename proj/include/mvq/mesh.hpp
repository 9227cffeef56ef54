#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mvq/mvn.hpp"

namespace mvq {

/// Tessellation of the standardized domain. Bounds default to +-4 per the
/// low-probability-mass argument; lo may not exceed -4 (correctness), hi may
/// extend above +4 (conservatism).
struct GridSpec {
  double lo = -4.0;
  double hi = 4.0;
  double step = 0.01;  // recommended: 0.01 for q=2, 0.1 for q=3
  std::size_t q = 2;

  static GridSpec bivariate(double step = 0.01, double lo = -4.0, double hi = 4.0);
  static GridSpec trivariate(double step = 0.1, double lo = -4.0, double hi = 4.0);

  void validate() const;
  /// Nodes per axis; (hi-lo)/step must be integral within 1e-9.
  std::size_t nodes_per_axis() const;
  std::size_t total_cells() const;
};

/// Default refusal threshold for grid allocations, in scalar cells.
inline constexpr std::size_t kDefaultCellCap = std::size_t(1) << 31;

/// q-dimensional tensor of CDF values over a tensor-product grid.
/// Layout: axis 0 slowest, last axis fastest (row-major).
struct CdfGrid {
  std::vector<std::vector<double>> axes;
  std::vector<double> values;

  std::size_t q() const { return axes.size(); }
  std::size_t dim(std::size_t a) const { return axes[a].size(); }
  std::size_t size() const { return values.size(); }

  double& at(std::size_t i, std::size_t j) { return values[i * dim(1) + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * dim(1) + j]; }
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return values[(i * dim(1) + j) * dim(2) + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return values[(i * dim(1) + j) * dim(2) + k];
  }

  /// Multilinear interpolation at a point inside the grid bounds (clamped to
  /// the boundary outside them).
  double interpolate(const Vector& x) const;
};

enum class DomainTag { standardized, original };

/// Extracted approximation of Q(tau): a polyline (q=2) or triangle mesh (q=3).
struct QuantileSet {
  double tau = 0.0;
  std::size_t q = 2;
  DomainTag domain_tag = DomainTag::standardized;
  Matrix vertices;  // one vertex per row
  std::vector<std::array<int, 2>> segments;   // q = 2
  std::vector<std::array<int, 3>> triangles;  // q = 3
  GridSpec grid;  // provenance of the extraction
};

/// Tensor of mvn_cdf values at every node of the grid, evaluated in the
/// model's own domain after per-axis standardization. Monotone along every
/// axis by construction.
CdfGrid evaluate_cdf_grid(const MvnModel& model, const GridSpec& spec,
                          const CdfAccuracy& acc = {},
                          std::size_t cell_cap = kDefaultCellCap);

/// Bonferroni lower bound on the standard-normal mass of the [-4,4]^q box:
/// 1 - q*(1 - Phi(4) + Phi(-4)).
double domain_mass_bound(std::size_t q);

/// Separable monotone piecewise-cubic upsampling by an integer factor per
/// axis. Original node values are preserved; output clamped to [0,1].
CdfGrid upsample_grid(const CdfGrid& grid, std::size_t factor,
                      std::size_t cell_cap = kDefaultCellCap);

/// Marching squares (q=2) / marching cubes via cube tessellation (q=3) with
/// linear edge interpolation. Throws GeometryError when tau is outside the
/// grid's value range.
QuantileSet extract_quantile(const CdfGrid& grid, double tau);

/// Intersection of the set geometry with the diagonal x_1 = ... = x_q.
Vector critical_point_from_set(const QuantileSet& set);

/// Map vertices through the inverse standardization transform.
QuantileSet destandardize_set(const QuantileSet& set, const Vector& centering,
                              const Vector& scaling);

struct ResidualStats {
  double mean_abs = 0.0;
  double max_abs = 0.0;
  std::vector<double> per_vertex;
};

/// Direct-CDF residual |mvn_cdf(vertex) - tau| per vertex of a standardized-
/// domain set (records the discretization error of the extraction).
ResidualStats vertex_cdf_residuals(const QuantileSet& set, const MvnModel& model,
                                   const CdfAccuracy& acc = {});

// -- exports ------------------------------------------------------------

/// prefix_vertices.csv + prefix_topology.csv
void export_quantile_csv(const QuantileSet& set, const std::string& path_prefix);
/// Single JSON document with geometry and grid metadata.
void export_quantile_json(const QuantileSet& set, const std::string& path,
                          const ResidualStats* residuals = nullptr);
/// ASCII STL (q=3 only).
void export_quantile_stl(const QuantileSet& set, const std::string& path);

}  // namespace mvq
