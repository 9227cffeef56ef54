#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "mvq/mesh.hpp"
#include "internal_math.hpp"

namespace mvq {

namespace {

#include "tables/mc_tables.inc"

constexpr int kCornerOffset[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                     {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdgeCorner[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                    {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                    {0, 4}, {1, 5}, {2, 6}, {3, 7}};

struct VertexPool {
  std::vector<std::array<double, 3>> pts;
  std::unordered_map<std::uint64_t, int> by_edge;

  int intern(std::uint64_t key, const std::array<double, 3>& p) {
    auto it = by_edge.find(key);
    if (it != by_edge.end()) return it->second;
    int id = static_cast<int>(pts.size());
    pts.push_back(p);
    by_edge.emplace(key, id);
    return id;
  }
};

double edge_t(double va, double vb, double tau) {
  double d = vb - va;
  if (d == 0.0) return 0.5;
  return std::clamp((tau - va) / d, 0.0, 1.0);
}

void extract_squares(const CdfGrid& grid, double tau, QuantileSet& out) {
  const std::size_t n0 = grid.dim(0), n1 = grid.dim(1);
  const auto& ax = grid.axes[0];
  const auto& ay = grid.axes[1];
  VertexPool pool;
  // grid edge key: axis * n0*n1 + i*n1 + j for the lower node (i, j)
  auto key_of = [&](int axis, std::size_t i, std::size_t j) {
    return std::uint64_t(axis) * n0 * n1 + i * n1 + j;
  };
  // cell edges: 0 = bottom (along axis0 at j), 1 = right (along axis1 at i+1),
  //             2 = top (along axis0 at j+1), 3 = left (along axis1 at i)
  auto vertex_on = [&](int edge, std::size_t i, std::size_t j, double v00, double v10,
                       double v11, double v01) {
    double t;
    std::array<double, 3> p{0.0, 0.0, 0.0};
    std::uint64_t key;
    switch (edge) {
      case 0:
        t = edge_t(v00, v10, tau);
        p = {ax[i] + t * (ax[i + 1] - ax[i]), ay[j], 0.0};
        key = key_of(0, i, j);
        break;
      case 1:
        t = edge_t(v10, v11, tau);
        p = {ax[i + 1], ay[j] + t * (ay[j + 1] - ay[j]), 0.0};
        key = key_of(1, i + 1, j);
        break;
      case 2:
        t = edge_t(v01, v11, tau);
        p = {ax[i] + t * (ax[i + 1] - ax[i]), ay[j + 1], 0.0};
        key = key_of(0, i, j + 1);
        break;
      default:
        t = edge_t(v00, v01, tau);
        p = {ax[i], ay[j] + t * (ay[j + 1] - ay[j]), 0.0};
        key = key_of(1, i, j);
        break;
    }
    return pool.intern(key, p);
  };

  for (std::size_t i = 0; i + 1 < n0; ++i) {
    for (std::size_t j = 0; j + 1 < n1; ++j) {
      double v00 = grid.at(i, j), v10 = grid.at(i + 1, j);
      double v11 = grid.at(i + 1, j + 1), v01 = grid.at(i, j + 1);
      int c = 0;
      if (v00 < tau) c |= 1;  // A
      if (v10 < tau) c |= 2;  // B
      if (v11 < tau) c |= 4;  // C
      if (v01 < tau) c |= 8;  // D
      if (c == 0 || c == 15) continue;
      auto emit = [&](int ea, int eb) {
        int a = vertex_on(ea, i, j, v00, v10, v11, v01);
        int b = vertex_on(eb, i, j, v00, v10, v11, v01);
        if (a != b) out.segments.push_back({a, b});
      };
      switch (c) {
        case 1: case 14: emit(3, 0); break;
        case 2: case 13: emit(0, 1); break;
        case 3: case 12: emit(3, 1); break;
        case 4: case 11: emit(1, 2); break;
        case 6: case 9:  emit(0, 2); break;
        case 7: case 8:  emit(2, 3); break;
        case 5: {
          bool center_in = 0.25 * (v00 + v10 + v11 + v01) < tau;
          if (center_in) { emit(0, 1); emit(2, 3); }
          else           { emit(3, 0); emit(1, 2); }
          break;
        }
        case 10: {
          bool center_in = 0.25 * (v00 + v10 + v11 + v01) < tau;
          if (center_in) { emit(3, 0); emit(1, 2); }
          else           { emit(0, 1); emit(2, 3); }
          break;
        }
        default: break;
      }
    }
  }
  out.vertices.resize(static_cast<Eigen::Index>(pool.pts.size()), 2);
  for (std::size_t v = 0; v < pool.pts.size(); ++v) {
    out.vertices(static_cast<Eigen::Index>(v), 0) = pool.pts[v][0];
    out.vertices(static_cast<Eigen::Index>(v), 1) = pool.pts[v][1];
  }
}

void extract_cubes(const CdfGrid& grid, double tau, QuantileSet& out) {
  const std::size_t n0 = grid.dim(0), n1 = grid.dim(1), n2 = grid.dim(2);
  VertexPool pool;
  auto key_of = [&](int axis, std::size_t i, std::size_t j, std::size_t k) {
    return (std::uint64_t(axis) * n0 + i) * n1 * n2 + j * n2 + k;
  };
  double corner_val[8];
  int corner_idx[8][3];
  for (std::size_t i = 0; i + 1 < n0; ++i) {
    for (std::size_t j = 0; j + 1 < n1; ++j) {
      for (std::size_t k = 0; k + 1 < n2; ++k) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          corner_idx[c][0] = static_cast<int>(i) + kCornerOffset[c][0];
          corner_idx[c][1] = static_cast<int>(j) + kCornerOffset[c][1];
          corner_idx[c][2] = static_cast<int>(k) + kCornerOffset[c][2];
          corner_val[c] = grid.at(corner_idx[c][0], corner_idx[c][1], corner_idx[c][2]);
          if (corner_val[c] < tau) cube |= (1 << c);
        }
        int edges = kEdgeTable[cube];
        if (edges == 0) continue;
        int edge_vert[12];
        for (int e = 0; e < 12; ++e) {
          if (!(edges & (1 << e))) continue;
          int ca = kEdgeCorner[e][0], cb = kEdgeCorner[e][1];
          int axis = 0;
          for (int a = 0; a < 3; ++a)
            if (corner_idx[ca][a] != corner_idx[cb][a]) axis = a;
          int base[3] = {std::min(corner_idx[ca][0], corner_idx[cb][0]),
                         std::min(corner_idx[ca][1], corner_idx[cb][1]),
                         std::min(corner_idx[ca][2], corner_idx[cb][2])};
          double va = corner_val[ca], vb = corner_val[cb];
          double t = edge_t(va, vb, tau);
          // parameter measured from corner ca toward cb
          std::array<double, 3> p;
          for (int a = 0; a < 3; ++a) p[a] = grid.axes[a][corner_idx[ca][a]];
          double lo = grid.axes[axis][base[axis]];
          double hi = grid.axes[axis][base[axis] + 1];
          double from = grid.axes[axis][corner_idx[ca][axis]];
          double to = grid.axes[axis][corner_idx[cb][axis]];
          p[axis] = from + t * (to - from);
          (void)lo; (void)hi;
          edge_vert[e] = pool.intern(
              key_of(axis, std::size_t(base[0]), std::size_t(base[1]), std::size_t(base[2])), p);
        }
        const int* tri = kTriTable[cube];
        for (int t3 = 0; tri[t3] != -1; t3 += 3) {
          int a = edge_vert[tri[t3]], b = edge_vert[tri[t3 + 1]], c = edge_vert[tri[t3 + 2]];
          if (a != b && b != c && a != c) out.triangles.push_back({a, b, c});
        }
      }
    }
  }
  out.vertices.resize(static_cast<Eigen::Index>(pool.pts.size()), 3);
  for (std::size_t v = 0; v < pool.pts.size(); ++v)
    for (int a = 0; a < 3; ++a)
      out.vertices(static_cast<Eigen::Index>(v), a) = pool.pts[v][a];
}

}  // namespace

QuantileSet extract_quantile(const CdfGrid& grid, double tau) {
  if (grid.q() != 2 && grid.q() != 3)
    throw InvalidInputError("extract_quantile: grid must be 2- or 3-dimensional");
  auto [mn, mx] = std::minmax_element(grid.values.begin(), grid.values.end());
  if (!(tau > *mn && tau < *mx))
    throw GeometryError("extract_quantile: tau = " + std::to_string(tau) +
                        " outside grid CDF range [" + std::to_string(*mn) + ", " +
                        std::to_string(*mx) + "] (empty set)");
  QuantileSet out;
  out.tau = tau;
  out.q = grid.q();
  out.domain_tag = DomainTag::standardized;
  out.grid.q = grid.q();
  out.grid.lo = grid.axes[0].front();
  out.grid.hi = grid.axes[0].back();
  out.grid.step = grid.axes[0].size() > 1 ? grid.axes[0][1] - grid.axes[0][0] : 0.0;
  if (grid.q() == 2)
    extract_squares(grid, tau, out);
  else
    extract_cubes(grid, tau, out);
  if (out.vertices.rows() == 0)
    throw GeometryError("extract_quantile: no crossings found for tau");
  return out;
}

Vector critical_point_from_set(const QuantileSet& set) {
  if (set.q == 2) {
    double best_t = 0.0;
    bool found = false;
    double best_gap = 1e300;
    for (const auto& s : set.segments) {
      Eigen::RowVector2d a = set.vertices.row(s[0]).head<2>();
      Eigen::RowVector2d b = set.vertices.row(s[1]).head<2>();
      double ga = a(0) - a(1), gb = b(0) - b(1);
      if (ga == 0.0 && gb == 0.0) continue;
      if ((ga <= 0.0 && gb >= 0.0) || (ga >= 0.0 && gb <= 0.0)) {
        double w = ga / (ga - gb);
        Eigen::RowVector2d p = a + w * (b - a);
        double t = 0.5 * (p(0) + p(1));
        double gap = std::abs(p(0) - p(1));
        if (gap < best_gap) {
          best_gap = gap;
          best_t = t;
          found = true;
        }
      }
    }
    if (!found)
      throw GeometryError("critical_point_from_set: no diagonal crossing "
                          "(grid bounds may truncate the contour)");
    Vector v(2);
    v << best_t, best_t;
    return v;
  }
  // q = 3: intersect the line x = y = z with each triangle
  bool found = false;
  double best_t = 0.0, best_res = 1e300;
  for (const auto& tri : set.triangles) {
    Eigen::Vector3d p0 = set.vertices.row(tri[0]).head<3>();
    Eigen::Vector3d p1 = set.vertices.row(tri[1]).head<3>();
    Eigen::Vector3d p2 = set.vertices.row(tri[2]).head<3>();
    Eigen::Matrix3d A;
    A.col(0) = p1 - p0;
    A.col(1) = p2 - p0;
    A.col(2) = -Eigen::Vector3d::Ones();
    Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    if (!lu.isInvertible()) continue;
    Eigen::Vector3d sol = lu.solve(-p0);
    double a = sol(0), b = sol(1), t = sol(2);
    const double eps = 1e-9;
    if (a >= -eps && b >= -eps && a + b <= 1.0 + eps) {
      Eigen::Vector3d p = p0 + a * (p1 - p0) + b * (p2 - p0);
      double res = (p - Eigen::Vector3d::Constant(t)).cwiseAbs().maxCoeff();
      if (res < best_res) {
        best_res = res;
        best_t = t;
        found = true;
      }
    }
  }
  if (!found)
    throw GeometryError("critical_point_from_set: no diagonal crossing "
                        "(grid bounds may truncate the iso-surface)");
  Vector v(3);
  v << best_t, best_t, best_t;
  return v;
}

QuantileSet destandardize_set(const QuantileSet& set, const Vector& centering,
                              const Vector& scaling) {
  QuantileSet out = set;
  out.vertices = destandardize(set.vertices, centering, scaling);
  out.domain_tag = DomainTag::original;
  return out;
}

ResidualStats vertex_cdf_residuals(const QuantileSet& set, const MvnModel& model,
                                   const CdfAccuracy& acc) {
  ResidualStats st;
  st.per_vertex.resize(static_cast<std::size_t>(set.vertices.rows()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < set.vertices.rows(); ++i) {
    Vector x = set.vertices.row(i).transpose();
    double r = std::abs(mvn_cdf(x, model, acc) - set.tau);
    st.per_vertex[static_cast<std::size_t>(i)] = r;
    st.max_abs = std::max(st.max_abs, r);
    sum += r;
  }
  st.mean_abs = set.vertices.rows() ? sum / double(set.vertices.rows()) : 0.0;
  return st;
}

void export_quantile_csv(const QuantileSet& set, const std::string& path_prefix) {
  {
    std::ofstream f(path_prefix + "_vertices.csv");
    if (!f) throw InvalidInputError("export_quantile_csv: cannot open output");
    f << "id";
    for (std::size_t a = 0; a < set.q; ++a) f << ",x" << a;
    f << "\n";
    f.precision(12);
    for (Eigen::Index i = 0; i < set.vertices.rows(); ++i) {
      f << i;
      for (std::size_t a = 0; a < set.q; ++a) f << "," << set.vertices(i, static_cast<Eigen::Index>(a));
      f << "\n";
    }
  }
  std::ofstream f(path_prefix + "_topology.csv");
  if (!f) throw InvalidInputError("export_quantile_csv: cannot open output");
  if (set.q == 2) {
    f << "segment,i0,i1\n";
    for (std::size_t s = 0; s < set.segments.size(); ++s)
      f << s << "," << set.segments[s][0] << "," << set.segments[s][1] << "\n";
  } else {
    f << "triangle,i0,i1,i2\n";
    for (std::size_t s = 0; s < set.triangles.size(); ++s)
      f << s << "," << set.triangles[s][0] << "," << set.triangles[s][1] << ","
        << set.triangles[s][2] << "\n";
  }
}

void export_quantile_json(const QuantileSet& set, const std::string& path,
                          const ResidualStats* residuals) {
  nlohmann::json j;
  j["tau"] = set.tau;
  j["q"] = set.q;
  j["domain"] = set.domain_tag == DomainTag::standardized ? "standardized" : "original";
  j["grid"] = {{"lo", set.grid.lo}, {"hi", set.grid.hi}, {"step", set.grid.step}, {"q", set.grid.q}};
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < set.vertices.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t a = 0; a < set.q; ++a) row.push_back(set.vertices(i, static_cast<Eigen::Index>(a)));
    verts.push_back(std::move(row));
  }
  if (set.q == 2) {
    auto& segs = j["segments"] = nlohmann::json::array();
    for (const auto& s : set.segments) segs.push_back({s[0], s[1]});
  } else {
    auto& tris = j["triangles"] = nlohmann::json::array();
    for (const auto& t : set.triangles) tris.push_back({t[0], t[1], t[2]});
  }
  if (residuals) {
    j["cdf_residuals"] = {{"mean_abs", residuals->mean_abs},
                          {"max_abs", residuals->max_abs}};
  }
  std::ofstream f(path);
  if (!f) throw InvalidInputError("export_quantile_json: cannot open output");
  f << j.dump(2) << "\n";
}

void export_quantile_stl(const QuantileSet& set, const std::string& path) {
  if (set.q != 3)
    throw InvalidInputError("export_quantile_stl: STL export is for iso-surfaces (q=3)");
  std::ofstream f(path);
  if (!f) throw InvalidInputError("export_quantile_stl: cannot open output");
  f.precision(9);
  f << "solid quantile\n";
  for (const auto& t : set.triangles) {
    Eigen::Vector3d p0 = set.vertices.row(t[0]).head<3>();
    Eigen::Vector3d p1 = set.vertices.row(t[1]).head<3>();
    Eigen::Vector3d p2 = set.vertices.row(t[2]).head<3>();
    Eigen::Vector3d n = (p1 - p0).cross(p2 - p0);
    double len = n.norm();
    if (len > 0) n /= len;
    f << " facet normal " << n(0) << " " << n(1) << " " << n(2) << "\n  outer loop\n";
    for (const auto& p : {p0, p1, p2})
      f << "   vertex " << p(0) << " " << p(1) << " " << p(2) << "\n";
    f << "  endloop\n endfacet\n";
  }
  f << "endsolid quantile\n";
}

}  // namespace mvq
