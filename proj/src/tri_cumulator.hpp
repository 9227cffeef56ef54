#pragma once

// Streaming trivariate CDF evaluation over a tensor grid by cumulative
// conditioning on one pivot axis. Slices are emitted in pivot order, so a
// bootstrap stack can be processed in slabs while each replicate keeps only
// its accumulated plane as carry state.

#include <vector>

#include "mvq/mesh.hpp"
#include "mvq/parallel.hpp"
#include "mvq/simd/kernels.hpp"
#include "internal_math.hpp"

namespace mvq::detail {

class TriCumulator {
 public:
  struct Scratch {
    std::vector<double> hbuf;
    std::vector<double> krow;
    std::vector<double> out;
  };

  /// Axes are the standardized grid coordinates (identical per axis).
  /// Plane layout of emitted slices: index = iu * m + iv where u and v are
  /// the non-pivot axes in ascending order.
  TriCumulator(const MvnModel& model, const std::vector<double>& axis, int pivot)
      : pivot_(pivot), m_(axis.size()) {
    const Vector mean = model.mean();
    const Vector sig = model.sigmas();
    const Matrix corr = corr_from_cov(model.cov());
    u_ = (pivot_ == 0) ? 1 : 0;
    v_ = (pivot_ == 2) ? 1 : 2;
    r_pu_ = corr(pivot_, u_);
    r_pv_ = corr(pivot_, v_);
    double r_uv = corr(u_, v_);
    su_ = std::sqrt(std::max(1.0 - r_pu_ * r_pu_, 1e-14));
    sv_ = std::sqrt(std::max(1.0 - r_pv_ * r_pv_, 1e-14));
    rc_ = std::clamp((r_uv - r_pu_ * r_pv_) / (su_ * sv_), -1.0 + 1e-12, 1.0 - 1e-12);
    bu_.resize(m_);
    bv_.resize(m_);
    bp_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      bu_[i] = (axis[i] - mean(u_)) / sig(u_);
      bv_[i] = (axis[i] - mean(v_)) / sig(v_);
      bp_[i] = (axis[i] - mean(pivot_)) / sig(pivot_);
    }
    step_ = m_ > 1 ? axis[1] - axis[0] : 1.0;
    double smin = std::min(su_, sv_);
    sub_ = std::max(1, std::min(32, int(std::ceil(step_ / (2.0 * smin)))));
    accum_.assign(m_ * m_, 0.0);
    next_slice_ = 0;
  }

  int pivot() const { return pivot_; }
  int axis_u() const { return u_; }
  int axis_v() const { return v_; }
  std::size_t next_slice() const { return next_slice_; }

  static Scratch make_scratch(std::size_t m) {
    return Scratch{std::vector<double>(m * m), std::vector<double>(m),
                   std::vector<double>(m * m)};
  }

  /// Integrate up to pivot slice `ip` (inclusive) and write the plane of CDF
  /// values for that slice. Must be called with strictly increasing ip.
  void emit_slice(std::size_t ip, double* plane_out, Scratch& sc) {
    if (next_slice_ == 0) {
      // far-tail integral up to the first node
      const double t_start = -8.5;
      const int tail_panels = 16;
      for (int p = 0; p < tail_panels; ++p) {
        double a = t_start + (bp_[0] - t_start) * double(p) / tail_panels;
        double b = t_start + (bp_[0] - t_start) * double(p + 1) / tail_panels;
        add_panel(a, b, 1, sc);
      }
      next_slice_ = 1;
      if (ip == 0) {
        write(plane_out);
        return;
      }
    }
    while (next_slice_ <= ip) {
      add_panel(bp_[next_slice_ - 1], bp_[next_slice_], sub_, sc);
      ++next_slice_;
    }
    write(plane_out);
  }

 private:
  void write(double* out) const {
    for (std::size_t i = 0; i < m_ * m_; ++i)
      out[i] = std::min(1.0, std::max(0.0, accum_[i]));
  }

  void add_panel(double t0, double t1, int pieces, Scratch& sc) {
    const auto& g = gauss_legendre(8);
    for (int s = 0; s < pieces; ++s) {
      double a = t0 + (t1 - t0) * double(s) / pieces;
      double b = t0 + (t1 - t0) * double(s + 1) / pieces;
      double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int gn = 0; gn < 8; ++gn) {
        double t = mid + half * g.x[gn];
        double wphi = half * g.w[gn] * norm_pdf(t);
        if (wphi < 1e-300) continue;
        for (std::size_t iv2 = 0; iv2 < m_; ++iv2)
          sc.krow[iv2] = (bv_[iv2] - r_pv_ * t) / sv_;
        for (std::size_t iu = 0; iu < m_; ++iu) {
          double h = (bu_[iu] - r_pu_ * t) / su_;
          std::fill(sc.hbuf.begin() + iu * m_, sc.hbuf.begin() + (iu + 1) * m_, h);
        }
        for (std::size_t iu = 0; iu < m_; ++iu)
          simd::kernels().bvn_cdf_v(sc.hbuf.data() + iu * m_, sc.krow.data(), rc_,
                                    sc.out.data() + iu * m_, m_);
        for (std::size_t i = 0; i < m_ * m_; ++i) accum_[i] += wphi * sc.out[i];
      }
    }
  }

  int pivot_, u_, v_;
  std::size_t m_;
  double r_pu_, r_pv_, su_, sv_, rc_, step_;
  int sub_;
  std::vector<double> bu_, bv_, bp_;
  std::vector<double> accum_;
  std::size_t next_slice_;
};

}  // namespace mvq::detail
