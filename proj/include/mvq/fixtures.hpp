#pragma once

#include "mvq/core_stats.hpp"

namespace mvq::fixtures {

/// Tri-axial SRS values (G) at 200.24 Hz, nine shocks by three axes.
inline DataMatrix shock_srs_200hz() {
  Matrix m(9, 3);
  m << 8.49, 5.76, 2.75,
       6.44, 7.81, 3.80,
       5.26, 5.65, 2.67,
       3.27, 4.27, 3.27,
       4.81, 5.65, 2.47,
       3.66, 10.64, 3.24,
       4.96, 6.63, 3.62,
       5.23, 14.61, 3.39,
       5.27, 10.14, 4.06;
  return DataMatrix(std::move(m));
}

inline constexpr double kShockFrequencyHz = 200.24;

}  // namespace mvq::fixtures
