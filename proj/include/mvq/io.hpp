#pragma once

#include <string>
#include <vector>

#include "mvq/casestudy.hpp"
#include "mvq/core_stats.hpp"

namespace mvq {

inline constexpr const char* kVersion = "1.0.0";

/// One observation per line; optional header row (detected by non-numeric
/// fields); configurable delimiter. Parse errors report the line number.
DataMatrix read_data_csv(const std::string& path, char delimiter = ',');

/// Long-format SRS table: frequency,sample_id,axis,value. Axis labels keep
/// first-appearance order; frequencies are sorted ascending.
SrsEnsemble read_srs_long_csv(const std::string& path, char delimiter = ',');

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header);

}  // namespace mvq
