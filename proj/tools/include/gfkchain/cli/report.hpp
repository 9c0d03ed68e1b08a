#pragma once

#include <string>
#include <vector>

#include "gfkchain/cli/io.hpp"

namespace gfkchain::cli {

struct TrendSeries {
  std::string kernel;
  std::vector<int> n_intermediates;  // ascending
  std::vector<double> mean_accuracy;
};

/// Mean chain accuracy per kernel and intermediate count. Rows with a NaN
/// accuracy (failed trials) are skipped. Throws UserError("no rows") if empty.
std::vector<TrendSeries> trend_from_results(const std::vector<ResultRow>& rows);

/// Line chart, one polyline per series. Each polyline carries the plotted
/// means in a data-values attribute, rounded to 3 decimals.
std::string render_svg(const std::vector<TrendSeries>& series);

}  // namespace gfkchain::cli
