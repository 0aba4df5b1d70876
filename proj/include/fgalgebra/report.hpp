#pragma once

#include <string>

#include "fgalgebra/stats.hpp"

namespace fga {

inline constexpr int kReportSchemaVersion = 1;

// Stable machine-readable report:
// {schema, n1, n2, p, scaling, g_squared, statistic_f, p_value, f_star,
//  ridge_applied, stacks: [{stack, delta, var_pooled, ci_low, ci_high,
//  significant, class}]}
// `class` is null for stacks that are not significant.
std::string report_to_json(const RegressionReport& report, int indent = 2);

// Human summary; significant stacks listed by |delta| descending.
std::string format_report_text(const RegressionReport& report, bool color);

}  // namespace fga
