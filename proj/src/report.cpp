#include "fgalgebra/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "fgalgebra/folded_io.hpp"

namespace fga {

std::string report_to_json(const RegressionReport& report, int indent) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchemaVersion;
  j["n1"] = report.n1;
  j["n2"] = report.n2;
  j["p"] = report.p;
  j["scaling"] = std::string(to_string(report.scaling));
  j["g_squared"] = report.test.g_squared;
  j["statistic_f"] = report.test.statistic_f;
  j["p_value"] = report.test.p_value;
  j["f_star"] = report.test.critical_f_star;
  j["ridge_applied"] = report.test.ridge_applied;
  auto stacks = nlohmann::ordered_json::array();
  for (const StackResult& s : report.stacks) {
    nlohmann::ordered_json row;
    row["stack"] = s.stack.str();
    row["delta"] = s.delta;
    row["var_pooled"] = s.var_pooled;
    row["ci_low"] = s.ci.low;
    row["ci_high"] = s.ci.high;
    row["significant"] = s.significant;
    if (s.delta_class) row["class"] = std::string(to_string(*s.delta_class));
    else row["class"] = nullptr;
    stacks.push_back(std::move(row));
  }
  j["stacks"] = std::move(stacks);
  return j.dump(indent) + "\n";
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string format_report_text(const RegressionReport& report, bool color) {
  const char* red = color ? "\033[31m" : "";
  const char* blue = color ? "\033[34m" : "";
  const char* bold = color ? "\033[1m" : "";
  const char* reset = color ? "\033[0m" : "";
  const std::string unit(to_string(report.unit));

  std::string out;
  out += "Hotelling T^2 two-sample test (" + std::string(to_string(report.scaling)) + " scaling)\n";
  out += "  runs:        baseline " + std::to_string(report.n1) + ", candidate " + std::to_string(report.n2) + "\n";
  out += "  stacks:      " + std::to_string(report.p) + " tested\n";
  out += "  G^2:         " + general(report.test.g_squared) + "\n";
  out += "  F:           " + general(report.test.statistic_f) + " ~ F(" + std::to_string(report.test.dof1) + ", " +
         std::to_string(report.test.dof2) + ")\n";
  out += "  F*:          " + general(report.test.critical_f_star) + "\n";
  out += "  p-value:     " + general(report.test.p_value) + "\n";
  if (report.test.ridge_applied) out += "  note:        ridge regularization applied to the pooled covariance\n";

  std::vector<const StackResult*> sig;
  for (const StackResult& s : report.stacks) {
    if (s.significant) sig.push_back(&s);
  }
  std::stable_sort(sig.begin(), sig.end(),
                   [](const StackResult* a, const StackResult* b) { return std::fabs(a->delta) > std::fabs(b->delta); });

  if (sig.empty()) {
    out += std::string(bold) + "No significant difference." + reset + "\n";
    return out;
  }
  out += std::string(bold) + "Significant stacks (" + std::to_string(sig.size()) + "):" + reset + "\n";
  for (const StackResult* s : sig) {
    const char* tint = s->delta > 0 ? red : blue;
    const std::string cls = s->delta_class ? std::string(to_string(*s->delta_class)) : "-";
    out += "  " + std::string(tint) + (s->delta > 0 ? "+" : "") + fixed(s->delta, 3) + " " + unit + reset + "  [" +
           fixed(s->ci.low, 3) + ", " + fixed(s->ci.high, 3) + "]  " + cls + "  " + s->stack.str() + "\n";
  }
  return out;
}

}  // namespace fga
