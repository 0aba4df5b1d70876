#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fgalgebra/algebra.hpp"
#include "fgalgebra/core_model.hpp"

namespace fga {

struct StackDwell {
  std::string stack;
  double dwell_ms = 0.0;
};

struct SimEdit {
  std::string stack;
  double delta_ms = 0.0;  // magnitude; ignored for disappeared
  DeltaClass kind = DeltaClass::grown;
};

// Synthetic profiling scenario: every run of a side records each stack with
// weight round(dwell * (1 + j) / sample_period) samples, j ~ U[-noise, noise]
// drawn independently per stack and run, converted to `unit`.
struct SimSpec {
  std::size_t runs_per_side = 50;
  double sample_period_ms = 1.0;
  std::vector<StackDwell> baseline;
  std::vector<SimEdit> edits;
  double noise = 0.05;
  std::uint64_t seed = 20230101;
  Unit unit = Unit::milliseconds;

  // The sleep-based scenario: c;b;a drops from 200 to 150 ms and a 100 ms
  // sitecustomize start-up stack appears. c;b and c keep 100 and 50 ms of
  // own time.
  static SimSpec sleep_scenario();

  // Throws InvalidConfig.
  void validate() const;

  // Baseline dwell times with the edits applied.
  std::vector<StackDwell> treatment() const;
};

inline constexpr std::string_view kSitecustomizeStack = "importlib._bootstrap:_find_and_load;sitecustomize:<module>";

enum class Side { baseline, treatment };

std::vector<FlameGraph> simulate_runs(const SimSpec& spec, Side side);

// Writes run-NNN.folded files into both directories (created if missing).
void write_simulation(const SimSpec& spec, const std::filesystem::path& baseline_dir,
                      const std::filesystem::path& treatment_dir);

// JSON form: {"runs_per_side", "sample_period_ms", "noise", "seed", "unit",
// "baseline": [{"stack", "dwell_ms"}], "edits": [{"stack", "delta_ms", "kind"}]}.
// Missing keys keep the sleep_scenario() values.
SimSpec sim_spec_from_json(std::string_view text);

}  // namespace fga
