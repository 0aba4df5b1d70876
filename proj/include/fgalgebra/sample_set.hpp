#pragma once

#include <string>
#include <vector>

#include "fgalgebra/core_model.hpp"

namespace fga {

// Flame graphs from repeated profiling runs of one code base. Holds at least
// one run; every run carries the set's unit.
class SampleSet {
 public:
  SampleSet(std::vector<FlameGraph> runs, Unit unit, std::vector<std::string> names = {});

  std::span<const FlameGraph> runs() const noexcept { return runs_; }
  // Source of each run (file name), empty when built in memory.
  std::span<const std::string> names() const noexcept { return names_; }
  std::size_t size() const noexcept { return runs_.size(); }
  Unit unit() const noexcept { return unit_; }

 private:
  std::vector<FlameGraph> runs_;
  std::vector<std::string> names_;
  Unit unit_;
};

}  // namespace fga
