#include <filesystem>
#include <random>

#include "doctest.h"
#include "fgalgebra/folded_io.hpp"
#include "fgalgebra/simulate.hpp"
#include "fgalgebra/stats.hpp"
#include "support/errors.hpp"

using namespace fga;
namespace fs = std::filesystem;

namespace {

const Stack kCBA = Stack::parse("c;b;a");
const Stack kSite = Stack::parse(kSitecustomizeStack);

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("fga-sim-" + std::to_string(std::random_device{}()))) {}
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("default scenario") {
  auto spec = SimSpec::sleep_scenario();
  CHECK(spec.runs_per_side == 50);
  CHECK(spec.noise == 0.05);
  CHECK(spec.sample_period_ms == 1.0);
  auto t = spec.treatment();
  REQUIRE(t.size() == 4);
  CHECK(t[0].stack == "c;b;a");
  CHECK(t[0].dwell_ms == 150.0);
  CHECK(t[3].stack == kSitecustomizeStack);
  CHECK(t[3].dwell_ms == 100.0);
}

TEST_CASE("same seed gives identical runs") {
  auto spec = SimSpec::sleep_scenario();
  CHECK(simulate_runs(spec, Side::baseline) == simulate_runs(spec, Side::baseline));
  CHECK(simulate_runs(spec, Side::treatment) == simulate_runs(spec, Side::treatment));
  auto other = spec;
  other.seed += 1;
  CHECK(simulate_runs(spec, Side::baseline) != simulate_runs(other, Side::baseline));
}

TEST_CASE("noise-free runs are exact") {
  auto spec = SimSpec::sleep_scenario();
  spec.noise = 0.0;
  auto base = simulate_runs(spec, Side::baseline);
  auto treat = simulate_runs(spec, Side::treatment);
  for (const auto& g : base) CHECK(g == base.front());
  for (const auto& g : treat) CHECK(g == treat.front());
  auto d = diff(treat.front(), base.front());
  CHECK(d.at(kCBA) == -50.0);
  CHECK(d.at(kSite) == 100.0);
  CHECK(d.size() == 2);
  CHECK(base.front().unit() == Unit::milliseconds);
}

TEST_CASE("sampling period and unit conversion") {
  auto spec = SimSpec::sleep_scenario();
  spec.noise = 0.0;
  spec.sample_period_ms = 3.0;
  spec.unit = Unit::samples;
  auto g = simulate_runs(spec, Side::baseline).front();
  CHECK(g.at(kCBA) == 67.0);  // round(200 / 3)
  spec.unit = Unit::microseconds;
  CHECK(simulate_runs(spec, Side::baseline).front().at(kCBA) == 201000.0);
  spec.unit = Unit::milliseconds;
  CHECK(simulate_runs(spec, Side::baseline).front().at(kCBA) == 201.0);
}

TEST_CASE("jitter stays within the noise band") {
  auto spec = SimSpec::sleep_scenario();
  spec.noise = 0.05;
  for (const auto& g : simulate_runs(spec, Side::treatment)) {
    CHECK(g.at(kCBA) >= 142.0);
    CHECK(g.at(kCBA) <= 158.0);
    CHECK(g.at(kSite) >= 95.0);
    CHECK(g.at(kSite) <= 105.0);
  }
}

TEST_CASE("mean deltas of the default scenario") {
  auto spec = SimSpec::sleep_scenario();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    spec.seed = seed;
    auto b = simulate_runs(spec, Side::baseline), t = simulate_runs(spec, Side::treatment);
    auto parts = decompose(mean_graph(SampleSet(t, spec.unit)), mean_graph(SampleSet(b, spec.unit)));
    CHECK(parts.shrunk.at(kCBA) >= 42.5);
    CHECK(parts.shrunk.at(kCBA) <= 57.5);
    CHECK(parts.appeared.at(kSite) >= 85.0);
    CHECK(parts.appeared.at(kSite) <= 115.0);
  }
}

TEST_CASE("spec validation") {
  auto base = SimSpec::sleep_scenario();
  auto spec = base;
  spec.runs_per_side = 1;
  CHECK_ERROR(spec.validate(), InvalidConfig);
  spec = base;
  spec.noise = 1.0;
  CHECK_ERROR(spec.validate(), InvalidConfig);
  spec = base;
  spec.sample_period_ms = 0.0;
  CHECK_ERROR(spec.validate(), InvalidConfig);
  spec = base;
  spec.baseline[1].dwell_ms = -1;
  CHECK_ERROR(spec.validate(), InvalidConfig);
  spec = base;
  spec.edits.push_back({"nowhere", 1.0, DeltaClass::grown});
  CHECK_ERROR(spec.validate(), InvalidConfig);
  spec = base;
  spec.edits.push_back({"c", 60.0, DeltaClass::shrunk});
  CHECK_ERROR(spec.validate(), InvalidConfig);
  spec = base;
  spec.edits.push_back({"c;b;a", 1.0, DeltaClass::grown});
  CHECK_ERROR(spec.validate(), InvalidConfig);
  spec = base;
  spec.edits.push_back({"fresh", 0.0, DeltaClass::appeared});
  CHECK_ERROR(spec.validate(), InvalidConfig);
  spec = base;
  spec.baseline.push_back({"c", 3.0});
  CHECK_ERROR(spec.validate(), InvalidConfig);

  spec = base;
  spec.edits = {{"c", 0.0, DeltaClass::disappeared}};
  auto t = simulate_runs(spec, Side::treatment);
  CHECK_FALSE(t.front().contains(Stack::parse("c")));
}

TEST_CASE("spec from json") {
  auto spec = sim_spec_from_json(R"({"runs_per_side": 7, "noise": 0, "seed": 99, "unit": "samples",
      "baseline": [{"stack": "x;y", "dwell_ms": 10}],
      "edits": [{"stack": "x;y", "delta_ms": 4, "kind": "grown"}]})");
  CHECK(spec.runs_per_side == 7);
  CHECK(spec.seed == 99);
  CHECK(spec.unit == Unit::samples);
  auto t = simulate_runs(spec, Side::treatment);
  CHECK(t.size() == 7);
  CHECK(t.front().at(Stack::parse("x;y")) == 14.0);

  CHECK(sim_spec_from_json("{}").baseline.size() == 3);
  CHECK_ERROR(sim_spec_from_json("{"), InvalidConfig);
  CHECK_ERROR(sim_spec_from_json(R"({"unit": "years"})"), InvalidConfig);
  CHECK_ERROR(sim_spec_from_json(R"({"edits": [{"stack": "c", "kind": "moved"}]})"), InvalidConfig);
  CHECK_ERROR(sim_spec_from_json(R"({"noise": "lots"})"), InvalidConfig);
}

TEST_CASE("written directories") {
  TempDir a, b;
  auto spec = SimSpec::sleep_scenario();
  write_simulation(spec, a.path / "base", a.path / "treat");
  write_simulation(spec, b.path / "base", b.path / "treat");
  auto s = load_sample_dir(a.path / "base");
  CHECK(s.size() == 50);
  CHECK(s.names().front() == "run-000.folded");
  CHECK(s.names().back() == "run-049.folded");
  for (const char* side : {"base", "treat"}) {
    for (const auto& e : fs::directory_iterator(a.path / side)) {
      auto name = e.path().filename();
      CHECK(read_text_file(e.path()) == read_text_file(b.path / side / name));
    }
  }
  ParseOptions ms;
  ms.unit = Unit::milliseconds;
  auto runs = load_sample_dir(a.path / "treat", ms);
  CHECK(SampleSet(simulate_runs(spec, Side::treatment), Unit::milliseconds).runs()[3] == runs.runs()[3]);
}
