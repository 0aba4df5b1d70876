#include "fgalgebra/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"

#include "fgalgebra/folded_io.hpp"

namespace fga {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform on [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double to_unit(double samples, double period_ms, Unit unit) {
  switch (unit) {
    case Unit::samples: return samples;
    case Unit::microseconds: return samples * period_ms * 1000.0;
    case Unit::milliseconds:
    case Unit::unitless: return samples * period_ms;
  }
  return samples;
}

const StackDwell* find_stack(const std::vector<StackDwell>& v, const std::string& s) {
  auto it = std::find_if(v.begin(), v.end(), [&](const StackDwell& d) { return d.stack == s; });
  return it == v.end() ? nullptr : &*it;
}

[[noreturn]] void bad_spec(const std::string& why) { throw Error(ErrorCode::InvalidConfig, "simulation spec: " + why); }

}  // namespace

SimSpec SimSpec::sleep_scenario() {
  SimSpec spec;
  spec.baseline = {{"c;b;a", 200.0}, {"c;b", 100.0}, {"c", 50.0}};
  spec.edits = {{"c;b;a", 50.0, DeltaClass::shrunk}, {std::string(kSitecustomizeStack), 100.0, DeltaClass::appeared}};
  return spec;
}

void SimSpec::validate() const {
  if (runs_per_side < 2) bad_spec("runs_per_side must be >= 2");
  if (!(sample_period_ms > 0.0) || !std::isfinite(sample_period_ms)) bad_spec("sample_period_ms must be > 0");
  if (!(noise >= 0.0 && noise < 1.0)) bad_spec("noise must lie in [0, 1)");
  for (const StackDwell& d : baseline) {
    Stack::parse(d.stack);
    if (!(d.dwell_ms > 0.0) || !std::isfinite(d.dwell_ms)) bad_spec("dwell for '" + d.stack + "' must be > 0");
    if (std::count_if(baseline.begin(), baseline.end(), [&](const StackDwell& o) { return o.stack == d.stack; }) > 1) {
      bad_spec("duplicate baseline stack '" + d.stack + "'");
    }
  }
  for (const SimEdit& e : edits) {
    Stack::parse(e.stack);
    if (std::count_if(edits.begin(), edits.end(), [&](const SimEdit& o) { return o.stack == e.stack; }) > 1) {
      bad_spec("stack '" + e.stack + "' edited more than once");
    }
    const StackDwell* base = find_stack(baseline, e.stack);
    const bool needs_base = e.kind != DeltaClass::appeared;
    if (needs_base && base == nullptr) bad_spec("edit on unknown stack '" + e.stack + "'");
    if (!needs_base && base != nullptr) bad_spec("appeared stack '" + e.stack + "' already in baseline");
    if (e.kind != DeltaClass::disappeared && (!(e.delta_ms > 0.0) || !std::isfinite(e.delta_ms))) {
      bad_spec("edit delta for '" + e.stack + "' must be > 0");
    }
    if (e.kind == DeltaClass::shrunk && !(e.delta_ms < base->dwell_ms)) {
      bad_spec("shrunk stack '" + e.stack + "' would reach zero dwell");
    }
  }
}

std::vector<StackDwell> SimSpec::treatment() const {
  std::vector<StackDwell> out = baseline;
  for (const SimEdit& e : edits) {
    auto it = std::find_if(out.begin(), out.end(), [&](const StackDwell& d) { return d.stack == e.stack; });
    switch (e.kind) {
      case DeltaClass::appeared: out.push_back({e.stack, e.delta_ms}); break;
      case DeltaClass::grown: it->dwell_ms += e.delta_ms; break;
      case DeltaClass::shrunk: it->dwell_ms -= e.delta_ms; break;
      case DeltaClass::disappeared: out.erase(it); break;
    }
  }
  return out;
}

std::vector<FlameGraph> simulate_runs(const SimSpec& spec, Side side) {
  spec.validate();
  const std::vector<StackDwell> dwell = side == Side::baseline ? spec.baseline : spec.treatment();
  std::vector<Stack> stacks;
  for (const StackDwell& d : dwell) stacks.push_back(Stack::parse(d.stack));

  std::mt19937_64 rng(splitmix64(spec.seed ^ (side == Side::baseline ? 0x0ULL : 0xa5a5a5a5a5a5a5a5ULL)));
  std::vector<FlameGraph> runs;
  runs.reserve(spec.runs_per_side);
  for (std::size_t r = 0; r < spec.runs_per_side; ++r) {
    std::vector<FlameGraph::Entry> entries;
    for (std::size_t k = 0; k < dwell.size(); ++k) {
      const double jitter = spec.noise * (2.0 * unit_uniform(rng) - 1.0);
      const double samples = std::round(dwell[k].dwell_ms * (1.0 + jitter) / spec.sample_period_ms);
      if (samples > 0.0) entries.emplace_back(stacks[k], to_unit(samples, spec.sample_period_ms, spec.unit));
    }
    runs.push_back(FlameGraph::from_entries(std::move(entries), spec.unit));
  }
  return runs;
}

void write_simulation(const SimSpec& spec, const std::filesystem::path& baseline_dir,
                      const std::filesystem::path& treatment_dir) {
  for (auto [side, dir] : {std::pair{Side::baseline, baseline_dir}, std::pair{Side::treatment, treatment_dir}}) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
    std::vector<FlameGraph> runs = simulate_runs(spec, side);
    for (std::size_t r = 0; r < runs.size(); ++r) {
      char name[32];
      std::snprintf(name, sizeof name, "run-%03zu.folded", r);
      write_text_file(dir / name, emit_folded(runs[r]));
    }
  }
}

SimSpec sim_spec_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad_spec(e.what());
  }
  SimSpec spec = SimSpec::sleep_scenario();
  try {
    if (j.contains("runs_per_side")) spec.runs_per_side = j.at("runs_per_side").get<std::size_t>();
    if (j.contains("sample_period_ms")) spec.sample_period_ms = j.at("sample_period_ms").get<double>();
    if (j.contains("noise")) spec.noise = j.at("noise").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("unit")) {
      auto u = parse_unit(j.at("unit").get<std::string>());
      if (!u) bad_spec("unknown unit");
      spec.unit = *u;
    }
    if (j.contains("baseline")) {
      spec.baseline.clear();
      for (const auto& b : j.at("baseline")) spec.baseline.push_back({b.at("stack"), b.at("dwell_ms")});
    }
    if (j.contains("edits")) {
      spec.edits.clear();
      for (const auto& e : j.at("edits")) {
        const std::string kind = e.at("kind");
        SimEdit edit{e.at("stack"), e.value("delta_ms", 0.0), DeltaClass::grown};
        if (kind == "appeared") edit.kind = DeltaClass::appeared;
        else if (kind == "grown") edit.kind = DeltaClass::grown;
        else if (kind == "disappeared") edit.kind = DeltaClass::disappeared;
        else if (kind == "shrunk") edit.kind = DeltaClass::shrunk;
        else bad_spec("unknown edit kind '" + kind + "'");
        spec.edits.push_back(std::move(edit));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    bad_spec(e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace fga
