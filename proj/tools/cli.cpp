#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"

#include "fgalgebra/algebra.hpp"
#include "fgalgebra/folded_io.hpp"
#include "fgalgebra/report.hpp"
#include "fgalgebra/simulate.hpp"
#include "fgalgebra/stats.hpp"

namespace fga::cli {

namespace {

struct InputFlags {
  std::string normalizer = "identity";
  std::string unit = "samples";

  ParseOptions options() const {
    ParseOptions o;
    o.normalizer = normalizer == "strip-location" ? FrameNormalizer::strip_trailing_location()
                                                  : FrameNormalizer::identity();
    o.unit = parse_unit(unit).value_or(Unit::samples);
    return o;
  }
};

void add_input_flags(CLI::App* cmd, InputFlags& flags) {
  cmd->add_option("--normalizer", flags.normalizer, "Frame normalizer")
      ->check(CLI::IsMember({"identity", "strip-location"}));
  cmd->add_option("--unit", flags.unit, "Weight unit of the inputs")
      ->check(CLI::IsMember({"samples", "us", "ms", "unitless"}));
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample:
    case ErrorCode::EmptyBasis:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::DegenerateDof:
    case ErrorCode::SingularCovariance:
      return kPrecondition;
    default:
      return kUsageOrIo;
  }
}

std::string six_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color) {
  CLI::App app{"Flame graph algebra: differential decomposition and Hotelling T^2 regression gating", "fgalgebra"};
  app.require_subcommand(1);

  // diff
  InputFlags diff_in;
  std::string diff_a, diff_b, diff_norm_by;
  auto* diff_cmd = app.add_subcommand("diff", "Signed folded difference (second - first)");
  diff_cmd->add_option("first", diff_a, "Baseline folded file")->required();
  diff_cmd->add_option("second", diff_b, "Candidate folded file")->required();
  diff_cmd->add_option("--normalize-by", diff_norm_by, "Divide by the norm of the first or second input")
      ->check(CLI::IsMember({"first", "second"}));
  add_input_flags(diff_cmd, diff_in);

  // decompose
  InputFlags dec_in;
  std::string dec_a, dec_b, dec_out, dec_norm_by;
  auto* dec_cmd = app.add_subcommand("decompose", "Write appeared/grown/disappeared/shrunk folded files");
  dec_cmd->add_option("first", dec_a, "Baseline folded file")->required();
  dec_cmd->add_option("second", dec_b, "Candidate folded file")->required();
  dec_cmd->add_option("out_dir", dec_out, "Output directory")->required();
  dec_cmd->add_option("--normalize-by", dec_norm_by, "Divide by the norm of the first or second input")
      ->check(CLI::IsMember({"first", "second"}));
  add_input_flags(dec_cmd, dec_in);

  // similarity
  InputFlags sim_in;
  std::string sim_a, sim_b;
  auto* sim_cmd = app.add_subcommand("similarity", "Print 1 - |f-g| / (|f|+|g|)");
  sim_cmd->add_option("first", sim_a)->required();
  sim_cmd->add_option("second", sim_b)->required();
  add_input_flags(sim_cmd, sim_in);

  // fold-chart
  InputFlags chart_in;
  std::string chart_file;
  auto* chart_cmd = app.add_subcommand("fold-chart", "Sum the events of a flame chart into one folded graph");
  chart_cmd->add_option("chart", chart_file, "Lines of timestamp<TAB>stack value")->required();
  add_input_flags(chart_cmd, chart_in);

  // regress
  InputFlags reg_in;
  std::string reg_base, reg_cand, reg_json, reg_scaling = "standard";
  double reg_p_star = 0.01;
  double reg_ridge = 1e-9;
  std::optional<std::size_t> reg_min_df;
  auto* reg_cmd = app.add_subcommand("regress", "Hotelling T^2 test between two directories of runs");
  reg_cmd->add_option("baseline_dir", reg_base)->required();
  reg_cmd->add_option("candidate_dir", reg_cand)->required();
  reg_cmd->add_option("--p-star", reg_p_star, "Critical p-value");
  reg_cmd->add_option("--scaling", reg_scaling, "G^2 form")
      ->check(CLI::IsMember({"standard", "example-compatible"}));
  reg_cmd->add_option("--min-df", reg_min_df, "Minimum number of runs a stack must appear in");
  reg_cmd->add_option("--ridge", reg_ridge, "Relative ridge used when the covariance is singular");
  reg_cmd->add_option("--json-out", reg_json, "Write the JSON report here ('-' for stdout)");
  add_input_flags(reg_cmd, reg_in);

  // simulate
  std::string simu_base, simu_treat, simu_spec_file, simu_unit;
  std::optional<std::uint64_t> simu_seed;
  std::optional<std::size_t> simu_runs;
  std::optional<double> simu_noise, simu_period;
  auto* simu_cmd = app.add_subcommand("simulate", "Generate synthetic baseline/treatment run directories");
  simu_cmd->add_option("baseline_dir", simu_base)->required();
  simu_cmd->add_option("treatment_dir", simu_treat)->required();
  simu_cmd->add_option("--spec", simu_spec_file, "JSON scenario (defaults to the sleep scenario)");
  simu_cmd->add_option("--seed", simu_seed, "RNG seed");
  simu_cmd->add_option("--runs", simu_runs, "Runs per side");
  simu_cmd->add_option("--noise", simu_noise, "Relative uniform jitter on dwell times");
  simu_cmd->add_option("--sample-period", simu_period, "Sampling period in ms");
  simu_cmd->add_option("--unit", simu_unit, "Output unit")->check(CLI::IsMember({"samples", "us", "ms", "unitless"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fgalgebra: " << e.what() << "\n" << app.help();
    return kUsageOrIo;
  }

  try {
    if (diff_cmd->parsed()) {
      ParseOptions o = diff_in.options();
      FlameGraph a = load_folded_file(diff_a, o);
      FlameGraph b = load_folded_file(diff_b, o);
      DeltaGraph d = diff(b, a);
      if (!diff_norm_by.empty()) d = normalize(d, norm(diff_norm_by == "first" ? a : b));
      out << emit_folded(d);
      return kOk;
    }
    if (dec_cmd->parsed()) {
      ParseOptions o = dec_in.options();
      FlameGraph a = load_folded_file(dec_a, o);
      FlameGraph b = load_folded_file(dec_b, o);
      DeltaDecomposition parts = decompose(b, a);
      if (!dec_norm_by.empty()) parts = normalize(parts, norm(dec_norm_by == "first" ? a : b));
      std::error_code ec;
      std::filesystem::create_directories(dec_out, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dec_out + "': " + ec.message());
      const std::filesystem::path dir(dec_out);
      write_text_file(dir / "appeared.folded", emit_folded(parts.appeared));
      write_text_file(dir / "grown.folded", emit_folded(parts.grown));
      write_text_file(dir / "disappeared.folded", emit_folded(parts.disappeared));
      write_text_file(dir / "shrunk.folded", emit_folded(parts.shrunk));
      out << "appeared " << format_value(norm(parts.appeared)) << "\n"
          << "grown " << format_value(norm(parts.grown)) << "\n"
          << "disappeared " << format_value(norm(parts.disappeared)) << "\n"
          << "shrunk " << format_value(norm(parts.shrunk)) << "\n";
      return kOk;
    }
    if (sim_cmd->parsed()) {
      ParseOptions o = sim_in.options();
      out << six_decimals(similarity(load_folded_file(sim_a, o), load_folded_file(sim_b, o))) << "\n";
      return kOk;
    }
    if (chart_cmd->parsed()) {
      ParseOptions o = chart_in.options();
      o.source_name = chart_file;
      out << emit_folded(fold_chart(parse_chart(read_text_file(chart_file), o)));
      return kOk;
    }
    if (reg_cmd->parsed()) {
      HotellingConfig cfg;
      cfg.p_star = reg_p_star;
      cfg.scaling = parse_scaling(reg_scaling).value_or(Scaling::standard);
      cfg.ridge = reg_ridge;
      cfg.min_df = reg_min_df;
      cfg.validate();
      ParseOptions o = reg_in.options();
      SampleSet baseline = load_sample_dir(reg_base, o);
      SampleSet candidate = load_sample_dir(reg_cand, o);
      RegressionReport report = run_regression(baseline, candidate, cfg);
      if (reg_json == "-") {
        out << report_to_json(report);
      } else {
        out << format_report_text(report, color);
        if (!reg_json.empty()) write_text_file(reg_json, report_to_json(report));
      }
      return report.significant.empty() ? kOk : kSignificant;
    }
    if (simu_cmd->parsed()) {
      SimSpec spec = simu_spec_file.empty() ? SimSpec::sleep_scenario() : sim_spec_from_json(read_text_file(simu_spec_file));
      if (simu_seed) spec.seed = *simu_seed;
      if (simu_runs) spec.runs_per_side = *simu_runs;
      if (simu_noise) spec.noise = *simu_noise;
      if (simu_period) spec.sample_period_ms = *simu_period;
      if (!simu_unit.empty()) spec.unit = parse_unit(simu_unit).value_or(spec.unit);
      write_simulation(spec, simu_base, simu_treat);
      out << "wrote " << spec.runs_per_side << " runs to " << simu_base << " and " << simu_treat << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << "fgalgebra: " << e.what() << "\n";
    if (code == kPrecondition) err << "hint: increase --min-df or collect more runs\n";
    return code;
  } catch (const std::exception& e) {
    err << "fgalgebra: " << e.what() << "\n";
    return kUsageOrIo;
  }
  return kUsageOrIo;
}

}  // namespace fga::cli
