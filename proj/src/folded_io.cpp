#include "fgalgebra/folded_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace fga {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

[[noreturn]] void malformed(std::size_t line_no, const ParseOptions& options, const std::string& detail) {
  throw ParseError(ErrorCode::MalformedLine, line_no, options.source_name, detail);
}

Stack build_stack(std::string_view text, std::size_t line_no, const ParseOptions& options) {
  if (text.empty()) malformed(line_no, options, "missing stack");
  std::string joined;
  joined.reserve(text.size());
  std::size_t depth = 0;
  while (true) {
    std::size_t end = text.find(kFrameSeparator);
    std::string label = options.normalizer.apply(trim(text.substr(0, end)));
    if (auto why = Frame::check(label)) malformed(line_no, options, *why);
    if (++depth > options.max_depth) {
      malformed(line_no, options, "stack deeper than " + std::to_string(options.max_depth) + " frames");
    }
    if (!joined.empty()) joined += kFrameSeparator;
    joined += label;
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
  return Stack::parse(joined, options.max_depth);
}

// nullopt for blank lines.
std::optional<FoldedLine> parse_line(std::string_view raw, std::size_t line_no, const ParseOptions& options) {
  std::string_view line = trim(raw);
  if (line.empty()) return std::nullopt;
  auto split = line.find_last_of(" \t\r\v\f");
  if (split == std::string_view::npos) malformed(line_no, options, "missing value");
  std::string_view token = line.substr(split + 1);
  double value = 0.0;
  if (!parse_number(token, value)) malformed(line_no, options, "unparsable value '" + std::string(token) + "'");
  return FoldedLine{build_stack(trim(line.substr(0, split)), line_no, options), value};
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    fn(text.substr(0, nl), line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

template <Sign S>
BasicGraph<S> parse_graph(std::string_view text, const ParseOptions& options) {
  std::vector<std::pair<Stack, double>> entries;
  for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    auto line = parse_line(raw, line_no, options);
    if (!line) return;
    if constexpr (S == Sign::positive) {
      if (line->value < 0.0) {
        throw ParseError(ErrorCode::NegativeValue, line_no, options.source_name,
                         "negative value for '" + line->stack.str() + "'");
      }
    }
    if (line->value != 0.0) entries.emplace_back(std::move(line->stack), line->value);
  });
  try {
    return BasicGraph<S>::from_entries(std::move(entries), options.unit);
  } catch (const Error& e) {
    // Only reachable when duplicate lines overflow to infinity.
    throw ParseError(ErrorCode::MalformedLine, 0, options.source_name, e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FrameNormalizer

FrameNormalizer FrameNormalizer::strip_trailing_location() {
  FrameNormalizer n;
  n.rule_ = Rule::strip_trailing_location;
  return n;
}

FrameNormalizer FrameNormalizer::regex_replace(std::string pattern, std::string replacement) {
  FrameNormalizer n;
  n.rule_ = Rule::regex_replace;
  try {
    n.regex_ = std::make_shared<const std::regex>(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::InvalidConfig, "bad normalizer pattern '" + pattern + "': " + e.what());
  }
  n.replacement_ = std::move(replacement);
  return n;
}

std::string FrameNormalizer::apply(std::string_view label) const {
  switch (rule_) {
    case Rule::identity:
      return std::string(label);
    case Rule::strip_trailing_location: {
      std::string_view s = label;
      while (true) {
        std::size_t colon = s.find_last_of(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size()) break;
        std::string_view tail = s.substr(colon + 1);
        if (!std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; })) break;
        s = s.substr(0, colon);
      }
      return std::string(s);
    }
    case Rule::regex_replace: {
      constexpr int kMaxPasses = 16;
      std::string current(label);
      for (int pass = 0; pass < kMaxPasses; ++pass) {
        std::string next = std::regex_replace(current, *regex_, replacement_);
        if (next == current) return current;
        current = std::move(next);
      }
      throw Error(ErrorCode::InvalidConfig,
                  "normalizer does not reach a fixed point on '" + std::string(label) + "'");
    }
  }
  return std::string(label);
}

// ---------------------------------------------------------------------------
// Parsing and emission

FoldedDocument read_folded_document(std::string_view text, const ParseOptions& options) {
  FoldedDocument doc;
  doc.source_name = options.source_name;
  for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    if (auto line = parse_line(raw, line_no, options)) doc.lines.push_back(std::move(*line));
  });
  return doc;
}

FlameGraph parse_folded(std::string_view text, const ParseOptions& options) {
  return parse_graph<Sign::positive>(text, options);
}

DeltaGraph parse_folded_signed(std::string_view text, const ParseOptions& options) {
  return parse_graph<Sign::any>(text, options);
}

std::string format_value(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

template <Sign S>
std::string emit_folded(const BasicGraph<S>& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out += g.stacks()[i].str();
    out += ' ';
    out += format_value(g.values()[i]);
    out += '\n';
  }
  return out;
}

template std::string emit_folded(const FlameGraph&);
template std::string emit_folded(const DeltaGraph&);

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) throw Error(ErrorCode::IoError, "'" + path.string() + "' is a directory");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
}

FlameGraph load_folded_file(const std::filesystem::path& path, const ParseOptions& options) {
  ParseOptions local = options;
  local.source_name = path.string();
  return parse_folded(read_text_file(path), local);
}

SampleSet load_sample_dir(const std::filesystem::path& dir, const ParseOptions& options) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::IoError, "'" + dir.string() + "' is not a readable directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    std::string name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::IoError, "cannot list '" + dir.string() + "': " + ec.message());
  if (files.empty()) throw Error(ErrorCode::EmptySample, "no runs in '" + dir.string() + "'");

  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  std::vector<FlameGraph> runs;
  std::vector<std::string> names;
  runs.reserve(files.size());
  for (const auto& f : files) {
    runs.push_back(load_folded_file(f, options));
    names.push_back(f.filename().string());
  }
  return SampleSet(std::move(runs), options.unit, std::move(names));
}

FlameChart parse_chart(std::string_view text, const ParseOptions& options) {
  std::vector<ChartEvent> events;
  for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    if (trim(raw).empty()) return;
    std::size_t tab = raw.find('\t');
    if (tab == std::string_view::npos) malformed(line_no, options, "missing TAB after timestamp");
    double t = 0.0;
    std::string_view stamp = trim(raw.substr(0, tab));
    if (!parse_number(stamp, t)) malformed(line_no, options, "unparsable timestamp '" + std::string(stamp) + "'");
    if (!events.empty() && t < events.back().timestamp) {
      throw ParseError(ErrorCode::OutOfOrderTimestamp, line_no, options.source_name,
                       "timestamp decreases from " + format_value(events.back().timestamp) + " to " +
                           format_value(t));
    }
    auto line = parse_line(raw.substr(tab + 1), line_no, options);
    if (!line) malformed(line_no, options, "missing stack");
    if (line->value < 0.0) {
      throw ParseError(ErrorCode::NegativeValue, line_no, options.source_name,
                       "negative value for '" + line->stack.str() + "'");
    }
    std::vector<FlameGraph::Entry> entry;
    if (line->value != 0.0) entry.emplace_back(std::move(line->stack), line->value);
    events.push_back({t, FlameGraph::from_entries(std::move(entry), options.unit)});
  });
  return FlameChart(std::move(events));
}

}  // namespace fga
