#include "sketchbound/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace sketchbound {

namespace {

// Already carries a line number; not re-wrapped.
struct LineError : SketchError {
  using SketchError::SketchError;
};

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw LineError(ErrorKind::Parse, "config line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

double to_number(const std::string& text, std::size_t line, const std::string& key) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    parse_error(line, "'" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

std::int64_t to_integer(const std::string& text, std::size_t line, const std::string& key) {
  const double x = to_number(text, line, key);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) parse_error(line, "'" + key + "' expects an integer");
  return static_cast<std::int64_t>(x);
}

std::uint64_t to_seed(const std::string& text, std::size_t line) {
  const std::string v = trim(text);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) parse_error(line, "'seed' expects an unsigned integer");
  return out;
}

ExperimentKind parse_kind(const std::string& section, std::size_t line) {
  const std::string base = section.substr(0, section.find('.'));
  if (base == "fig1_fixed_ratio") return ExperimentKind::Fig1FixedRatio;
  if (base == "fig1_fixed_kp") return ExperimentKind::Fig1FixedKp;
  if (base == "fig2_variability") return ExperimentKind::Fig2Variability;
  if (base == "lemma_suite") return ExperimentKind::LemmaSuite;
  if (base == "bounds_table") return ExperimentKind::BoundsTable;
  parse_error(line, "unknown experiment '" + base + "'");
}

struct Entry {
  std::string value;
  std::size_t line;
};

using Section = std::map<std::string, Entry>;

ExperimentConfig build(const std::string& name, std::size_t header_line, const Section& defaults,
                       const Section& own, const std::filesystem::path& base_dir) {
  Section merged = defaults;
  for (const auto& [k, v] : own) merged[k] = v;

  ExperimentConfig cfg;
  cfg.name = name;
  cfg.kind = parse_kind(name, header_line);
  for (const auto& [key, entry] : merged) {
    const std::string& v = entry.value;
    const std::size_t line = entry.line;
    try {
      if (key == "n_grid") {
        if (v.size() < 2 || v.front() != '[' || v.back() != ']') parse_error(line, "n_grid expects [n1, n2, ...]");
        std::stringstream items(v.substr(1, v.size() - 2));
        std::string item;
        while (std::getline(items, item, ',')) {
          if (!trim(item).empty()) cfg.n_grid.push_back(to_integer(item, line, key));
        }
      } else if (key == "k_rule") {
        cfg.k_rule = SizeRule::parse(unquote(v));
      } else if (key == "p_rule") {
        cfg.p_rule = SizeRule::parse(unquote(v));
      } else if (key == "trials_per_point") {
        const auto x = to_integer(v, line, key);
        if (x < 1) parse_error(line, "trials_per_point must be >= 1");
        cfg.trials_per_point = static_cast<std::size_t>(x);
      } else if (key == "seed") {
        cfg.seed = to_seed(v, line);
      } else if (key == "t") {
        cfg.t = to_number(v, line, key);
      } else if (key == "output_dir") {
        const std::filesystem::path p = unquote(v);
        cfg.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      } else if (key == "bounds_trials") {
        const auto x = to_integer(v, line, key);
        if (x < 0) parse_error(line, "bounds_trials must be >= 0");
        cfg.bounds_trials = static_cast<std::size_t>(x);
      } else if (key == "source") {
        cfg.source = parse_sigma_inv_source(unquote(v));
      } else if (key == "sampler") {
        cfg.sampler = parse_w_sampler(unquote(v));
      } else {
        parse_error(line, "unknown key '" + key + "'");
      }
    } catch (const LineError&) {
      throw;
    } catch (const SketchError& e) {
      parse_error(line, e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const SketchError& e) {
    parse_error(header_line, "[" + name + "] " + e.what());
  }
  return cfg;
}

}  // namespace

Dim SizeRule::apply(Dim n) const {
  if (kind == Kind::Fixed) return static_cast<Dim>(value);
  return static_cast<Dim>(std::llround(value * static_cast<double>(n)));
}

std::string SizeRule::to_string() const {
  std::ostringstream out;
  out << (kind == Kind::Fixed ? "fixed:" : "ratio:") << value;
  return out.str();
}

SizeRule SizeRule::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw SketchError(ErrorKind::Parse, "rule '" + text + "' must be fixed:N or ratio:F");
  const std::string kind = trim(text.substr(0, colon));
  const std::string value = trim(text.substr(colon + 1));
  SizeRule r;
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(x) || x < 0) {
    throw SketchError(ErrorKind::Parse, "rule '" + text + "' has a bad value");
  }
  if (kind == "fixed") {
    if (x != std::floor(x)) throw SketchError(ErrorKind::Parse, "fixed rule needs an integer");
    r.kind = Kind::Fixed;
  } else if (kind == "ratio") {
    if (x > 1.0) throw SketchError(ErrorKind::Parse, "ratio rule needs a fraction in [0, 1]");
    r.kind = Kind::Ratio;
  } else {
    throw SketchError(ErrorKind::Parse, "rule kind must be fixed or ratio, got '" + kind + "'");
  }
  r.value = x;
  return r;
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Fig1FixedRatio: return "fig1_fixed_ratio";
    case ExperimentKind::Fig1FixedKp: return "fig1_fixed_kp";
    case ExperimentKind::Fig2Variability: return "fig2_variability";
    case ExperimentKind::LemmaSuite: return "lemma_suite";
    case ExperimentKind::BoundsTable: return "bounds_table";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (kind == ExperimentKind::LemmaSuite) return;
  if (n_grid.empty()) throw SketchError(ErrorKind::Parse, "n_grid must be non-empty");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw SketchError(ErrorKind::Parse, "n_grid must be strictly ascending");
  }
  if (kind == ExperimentKind::Fig2Variability && n_grid.size() != 1) {
    throw SketchError(ErrorKind::Parse, "fig2_variability takes a single n");
  }
  if (trials_per_point < 1) throw SketchError(ErrorKind::Parse, "trials_per_point must be >= 1");
  if (kind != ExperimentKind::BoundsTable && trials_per_point < 2) {
    throw SketchError(ErrorKind::Parse, "W sampling needs trials_per_point >= 2");
  }
  if (!(t >= 1.0) || t > 1e7) throw SketchError(ErrorKind::Parse, "t must lie in [1, 1e7]");
  for (Dim n : n_grid) {
    const Dim k = k_rule.apply(n), p = p_rule.apply(n);
    if (n < 2 || k < 1 || p < 0 || k + p > n) {
      throw SketchError(ErrorKind::Parse, "n=" + std::to_string(n) + " gives k=" + std::to_string(k) +
                                              ", p=" + std::to_string(p) + "; need k >= 1 and k+p <= n");
    }
    if (kind != ExperimentKind::BoundsTable && k >= n) {
      throw SketchError(ErrorKind::Parse, "W sampling needs k < n");
    }
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"name", name},
          {"kind", sketchbound::to_string(kind)},
          {"n_grid", n_grid},
          {"k_rule", k_rule.to_string()},
          {"p_rule", p_rule.to_string()},
          {"trials_per_point", trials_per_point},
          {"seed", seed},
          {"t", t},
          {"bounds_trials", bounds_trials},
          {"source", sketchbound::to_string(source)},
          {"sampler", sketchbound::to_string(sampler)}};
}

std::vector<ExperimentConfig> parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  Section defaults;
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::string, Section> sections;
  Section* current = &defaults;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_error(line_no, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) parse_error(line_no, "empty section name");
      if (sections.count(name)) parse_error(line_no, "duplicate section [" + name + "]");
      parse_kind(name, line_no);
      order.emplace_back(name, line_no);
      current = &sections[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_error(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) parse_error(line_no, "expected key = value");
    if (current->count(key)) parse_error(line_no, "duplicate key '" + key + "'");
    (*current)[key] = {value, line_no};
  }
  if (order.empty()) throw SketchError(ErrorKind::Parse, "config defines no experiment sections");

  std::vector<ExperimentConfig> out;
  for (const auto& [name, line] : order) out.push_back(build(name, line, defaults, sections[name], base_dir));
  return out;
}

std::vector<ExperimentConfig> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SketchError(ErrorKind::Io, "cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace sketchbound
