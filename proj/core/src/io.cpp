#include "ssalt/io.hpp"

#include "ssalt/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ssalt {

double arrhenius_stress(double T0, double T, double boltzmann) {
  if (!(T0 > 0.0) || !(T > 0.0)) throw DomainError("temperatures must be positive");
  if (!(boltzmann > 0.0)) throw DomainError("Boltzmann constant must be positive");
  return -(1.0 / boltzmann) * (1.0 / T0 - 1.0 / T);
}

std::vector<double> arrhenius_stress(const ArrheniusSpec& spec) {
  std::vector<double> out;
  out.reserve(spec.T_levels.size());
  for (double T : spec.T_levels) out.push_back(arrhenius_stress(spec.T0, T, spec.boltzmann));
  return out;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::replace(text.begin(), text.end(), ',', ' ');
    std::replace(text.begin(), text.end(), '\t', ' ');
    std::istringstream words(text);
    Line line{number, {}};
    for (std::string w; words >> w;) line.tokens.push_back(w);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

class LineParser {
 public:
  LineParser(const std::string& source, const Line& line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(source_, line_.number, message);
  }

  void expect_count(std::size_t n) const {
    if (line_.tokens.size() != n)
      fail("'" + line_.tokens[0] + "' expects " + std::to_string(n - 1) + " value(s)");
  }

  double number(std::size_t i) const {
    const std::string& t = line_.tokens.at(i);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
      fail("not a number: '" + t + "'");
    return v;
  }

  int integer(std::size_t i) const {
    const std::string& t = line_.tokens.at(i);
    long long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || v < 0 || v > 1'000'000'000)
      fail("not a nonnegative integer: '" + t + "'");
    return static_cast<int>(v);
  }

  std::uint64_t unsigned64(std::size_t i) const {
    const std::string& t = line_.tokens.at(i);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
      fail("not an unsigned integer: '" + t + "'");
    return v;
  }

  bool flag(std::size_t i) const {
    const std::string& t = line_.tokens.at(i);
    if (t == "yes" || t == "true" || t == "on" || t == "1") return true;
    if (t == "no" || t == "false" || t == "off" || t == "0") return false;
    fail("expected yes/no, got '" + t + "'");
  }

  /// Numeric value with an optional trailing K marking a temperature.
  std::pair<double, bool> stress(std::size_t i) const {
    std::string t = line_.tokens.at(i);
    bool kelvin = false;
    if (!t.empty() && (t.back() == 'K' || t.back() == 'k')) {
      kelvin = true;
      t.pop_back();
    }
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
      fail("not a stress level: '" + line_.tokens.at(i) + "'");
    return {v, kelvin};
  }

 private:
  const std::string& source_;
  const Line& line_;
};

bool is_numeric_start(const std::string& token) {
  const char c = token.front();
  return (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+';
}

}  // namespace

Dataset parse_dataset(std::istream& in, const std::string& source, const LoadOptions& options) {
  if (!(options.time_scale > 0.0) || !std::isfinite(options.time_scale))
    throw DomainError("time scale must be positive");

  const std::vector<Line> lines = tokenize(in);
  if (lines.empty()) throw ParseError(source, 0, "empty dataset");

  std::map<std::string, int> seen;
  std::optional<int> N, risks;
  std::optional<double> tau1, tau2, boltzmann;
  std::optional<std::pair<double, bool>> x0;
  std::vector<std::pair<double, bool>> stress;
  std::optional<bool> normalize;
  std::vector<double> times;
  std::vector<std::vector<int>> counts;
  int first_row_line = 0;

  for (const Line& line : lines) {
    const LineParser p(source, line);
    const std::string& key = line.tokens.front();
    if (is_numeric_start(key)) {
      if (!risks) p.fail("'risks' must precede the data rows");
      p.expect_count(static_cast<std::size_t>(*risks) + 1);
      if (first_row_line == 0) first_row_line = line.number;
      times.push_back(p.number(0) * options.time_scale);
      std::vector<int> row;
      for (int j = 0; j < *risks; ++j) row.push_back(p.integer(static_cast<std::size_t>(j) + 1));
      counts.push_back(std::move(row));
      continue;
    }
    if (seen[key]++ > 0) p.fail("duplicate key '" + key + "'");
    if (key == "N") {
      p.expect_count(2);
      N = p.integer(1);
    } else if (key == "risks") {
      p.expect_count(2);
      risks = p.integer(1);
      if (*risks < 1) p.fail("at least one risk is required");
    } else if (key == "tau1") {
      p.expect_count(2);
      tau1 = p.number(1) * options.time_scale;
    } else if (key == "tau2") {
      p.expect_count(2);
      tau2 = p.number(1) * options.time_scale;
    } else if (key == "stress") {
      p.expect_count(3);
      stress = {p.stress(1), p.stress(2)};
      if (stress[0].second != stress[1].second) p.fail("stress levels mix Kelvin and plain units");
    } else if (key == "x0") {
      p.expect_count(2);
      x0 = p.stress(1);
    } else if (key == "normalize") {
      p.expect_count(2);
      normalize = p.flag(1);
    } else if (key == "boltzmann") {
      p.expect_count(2);
      boltzmann = p.number(1);
      if (!(*boltzmann > 0.0)) p.fail("Boltzmann constant must be positive");
    } else {
      p.fail("unknown key '" + key + "'");
    }
  }

  const int last_line = lines.back().number;
  const auto missing = [&](const char* key) {
    throw ParseError(source, last_line, std::string("missing header key '") + key + "'");
  };
  if (!N) missing("N");
  if (!risks) missing("risks");
  if (!tau1) missing("tau1");
  if (!tau2) missing("tau2");
  if (stress.empty()) missing("stress");
  if (!x0) missing("x0");
  if (times.empty()) throw ParseError(source, last_line, "no data rows");
  if (x0->second != stress[0].second)
    throw ParseError(source, last_line, "x0 and stress levels must use the same units");

  Dataset out;
  out.time_scale = options.time_scale;
  StepStressDesign& d = out.design;
  d.tau1 = *tau1;
  d.tau2 = *tau2;
  d.num_risks = *risks;
  d.inspection_times = times;

  if (stress[0].second) {
    ArrheniusSpec spec;
    spec.T0 = x0->first;
    spec.T_levels = {stress[0].first, stress[1].first};
    if (boltzmann) spec.boltzmann = *boltzmann;
    std::vector<double> x;
    try {
      x = arrhenius_stress(spec);
    } catch (const DomainError& e) {
      throw ParseError(source, last_line, e.what());
    }
    out.normalized = options.normalize_stress.value_or(normalize.value_or(true));
    // Dividing by the signed level farthest from x0 maps that level to 1.
    out.stress_scale = 1.0;
    if (out.normalized) {
      out.stress_scale = std::abs(x[0]) >= std::abs(x[1]) ? x[0] : x[1];
      if (out.stress_scale == 0.0) throw ParseError(source, last_line, "stress levels coincide with x0");
    }
    d.x1 = x[0] / out.stress_scale + 0.0;
    d.x2 = x[1] / out.stress_scale + 0.0;
    d.x0 = 0.0;
    out.arrhenius = spec;
  } else {
    if (normalize && *normalize)
      throw ParseError(source, last_line, "'normalize' applies to Kelvin stresses only");
    d.x1 = stress[0].first;
    d.x2 = stress[1].first;
    d.x0 = x0->first;
  }

  try {
    d.validate();
  } catch (const DesignError& e) {
    throw ParseError(source, first_row_line, e.what());
  }

  out.data.n.resize(static_cast<Eigen::Index>(counts.size()), *risks);
  int failures = 0;
  for (std::size_t l = 0; l < counts.size(); ++l)
    for (int j = 0; j < *risks; ++j) {
      out.data.n(static_cast<Eigen::Index>(l), j) = counts[l][static_cast<std::size_t>(j)];
      failures += counts[l][static_cast<std::size_t>(j)];
    }
  if (failures > *N)
    throw ParseError(source, last_line, "more failures (" + std::to_string(failures) + ") than units");
  out.data.N = *N;
  out.data.n0 = *N - failures;
  return out;
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_dataset(in, path, options);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  const StepStressDesign& d = dataset.design;
  out << "N " << dataset.data.N << '\n';
  out << "tau1 " << format_double(d.tau1) << '\n';
  out << "tau2 " << format_double(d.tau2) << '\n';
  out << "risks " << d.num_risks << '\n';
  if (dataset.arrhenius) {
    const ArrheniusSpec& a = *dataset.arrhenius;
    out << "stress " << format_double(a.T_levels.at(0)) << "K " << format_double(a.T_levels.at(1))
        << "K\n";
    out << "x0 " << format_double(a.T0) << "K\n";
    out << "normalize " << (dataset.normalized ? "yes" : "no") << '\n';
    out << "boltzmann " << format_double(a.boltzmann) << '\n';
  } else {
    out << "stress " << format_double(d.x1) << ' ' << format_double(d.x2) << '\n';
    out << "x0 " << format_double(d.x0) << '\n';
  }
  out << "# IT";
  for (int j = 0; j < d.num_risks; ++j) out << ", n" << j + 1;
  out << '\n';
  for (int l = 0; l < d.num_intervals(); ++l) {
    out << format_double(d.inspection_times[static_cast<std::size_t>(l)]);
    for (int j = 0; j < d.num_risks; ++j) out << ", " << dataset.data.n(l, j);
    out << '\n';
  }
}

void save_dataset(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_dataset(out, dataset);
}

SimulationScenario parse_scenario(std::istream& in, const std::string& source) {
  const std::vector<Line> lines = tokenize(in);
  if (lines.empty()) throw ParseError(source, 0, "empty scenario");

  SimulationScenario s;
  std::map<std::string, int> seen;
  std::optional<std::vector<double>> params;
  std::optional<std::vector<CellTarget>> cells;
  std::optional<double> x1, x2, tau1, tau2;
  std::vector<double> times;

  const auto numbers = [](const LineParser& p, const Line& line) {
    std::vector<double> v;
    for (std::size_t i = 1; i < line.tokens.size(); ++i) v.push_back(p.number(i));
    if (v.empty()) p.fail("'" + line.tokens[0] + "' needs values");
    return v;
  };

  for (const Line& line : lines) {
    const LineParser p(source, line);
    const std::string& key = line.tokens.front();
    if (seen[key]++ > 0) p.fail("duplicate key '" + key + "'");
    if (key == "x1") { p.expect_count(2); x1 = p.number(1); }
    else if (key == "x2") { p.expect_count(2); x2 = p.number(1); }
    else if (key == "x0") { p.expect_count(2); s.design.x0 = p.number(1); }
    else if (key == "tau1") { p.expect_count(2); tau1 = p.number(1); }
    else if (key == "tau2") { p.expect_count(2); tau2 = p.number(1); }
    else if (key == "inspection_times") times = numbers(p, line);
    else if (key == "params") {
      params = numbers(p, line);
      if (params->size() % 2 != 0) p.fail("params needs two coefficients per risk");
    }
    else if (key == "N") { p.expect_count(2); s.N = p.integer(1); }
    else if (key == "replications") { p.expect_count(2); s.replications = p.integer(1); }
    else if (key == "seed") { p.expect_count(2); s.seed = p.unsigned64(1); }
    else if (key == "betas") s.betas = numbers(p, line);
    else if (key == "epsilon") { p.expect_count(2); s.contamination_fraction = p.number(1); }
    else if (key == "contamination") {
      cells.emplace();
      for (std::size_t i = 1; i < line.tokens.size(); ++i) {
        const std::string& t = line.tokens[i];
        const auto colon = t.find(':');
        int l = 0, j = 0;
        const bool ok =
            colon != std::string::npos &&
            std::from_chars(t.data(), t.data() + colon, l).ptr == t.data() + colon &&
            std::from_chars(t.data() + colon + 1, t.data() + t.size(), j).ptr == t.data() + t.size();
        if (!ok || l < 1 || j < 1) p.fail("contamination cells are written interval:risk, got '" + t + "'");
        cells->push_back({l - 1, j - 1});
      }
    }
    else if (key == "t0") { p.expect_count(2); s.t0 = p.number(1); }
    else if (key == "alpha0") { p.expect_count(2); s.alpha0 = p.number(1); }
    else if (key == "level") { p.expect_count(2); s.level = p.number(1); }
    else if (key == "B") { p.expect_count(2); s.bootstrap_B = p.integer(1); }
    else if (key == "max_regenerations") { p.expect_count(2); s.max_regenerations = p.integer(1); }
    else p.fail("unknown key '" + key + "'");
  }

  const int last_line = lines.back().number;
  const auto require = [&](bool present, const char* key) {
    if (!present) throw ParseError(source, last_line, std::string("missing key '") + key + "'");
  };
  require(x1.has_value(), "x1");
  require(x2.has_value(), "x2");
  require(tau1.has_value(), "tau1");
  require(tau2.has_value(), "tau2");
  require(!times.empty(), "inspection_times");
  require(params.has_value(), "params");

  s.design.x1 = *x1;
  s.design.x2 = *x2;
  s.design.tau1 = *tau1;
  s.design.tau2 = *tau2;
  s.design.inspection_times = times;
  s.design.num_risks = static_cast<int>(params->size() / 2);
  s.true_params = ModelParams(Eigen::Map<const Eigen::VectorXd>(
      params->data(), static_cast<Eigen::Index>(params->size())));
  s.contamination_cells = cells ? *cells : SimulationScenario::default_contamination_cells(s.design);
  try {
    s.validate();
  } catch (const Error& e) {
    throw ParseError(source, last_line, e.what());
  }
  return s;
}

SimulationScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_scenario(in, path);
}

void write_scenario(std::ostream& out, const SimulationScenario& s) {
  const auto list = [&](const char* key, const auto& values) {
    out << key;
    for (double v : values) out << ' ' << format_double(v);
    out << '\n';
  };
  out << "x1 " << format_double(s.design.x1) << '\n';
  out << "x2 " << format_double(s.design.x2) << '\n';
  out << "x0 " << format_double(s.design.x0) << '\n';
  out << "tau1 " << format_double(s.design.tau1) << '\n';
  out << "tau2 " << format_double(s.design.tau2) << '\n';
  list("inspection_times", s.design.inspection_times);
  const Eigen::VectorXd& a = s.true_params.vector();
  list("params", std::vector<double>(a.data(), a.data() + a.size()));
  out << "N " << s.N << '\n';
  out << "replications " << s.replications << '\n';
  out << "seed " << s.seed << '\n';
  list("betas", s.betas);
  out << "epsilon " << format_double(s.contamination_fraction) << '\n';
  out << "contamination";
  for (const auto& c : s.contamination_cells) out << ' ' << c.interval + 1 << ':' << c.risk + 1;
  out << '\n';
  out << "t0 " << format_double(s.t0) << '\n';
  out << "alpha0 " << format_double(s.alpha0) << '\n';
  out << "level " << format_double(s.level) << '\n';
  out << "B " << s.bootstrap_B << '\n';
  out << "max_regenerations " << s.max_regenerations << '\n';
}

}  // namespace ssalt
