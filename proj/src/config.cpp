#include "memdecay/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "memdecay/bounds.hpp"
#include "memdecay/error.hpp"
#include "memdecay/numerics.hpp"

namespace memdecay {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::config, key + ": expected a number, got \"" + raw + "\"");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  if (trim(raw).empty()) return out;
  std::stringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& item : split_list(raw)) out.push_back(parse_number(key, item));
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::string join(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += values[i];
  }
  return out;
}

// Reads one section and rejects keys nobody asked for.
class SectionReader {
 public:
  SectionReader(const pt::ptree& root, const std::string& name) : name_(name) {
    if (const auto child = root.get_child_optional(name)) section_ = &*child;
  }
  ~SectionReader() noexcept(false) {
    if (!section_ || std::uncaught_exceptions() > 0) return;
    for (const auto& [key, node] : *section_) {
      if (!seen_.count(key)) throw Error(ErrorKind::config, "[" + name_ + "] unknown key " + key);
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return section_ && section_->find(key) != section_->not_found();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? trim(section_->get<std::string>(key)) : fallback;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? parse_number(qualified(key), section_->get<std::string>(key)) : fallback;
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const double v = number(key, 0.0);
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw Error(ErrorKind::config, qualified(key) + ": expected a positive integer");
    }
    return static_cast<std::size_t>(v);
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    return has(key) ? parse_numbers(qualified(key), section_->get<std::string>(key))
                    : std::move(fallback);
  }
  std::vector<std::string> words(const std::string& key, std::vector<std::string> fallback) {
    return has(key) ? split_list(section_->get<std::string>(key)) : std::move(fallback);
  }

 private:
  std::string qualified(const std::string& key) const { return "[" + name_ + "] " + key; }
  std::string name_;
  const pt::ptree* section_ = nullptr;
  std::set<std::string> seen_;
};

void require_one_of(const std::string& key, const std::string& value,
                    std::initializer_list<const char*> allowed) {
  for (const char* option : allowed) {
    if (value == option) return;
  }
  throw Error(ErrorKind::config, key + ": unsupported value \"" + value + "\"");
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty()) return path;
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base) / p).string();
}

// Serialization helper: "; comment" lines then "key = value".
class Writer {
 public:
  explicit Writer(bool annotate) : annotate_(annotate) {}
  void section(const std::string& name) {
    if (!out_.str().empty()) out_ << '\n';
    out_ << '[' << name << "]\n";
  }
  void entry(const std::string& key, const std::string& value, const char* doc) {
    if (annotate_) out_ << "; " << doc << '\n';
    out_ << key << " = " << value << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  bool annotate_;
  std::ostringstream out_;
};

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return name == other.name && kernel == other.kernel && xi == other.xi &&
         operators == other.operators && history == other.history &&
         simulation == other.simulation && bounds == other.bounds &&
         output_directory == other.output_directory;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_directory) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::config, std::string("config syntax: ") + e.message() + " (line " +
                                       std::to_string(e.line()) + ")");
  }
  static const std::set<std::string> sections = {"experiment", "kernel", "xi", "operators",
                                                 "history", "simulation", "bounds", "output"};
  for (const auto& [name, node] : root) {
    if (!sections.count(name) || !node.data().empty()) {
      throw Error(ErrorKind::config, "unknown section or top-level key \"" + name + "\"");
    }
  }

  ExperimentConfig c;
  c.base_directory = base_directory;
  {
    SectionReader r(root, "experiment");
    c.name = r.text("name", c.name);
  }
  {
    SectionReader r(root, "kernel");
    c.kernel.family = r.text("family", c.kernel.family);
    require_one_of("[kernel] family", c.kernel.family, {"polynomial", "exponential", "tabulated"});
    c.kernel.amplitude = r.number("amplitude", c.kernel.amplitude);
    c.kernel.exponent = r.number("exponent", c.kernel.exponent);
    c.kernel.rate = r.number("rate", c.kernel.rate);
    c.kernel.table = r.text("table", c.kernel.table);
  }
  {
    SectionReader r(root, "xi");
    c.xi.mode = r.text("mode", c.xi.mode);
    require_one_of("[xi] mode", c.xi.mode, {"auto", "constant", "tabulated"});
    c.xi.value = r.number("value", c.xi.value);
    c.xi.p = r.number("p", c.xi.p);
    c.xi.table = r.text("table", c.xi.table);
  }
  {
    SectionReader r(root, "operators");
    c.operators.generator = r.text("generator", c.operators.generator);
    require_one_of("[operators] generator", c.operators.generator, {"laplacian_1d", "explicit"});
    c.operators.modes = r.count("modes", c.operators.modes);
    c.operators.length = r.number("length", c.operators.length);
    c.operators.b = r.text("b", c.operators.b);
    require_one_of("[operators] b", c.operators.b, {"same", "identity"});
    c.operators.a_values = r.numbers("a_values", c.operators.a_values);
    c.operators.b_values = r.numbers("b_values", c.operators.b_values);
  }
  {
    SectionReader r(root, "history");
    c.history.family = r.text("family", c.history.family);
    require_one_of("[history] family", c.history.family, {"constant", "exponential", "bump"});
    c.history.coefficients = r.numbers("coefficients", c.history.coefficients);
    c.history.scale = r.number("scale", c.history.scale);
    c.history.power = r.number("power", c.history.power);
    c.history.velocities = r.numbers("velocities", c.history.velocities);
    c.history.decay = r.number("decay", c.history.decay);
  }
  {
    SectionReader r(root, "simulation");
    c.simulation.dt = r.number("dt", c.simulation.dt);
    c.simulation.horizon = r.number("horizon", c.simulation.horizon);
    c.simulation.tail_tolerance = r.number("tail_tolerance", c.simulation.tail_tolerance);
  }
  {
    SectionReader r(root, "bounds");
    c.bounds.families = r.words("families", c.bounds.families);
    c.bounds.fit_start = r.number("fit_start", c.bounds.fit_start);
    c.bounds.fit_end = r.number("fit_end", c.bounds.fit_end);
    c.bounds.slope_start = r.number("slope_start", c.bounds.slope_start);
    c.bounds.slope_end = r.number("slope_end", c.bounds.slope_end);
    c.bounds.t_min = r.number("t_min", c.bounds.t_min);
    c.bounds.alpha = r.number("alpha", c.bounds.alpha);
    c.bounds.big_m = r.number("M", c.bounds.big_m);
    c.bounds.alpha0 = r.number("alpha0", c.bounds.alpha0);
  }
  {
    SectionReader r(root, "output");
    c.output_directory = r.text("directory", c.output_directory);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config(text.str(), parent.empty() ? "." : parent.string());
}

std::string serialize_config(const ExperimentConfig& c, bool annotate) {
  Writer w(annotate);
  w.section("experiment");
  w.entry("name", c.name, "label copied into report.txt");

  w.section("kernel");
  w.entry("family", c.kernel.family, "polynomial | exponential | tabulated (default polynomial)");
  w.entry("amplitude", format_double(c.kernel.amplitude),
          "a in a(1+t)^-q or a e^{-rate t} (default 1)");
  w.entry("exponent", format_double(c.kernel.exponent), "polynomial q > 1 (default 3)");
  w.entry("rate", format_double(c.kernel.rate), "exponential decay rate (default 1)");
  w.entry("table", c.kernel.table, "tabulated kernel CSV with header s,g (default empty)");

  w.section("xi");
  w.entry("mode", c.xi.mode,
          "auto (closed form for polynomial kernels) | constant | tabulated (default auto)");
  w.entry("value", format_double(c.xi.value), "constant xi (default 1)");
  w.entry("p", format_double(c.xi.p), "exponent p in g' <= -xi g^p, ignored by auto (default 1)");
  w.entry("table", c.xi.table, "tabulated xi CSV with header t,xi (default empty)");

  w.section("operators");
  w.entry("generator", c.operators.generator, "laplacian_1d | explicit (default laplacian_1d)");
  w.entry("modes", std::to_string(c.operators.modes), "number of Laplacian modes (default 16)");
  w.entry("length", format_double(c.operators.length), "interval length L (default 1)");
  w.entry("b", c.operators.b, "same (B = A) | identity (default same)");
  w.entry("a_values", join(c.operators.a_values), "explicit eigenvalues of A, comma separated");
  w.entry("b_values", join(c.operators.b_values), "explicit eigenvalues of B, comma separated");

  w.section("history");
  w.entry("family", c.history.family, "constant | exponential | bump (default exponential)");
  w.entry("coefficients", join(c.history.coefficients),
          "per-mode sup of the past; empty means scale * k^power");
  w.entry("scale", format_double(c.history.scale), "coefficient scale (default 1)");
  w.entry("power", format_double(c.history.power), "coefficient power in k (default -3)");
  w.entry("velocities", join(c.history.velocities), "per-mode initial velocity; empty means 0");
  w.entry("decay", format_double(c.history.decay),
          "exponential rate or bump width of the past profile (default 1)");

  w.section("simulation");
  w.entry("dt", format_double(c.simulation.dt), "time step (default 0.01)");
  w.entry("horizon", format_double(c.simulation.horizon), "final time T (default 200)");
  w.entry("tail_tolerance", format_double(c.simulation.tail_tolerance),
          "past-integral tolerance, 0 means 1e-10 (1 + sup|u0|) (default 0)");

  w.section("bounds");
  w.entry("families", join(c.bounds.families),
          "any of lemma1, thm_case1_first, thm_case1_improved, thm_case2_first, "
          "thm_case2_improved, example_case1, example_case2, prior_case1, prior_case2");
  w.entry("fit_start", format_double(c.bounds.fit_start),
          "envelope window start, raised to t_min for case-2 bounds (default 0)");
  w.entry("fit_end", format_double(c.bounds.fit_end), "envelope window end, 0 means T (default 0)");
  w.entry("slope_start", format_double(c.bounds.slope_start), "slope window start (default 0)");
  w.entry("slope_end", format_double(c.bounds.slope_end),
          "slope window end, 0 selects the final 25% of log(1+t) (default 0)");
  w.entry("t_min", format_double(c.bounds.t_min), "start of the case-2 bounds (default 1)");
  w.entry("alpha", format_double(c.bounds.alpha), "exponent of the lemma1 family (default 1)");
  w.entry("M", format_double(c.bounds.big_m), "M in I3 = (M + alpha0) E + I1 + (g0/2) I2 (default 10)");
  w.entry("alpha0", format_double(c.bounds.alpha0), "alpha0 in I3 (default 1)");

  w.section("output");
  w.entry("directory", c.output_directory, "output directory, overridden by --out (default out)");
  return w.str();
}

std::vector<std::string> preset_names() {
  return {"paper-example-q3", "zero-history", "exponential-oracle"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "paper-example-q3" || name == "zero-history") {
    // a = 1, q = 3 gives g0 = 1/2 < 1/a0 = 1 for B = A.
    c.kernel = {"polynomial", 1.0, 3.0, 1.0, ""};
    c.xi.mode = "auto";
    c.operators = {"laplacian_1d", 16, 1.0, "same", {}, {}};
    c.history.family = "exponential";
    c.history.decay = 1.0;
    c.simulation = {0.01, 200.0, 0.0};
    c.bounds.families = {"thm_case1_first", "thm_case1_improved", "thm_case2_first",
                         "thm_case2_improved", "example_case1", "example_case2",
                         "prior_case1", "prior_case2"};
    c.bounds.slope_start = 50.0;
    c.bounds.slope_end = 200.0;
    if (name == "zero-history") c.history.scale = 0.0;
    c.output_directory = "out/" + name;
    return c;
  }
  if (name == "exponential-oracle") {
    c.kernel = {"exponential", 0.5, 3.0, 1.0, ""};
    c.xi = {"constant", 1.0, 1.0, ""};
    c.operators = {"explicit", 1, 1.0, "same", {4.0}, {1.0}};
    c.history.family = "exponential";
    c.history.coefficients = {1.0};
    c.history.velocities = {0.0};
    c.simulation = {4e-3, 40.0, 0.0};
    c.output_directory = "out/" + name;
    return c;
  }
  throw Error(ErrorKind::config, "unknown preset \"" + name + "\"");
}

Experiment build_experiment(const ExperimentConfig& c, unsigned workers) {
  Kernel kernel = make_exponential_kernel(0.0, 1.0);
  if (c.kernel.family == "polynomial") {
    kernel = make_polynomial_kernel(c.kernel.amplitude, c.kernel.exponent);
  } else if (c.kernel.family == "exponential") {
    kernel = make_exponential_kernel(c.kernel.amplitude, c.kernel.rate);
  } else {
    if (c.kernel.table.empty()) throw Error(ErrorKind::config, "[kernel] table is required");
    kernel = load_tabulated_kernel(resolve(c.base_directory, c.kernel.table));
  }

  XiCertificate certificate{XiWeight::constant(c.xi.value), c.xi.p};
  if (c.xi.mode == "auto") {
    certificate = admissible_xi_p(kernel);
  } else if (c.xi.mode == "tabulated") {
    if (c.xi.table.empty()) throw Error(ErrorKind::config, "[xi] table is required");
    certificate.xi = load_tabulated_xi(resolve(c.base_directory, c.xi.table));
  }

  const OperatorSection& op = c.operators;
  ModalOperatorPair pair = [&] {
    if (op.generator == "laplacian_1d") {
      return ModalOperatorPair::laplacian_1d(op.modes, op.length,
                                             op.b == "same"
                                                 ? ModalOperatorPair::BChoice::same_as_a
                                                 : ModalOperatorPair::BChoice::identity);
    }
    return ModalOperatorPair(op.a_values, op.b_values);
  }();

  const std::size_t k = pair.modes();
  std::vector<double> coefficients = c.history.coefficients;
  if (coefficients.empty()) {
    for (std::size_t i = 1; i <= k; ++i) {
      coefficients.push_back(c.history.scale * std::pow(static_cast<double>(i), c.history.power));
    }
  }
  std::vector<double> velocities = c.history.velocities;
  if (velocities.empty()) velocities.assign(k, 0.0);
  if (coefficients.size() != k || velocities.size() != k) {
    throw Error(ErrorKind::config, "[history] lists must have one entry per mode");
  }
  static const std::map<std::string, HistoryFamily> families = {
      {"constant", HistoryFamily::constant},
      {"exponential", HistoryFamily::exponential},
      {"bump", HistoryFamily::bump}};
  HistoryData history(families.at(c.history.family), std::move(coefficients),
                      std::move(velocities), c.history.decay);

  for (const auto& family : c.bounds.families) parse_bound_family(family);

  SimConfig sim{kernel, pair, history, c.simulation.dt, c.simulation.horizon,
                c.simulation.tail_tolerance, std::max(1u, workers)};
  return Experiment{c, kernel, certificate, pair, history, sim};
}

}  // namespace memdecay
