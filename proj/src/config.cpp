#include "rwl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace rwl {
namespace {

using std::numbers::pi;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_real(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  // from_chars rejects a leading '+'.
  if (s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(out);
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_reals(std::string_view s, std::vector<double>& out) {
  out.clear();
  s = trim(s);
  if (s.empty()) return true;
  while (true) {
    const auto comma = s.find(',');
    double v;
    if (!parse_real(s.substr(0, comma), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) return true;
    s.remove_prefix(comma + 1);
  }
}

bool parse_bool(std::string_view s, bool& out) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "1" || s == "on") return out = true, true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return out = false, true;
  return false;
}

enum class Kind { Real, Int, Seed, Reals, Bool, Text };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Real: return "a real number";
    case Kind::Int: return "an integer";
    case Kind::Seed: return "a non-negative 64-bit integer";
    case Kind::Reals: return "a comma-separated list of reals";
    case Kind::Bool: return "true or false";
    case Kind::Text: return "text";
  }
  return "";
}

struct Binding {
  Kind kind;
  void* target;
};

class Parser {
 public:
  Parser(ExperimentConfig& cfg, std::vector<std::string>& errors) : cfg_(cfg), errors_(errors) {
    auto& g = cfg.grid;
    auto& p = cfg.physics;
    auto& d = cfg.data;
    auto& r = cfg.run;
    auto& y = cfg.decay;
    keys_ = {
        {"grid.L", {Kind::Real, &g.L}},
        {"grid.nx", {Kind::Int, &g.nx}},
        {"grid.ny", {Kind::Int, &g.ny}},
        {"grid.nz", {Kind::Int, &g.nz}},
        {"physics.gamma", {Kind::Real, &p.gamma}},
        {"physics.eps", {Kind::Reals, &p.eps}},
        {"physics.mu0", {Kind::Real, &p.mu0}},
        {"physics.alpha", {Kind::Real, &p.alpha}},
        {"physics.forcing", {Kind::Text, &p.forcing}},
        {"physics.forcing_amplitude", {Kind::Real, &p.forcing_amplitude}},
        {"physics.forcing_width", {Kind::Real, &p.forcing_width}},
        {"data.preset", {Kind::Text, &d.preset}},
        {"data.amplitude", {Kind::Real, &d.amplitude}},
        {"data.width", {Kind::Real, &d.width}},
        {"data.separation", {Kind::Real, &d.separation}},
        {"data.seed", {Kind::Seed, &d.seed}},
        {"data.delta", {Kind::Reals, &d.delta}},
        {"data.kmin", {Kind::Real, &d.kmin}},
        {"data.kmax", {Kind::Real, &d.kmax}},
        {"data.band_lo", {Kind::Real, &d.band_lo}},
        {"data.band_hi", {Kind::Real, &d.band_hi}},
        {"data.vertical_mode", {Kind::Int, &d.vertical_mode}},
        {"data.branch", {Kind::Text, &d.branch}},
        {"data.wave_amplitude", {Kind::Real, &d.wave_amplitude}},
        {"data.input", {Kind::Text, &d.input}},
        {"run.study", {Kind::Text, &study_text_}},
        {"run.T", {Kind::Real, &r.T}},
        {"run.dt", {Kind::Real, &r.dt}},
        {"run.snapshot_stride", {Kind::Int, &r.snapshot_stride}},
        {"run.output", {Kind::Text, &r.output}},
        {"run.threads", {Kind::Int, &r.threads}},
        {"run.cfl", {Kind::Real, &r.cfl}},
        {"run.symmetry_every", {Kind::Int, &r.symmetry_every}},
        {"run.window", {Kind::Real, &r.window}},
        {"run.ess_a", {Kind::Real, &r.ess_a}},
        {"run.qg_filter", {Kind::Bool, &r.qg_filter}},
        {"run.conservation_tol", {Kind::Real, &r.conservation_tol}},
        {"run.energy_tol", {Kind::Real, &r.energy_tol}},
        {"run.bound_factor", {Kind::Real, &r.bound_factor}},
        {"run.error_ratio", {Kind::Real, &r.error_ratio}},
        {"run.min_residual_exponent", {Kind::Real, &r.min_residual_exponent}},
        {"decay.times", {Kind::Reals, &y.times}},
        {"decay.t_min", {Kind::Real, &y.t_min}},
        {"decay.t_max", {Kind::Real, &y.t_max}},
        {"decay.samples", {Kind::Int, &y.samples}},
        {"decay.window_lo", {Kind::Real, &y.window_lo}},
        {"decay.window_hi", {Kind::Real, &y.window_hi}},
        {"decay.sobolev_m", {Kind::Int, &y.sobolev_m}},
        {"decay.slope_min", {Kind::Real, &y.slope_min}},
        {"decay.slope_max", {Kind::Real, &y.slope_max}},
        {"decay.l2_tol", {Kind::Real, &y.l2_tol}},
    };
  }

  void parse(std::string_view text) {
    std::string section;
    int lineno = 0;
    while (!text.empty()) {
      ++lineno;
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      const auto hash = line.find_first_of("#;");
      line = trim(line.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          error(lineno, "malformed section header '" + std::string(line) + "'");
          continue;
        }
        section = std::string(trim(line.substr(1, line.size() - 2)));
        static const char* known[] = {"grid", "physics", "data", "run", "decay"};
        bool ok = false;
        for (const char* k : known) ok = ok || section == k;
        if (!ok) error(lineno, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        error(lineno, "expected 'key = value', got '" + std::string(line) + "'");
        continue;
      }
      const std::string key(trim(line.substr(0, eq)));
      const std::string_view value = trim(line.substr(eq + 1));
      if (section.empty()) {
        error(lineno, "key '" + key + "' appears before any section");
        continue;
      }
      const std::string full = section + "." + key;
      const auto it = keys_.find(full);
      if (it == keys_.end()) {
        error(lineno, "unknown key '" + key + "' in [" + section + "]");
        continue;
      }
      if (lines_.contains(full)) {
        error(lineno, "duplicate key '" + key + "' in [" + section + "] (first on line " +
                          std::to_string(lines_[full]) + ")");
        continue;
      }
      lines_[full] = lineno;
      if (!assign(it->second, value))
        error(lineno, "[" + section + "] " + key + ": expected " + kind_name(it->second.kind) +
                          ", got '" + std::string(value) + "'");
    }
  }

  bool set(const std::string& key) const { return lines_.contains(key); }

  /// Reports a range violation, attributed to the key's line when it was set.
  void range(const std::string& key, bool ok, const std::string& msg) {
    if (ok) return;
    const auto it = lines_.find(key);
    if (it != lines_.end())
      error(it->second, msg);
    else
      errors_.push_back(msg + " (default for this study)");
  }

  void error(int line, const std::string& msg) {
    errors_.push_back("line " + std::to_string(line) + ": " + msg);
  }

  const std::string& study_text() const { return study_text_; }

 private:
  static bool assign(const Binding& b, std::string_view v) {
    switch (b.kind) {
      case Kind::Real: return parse_real(v, *static_cast<double*>(b.target));
      case Kind::Int: return parse_int(v, *static_cast<int*>(b.target));
      case Kind::Seed: return parse_int(v, *static_cast<std::uint64_t*>(b.target));
      case Kind::Reals: return parse_reals(v, *static_cast<std::vector<double>*>(b.target));
      case Kind::Bool: return parse_bool(v, *static_cast<bool*>(b.target));
      case Kind::Text:
        *static_cast<std::string*>(b.target) = std::string(v);
        return !v.empty();
    }
    return false;
  }

  ExperimentConfig& cfg_;
  std::vector<std::string>& errors_;
  std::map<std::string, Binding> keys_;
  std::map<std::string, int> lines_;
  std::string study_text_;
};

void apply_defaults(ExperimentConfig& c, const Parser& p) {
  const Study s = c.study;
  auto def = [&](const char* key, auto& field, auto value) {
    if (!p.set(key)) field = value;
  };
  const bool decay = s == Study::Decay;
  const bool qg = s == Study::QGRun;
  def("grid.L", c.grid.L, decay ? 200.0 * pi : 2.0 * pi);
  def("grid.nx", c.grid.nx, decay ? 1024 : qg ? 256 : 64);
  def("grid.ny", c.grid.ny, decay ? 1024 : qg ? 256 : 64);
  def("grid.nz", c.grid.nz, decay ? 4 : 8);
  const bool wave = decay || s == Study::Propagate;
  def("data.preset", c.data.preset, std::string(wave ? "acoustic-pulse" : "pair"));
  def("data.amplitude", c.data.amplitude, wave ? 1.0 : qg ? 0.5 : 1.5);
  if (s == Study::LimitStudy) def("physics.eps", c.physics.eps, std::vector<double>{0.4, 0.2, 0.1, 0.05});
  if (wave) def("physics.eps", c.physics.eps, std::vector<double>{1.0});
  def("run.T", c.run.T, qg ? 10.0 : 1.0);
  // A QG step of 0 means "derive from the CFL limit of the initial state".
  if (qg) def("run.dt", c.run.dt, 0.0);
}

bool is_one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return true;
  return false;
}

void validate(const ExperimentConfig& c, Parser& p) {
  const auto& g = c.grid;
  p.range("grid.L", g.L > 0.0, "L must be positive");
  auto size_ok = [&](const char* key, int n, int max) {
    p.range(key, n % 2 == 0, std::string(key + 5) + " must be even, got " + std::to_string(n));
    p.range(key, n >= 4 && n <= max,
            std::string(key + 5) + " must lie in [4, " + std::to_string(max) + "]");
  };
  size_ok("grid.nx", g.nx, 8192);
  size_ok("grid.ny", g.ny, 8192);
  size_ok("grid.nz", g.nz, 1024);

  const auto& ph = c.physics;
  p.range("physics.gamma", ph.gamma > 1.5, "gamma must exceed 3/2");
  p.range("physics.eps", !ph.eps.empty(), "eps list must not be empty");
  for (double e : ph.eps) p.range("physics.eps", e > 0.0 && e <= 1.0, "eps values must lie in (0, 1]");
  if (c.study == Study::LimitStudy) {
    p.range("physics.eps", ph.eps.size() >= 2, "a limit study needs at least two eps values");
    bool dec = true;
    for (std::size_t k = 1; k < ph.eps.size(); ++k) dec = dec && ph.eps[k] < ph.eps[k - 1];
    p.range("physics.eps", dec, "eps list must be strictly decreasing");
  }
  p.range("physics.mu0", ph.mu0 >= 0.0, "mu0 must be non-negative");
  p.range("physics.alpha", ph.alpha >= 0.0, "alpha must be non-negative");
  p.range("physics.forcing", is_one_of(ph.forcing, {"none", "gaussian-hill"}),
          "forcing must be none or gaussian-hill");
  p.range("physics.forcing_width", ph.forcing_width > 0.0, "forcing_width must be positive");

  const auto& d = c.data;
  const bool wave = c.study == Study::Decay || c.study == Study::Propagate;
  if (wave)
    p.range("data.preset", is_one_of(d.preset, {"acoustic-pulse", "random-wave"}),
            "preset for wave studies must be acoustic-pulse or random-wave");
  else
    p.range("data.preset", is_one_of(d.preset, {"monopole", "dipole", "pair", "random"}),
            "preset must be monopole, dipole, pair or random");
  p.range("data.amplitude", d.amplitude >= 0.0, "amplitude must be non-negative");
  p.range("data.width", d.width > 0.0, "width must be positive");
  p.range("data.separation", d.separation >= 0.0, "separation must be non-negative");
  for (double x : d.delta) p.range("data.delta", x > 0.0, "delta values must be positive");
  p.range("data.kmin", d.kmin >= 0.0, "kmin must be non-negative");
  p.range("data.kmax", d.kmax > d.kmin, "kmax must exceed kmin");
  p.range("data.band_lo", d.band_lo > 0.0, "band_lo must be positive");
  p.range("data.band_hi", d.band_hi > d.band_lo, "band_hi must exceed band_lo");
  p.range("data.vertical_mode", d.vertical_mode >= 0 && d.vertical_mode < g.nz / 2,
          "vertical_mode must lie in [0, nz/2)");
  p.range("data.branch", is_one_of(d.branch, {"fast", "slow", "all"}),
          "branch must be fast, slow or all");
  p.range("data.wave_amplitude", d.wave_amplitude >= 0.0, "wave_amplitude must be non-negative");

  const auto& r = c.run;
  p.range("run.T", r.T > 0.0, "T must be positive");
  if (c.study == Study::QGRun)
    p.range("run.dt", r.dt >= 0.0, "dt must be non-negative (0 selects it from the CFL limit)");
  else
    p.range("run.dt", r.dt > 0.0, "dt must be positive");
  p.range("run.dt", r.dt <= r.T, "dt must not exceed T");
  p.range("run.snapshot_stride", r.snapshot_stride >= 1, "snapshot_stride must be at least 1");
  p.range("run.threads", r.threads >= 1 && r.threads <= 256, "threads must lie in [1, 256]");
  p.range("run.cfl", r.cfl > 0.0 && r.cfl <= 1.0, "cfl must lie in (0, 1]");
  p.range("run.symmetry_every", r.symmetry_every >= 1, "symmetry_every must be at least 1");
  p.range("run.window", r.window > 0.0, "window must be positive");
  p.range("run.ess_a", r.ess_a > 0.0 && r.ess_a < 0.5, "ess_a must lie in (0, 1/2)");
  p.range("run.conservation_tol", r.conservation_tol > 0.0, "conservation_tol must be positive");
  p.range("run.energy_tol", r.energy_tol > 0.0, "energy_tol must be positive");
  p.range("run.bound_factor", r.bound_factor >= 1.0, "bound_factor must be at least 1");
  p.range("run.error_ratio", r.error_ratio > 0.0 && r.error_ratio <= 1.0,
          "error_ratio must lie in (0, 1]");

  const auto& y = c.decay;
  bool inc = true;
  for (std::size_t k = 0; k < y.times.size(); ++k)
    inc = inc && y.times[k] > 0.0 && (k == 0 || y.times[k] > y.times[k - 1]);
  p.range("decay.times", inc, "decay times must be positive and increasing");
  p.range("decay.t_min", y.t_min > 0.0, "t_min must be positive");
  p.range("decay.t_max", y.t_max > y.t_min, "t_max must exceed t_min");
  p.range("decay.samples", y.samples >= 2 && y.samples <= 10000, "samples must lie in [2, 10000]");
  p.range("decay.window_hi", y.window_hi > y.window_lo && y.window_lo > 0.0,
          "decay window must satisfy 0 < window_lo < window_hi");
  p.range("decay.sobolev_m", y.sobolev_m >= 0 && y.sobolev_m <= 8, "sobolev_m must lie in [0, 8]");
  p.range("decay.slope_max", y.slope_max > y.slope_min, "slope_max must exceed slope_min");
  p.range("decay.l2_tol", y.l2_tol > 0.0, "l2_tol must be positive");
}

}  // namespace

std::string_view study_name(Study s) {
  switch (s) {
    case Study::Propagate: return "propagate";
    case Study::Decay: return "decay-study";
    case Study::Project: return "project";
    case Study::QGRun: return "qg-run";
    case Study::NSRun: return "ns-run";
    case Study::LimitStudy: return "limit-study";
  }
  return "";
}

std::optional<Study> parse_study(std::string_view name) {
  for (Study s : {Study::Propagate, Study::Decay, Study::Project, Study::QGRun, Study::NSRun,
                  Study::LimitStudy})
    if (study_name(s) == name) return s;
  if (name == "decay") return Study::Decay;
  return std::nullopt;
}

double PhysicsConfig::mu(double e) const { return mu0 * std::pow(e, alpha); }

ConfigResult parse_config(std::string_view text, std::optional<Study> study) {
  ConfigResult out;
  ExperimentConfig cfg;
  cfg.source = std::string(text);
  Parser p(cfg, out.errors);
  p.parse(text);

  std::optional<Study> declared;
  if (!p.study_text().empty()) {
    declared = parse_study(p.study_text());
    if (!declared) p.range("run.study", false, "unknown study '" + p.study_text() + "'");
  }
  if (declared && study && *declared != *study)
    p.range("run.study", false,
            "config is for " + std::string(study_name(*declared)) + ", not " +
                std::string(study_name(*study)));
  if (!declared && !study && p.study_text().empty())
    out.errors.push_back("no study selected: set [run] study or use a subcommand");
  cfg.study = study ? *study : declared.value_or(Study::Decay);

  apply_defaults(cfg, p);
  validate(cfg, p);
  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

std::string describe(const ExperimentConfig& c) {
  std::ostringstream os;
  auto reals = [](const std::vector<double>& v) {
    std::string s;
    char buf[32];
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", v[k]);
      s += (k ? ", " : "") + std::string(buf);
    }
    return s;
  };
  os.precision(17);
  os << "[grid]\nL = " << c.grid.L << "\nnx = " << c.grid.nx << "\nny = " << c.grid.ny
     << "\nnz = " << c.grid.nz << "\n\n";
  os << "[physics]\ngamma = " << c.physics.gamma << "\neps = " << reals(c.physics.eps)
     << "\nmu0 = " << c.physics.mu0 << "\nalpha = " << c.physics.alpha
     << "\nforcing = " << c.physics.forcing << "\nforcing_amplitude = " << c.physics.forcing_amplitude
     << "\nforcing_width = " << c.physics.forcing_width << "\n\n";
  const auto& d = c.data;
  os << "[data]\npreset = " << d.preset << "\namplitude = " << d.amplitude << "\nwidth = " << d.width
     << "\nseparation = " << d.separation << "\nseed = " << d.seed << "\ndelta = " << reals(d.delta)
     << "\nkmin = " << d.kmin << "\nkmax = " << d.kmax << "\nband_lo = " << d.band_lo
     << "\nband_hi = " << d.band_hi << "\nvertical_mode = " << d.vertical_mode
     << "\nbranch = " << d.branch << "\nwave_amplitude = " << d.wave_amplitude << "\n";
  if (!d.input.empty()) os << "input = " << d.input << "\n";
  const auto& r = c.run;
  os << "\n[run]\nstudy = " << study_name(c.study) << "\nT = " << r.T << "\ndt = " << r.dt
     << "\nsnapshot_stride = " << r.snapshot_stride << "\noutput = " << r.output
     << "\nthreads = " << r.threads << "\ncfl = " << r.cfl << "\nsymmetry_every = " << r.symmetry_every
     << "\nwindow = " << r.window << "\ness_a = " << r.ess_a
     << "\nqg_filter = " << (r.qg_filter ? "true" : "false")
     << "\nconservation_tol = " << r.conservation_tol << "\nenergy_tol = " << r.energy_tol
     << "\nbound_factor = " << r.bound_factor << "\nerror_ratio = " << r.error_ratio
     << "\nmin_residual_exponent = " << r.min_residual_exponent << "\n\n";
  const auto& y = c.decay;
  os << "[decay]\ntimes = " << reals(y.times) << "\nt_min = " << y.t_min << "\nt_max = " << y.t_max
     << "\nsamples = " << y.samples << "\nwindow_lo = " << y.window_lo
     << "\nwindow_hi = " << y.window_hi << "\nsobolev_m = " << y.sobolev_m
     << "\nslope_min = " << y.slope_min << "\nslope_max = " << y.slope_max
     << "\nl2_tol = " << y.l2_tol << "\n";
  return os.str();
}

}  // namespace rwl
