#include "lluv/sweep_io.hpp"
#include "lluv/errors.hpp"
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

namespace lluv {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

LLConfig RunConfig::optimizer() const {
  LLConfig c;
  c.basis_size = basis_size;
  c.max_iterations = max_iterations;
  c.tolerance = tolerance;
  c.method = method == "simplex" ? LLMethod::simplex : LLMethod::gradient;
  c.reference_extent = reference_extent;
  return c;
}

FMinConfig RunConfig::f_config() const {
  FMinConfig c;
  c.grid_cells = f_grid_cells;
  c.max_iterations = f_max_iterations;
  c.tolerance = f_tolerance;
  return c;
}

ScheduleSide RunConfig::schedule_side() const {
  return side == "lower" ? ScheduleSide::lower : ScheduleSide::upper;
}

std::vector<std::pair<double, double>> RunConfig::grid() const {
  std::vector<std::pair<double, double>> g;
  for (double a : alphas)
    for (double l : lambdas)
      g.emplace_back(a, l);
  return g;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

struct Entry {
  std::string value;
  int line = 0;
};

struct Key {
  const char* section;
  std::function<void(RunConfig&, const std::string&, int)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void type_error(const std::string& key, const std::string& v, const char* want,
                             int line) {
  throw ConfigError("key '" + key + "': expected " + want + ", got '" + v + "'", line);
}

double to_double(const std::string& key, const std::string& v, int line) {
  double x;
  if (!parse_number(v, x) || !std::isfinite(x))
    type_error(key, v, "a number", line);
  return x;
}

int to_int(const std::string& key, const std::string& v, int line) {
  int x;
  if (!parse_number(v, x))
    type_error(key, v, "an integer", line);
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  if (trim(v).empty())
    return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(to_double(key, trim(item), line));
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

#define DOUBLE_KEY(sec, name)                                                              \
  {                                                                                        \
    #name, Key {                                                                           \
      sec, [](RunConfig& c, const std::string& v, int l) { c.name = to_double(#name, v, l); }, \
          [](const RunConfig& c) { return format_double(c.name); }                         \
    }                                                                                      \
  }
#define INT_KEY(sec, name)                                                              \
  {                                                                                     \
    #name, Key {                                                                        \
      sec, [](RunConfig& c, const std::string& v, int l) { c.name = to_int(#name, v, l); }, \
          [](const RunConfig& c) { return std::to_string(c.name); }                     \
    }                                                                                   \
  }
#define LIST_KEY(sec, name)                                                              \
  {                                                                                      \
    #name, Key {                                                                         \
      sec, [](RunConfig& c, const std::string& v, int l) { c.name = to_list(#name, v, l); }, \
          [](const RunConfig& c) { return list_str(c.name); }                            \
    }                                                                                    \
  }
#define WORD_KEY(sec, name)                                                      \
  {                                                                              \
    #name, Key {                                                                 \
      sec, [](RunConfig& c, const std::string& v, int) { c.name = v; },          \
          [](const RunConfig& c) { return c.name; }                              \
    }                                                                            \
  }

const std::vector<std::pair<std::string, Key>>& keys() {
  static const std::vector<std::pair<std::string, Key>> k = {
      DOUBLE_KEY("model", alpha),
      DOUBLE_KEY("model", lambda),
      DOUBLE_KEY("model", sigma),
      DOUBLE_KEY("model", beta),
      INT_KEY("shell", n_radial),
      INT_KEY("shell", n_angular),
      INT_KEY("optimizer", basis_size),
      INT_KEY("optimizer", max_iterations),
      DOUBLE_KEY("optimizer", tolerance),
      WORD_KEY("optimizer", method),
      DOUBLE_KEY("optimizer", reference_extent),
      INT_KEY("optimizer", f_grid_cells),
      INT_KEY("optimizer", f_max_iterations),
      DOUBLE_KEY("optimizer", f_tolerance),
      LIST_KEY("sweep", alphas),
      LIST_KEY("sweep", lambdas),
      WORD_KEY("sweep", side),
      LIST_KEY("sweep", ladder),
      {"record_runtime",
       Key{"sweep",
           [](RunConfig& c, const std::string& v, int l) {
             if (v != "true" && v != "false")
               type_error("record_runtime", v, "true or false", l);
             c.record_runtime = v == "true";
           },
           [](const RunConfig& c) { return std::string(c.record_runtime ? "true" : "false"); }}},
      {"seed", Key{"sweep",
                   [](RunConfig& c, const std::string& v, int l) {
                     if (!parse_number(v, c.seed))
                       type_error("seed", v, "an unsigned 64-bit integer", l);
                   },
                   [](const RunConfig& c) { return std::to_string(c.seed); }}},
  };
  return k;
}

#undef DOUBLE_KEY
#undef INT_KEY
#undef LIST_KEY
#undef WORD_KEY

const Key* find_key(const std::string& name) {
  for (const auto& [n, k] : keys())
    if (n == name)
      return &k;
  return nullptr;
}

void validate(const RunConfig& c, const std::map<std::string, Entry>& seen, int end_line) {
  auto line_of = [&](const char* k) {
    auto it = seen.find(k);
    return it == seen.end() ? 0 : it->second.line;
  };
  auto require = [&](bool ok, const char* k, const std::string& what) {
    if (!ok)
      throw ConfigError("key '" + std::string(k) + "': " + what, line_of(k));
  };
  for (const char* k : {"alpha", "lambda"})
    if (!seen.count(k))
      throw ConfigError("missing required key '" + std::string(k) + "'", end_line);
  require(c.alpha > 0.0, "alpha", "must be positive");
  require(c.lambda >= 1.0, "lambda", "must be at least 1");
  require(c.sigma >= 0.0 && c.sigma < c.lambda, "sigma", "must lie in [0, lambda)");
  require(c.beta > 0.0, "beta", "must be positive");
  require(c.n_radial >= 1, "n_radial", "must be at least 1");
  require(c.n_angular >= kMinAngularOrder && c.n_angular <= kMaxAngularOrder, "n_angular",
          "must lie in [" + std::to_string(kMinAngularOrder) + ", " +
              std::to_string(kMaxAngularOrder) + "]");
  require(c.basis_size >= 2, "basis_size", "must be at least 2");
  require(c.max_iterations >= 1, "max_iterations", "must be at least 1");
  require(c.tolerance > 0.0, "tolerance", "must be positive");
  require(c.method == "gradient" || c.method == "simplex", "method",
          "must be gradient or simplex");
  require(c.reference_extent > 0.0, "reference_extent", "must be positive");
  require(c.f_grid_cells >= 10, "f_grid_cells", "must be at least 10");
  require(c.f_max_iterations >= 1, "f_max_iterations", "must be at least 1");
  require(c.f_tolerance > 0.0, "f_tolerance", "must be positive");
  require(!c.alphas.empty(), "alphas", "grid must be nonempty");
  for (double a : c.alphas)
    require(a > 0.0, "alphas", "entries must be positive");
  require(!c.lambdas.empty(), "lambdas", "grid must be nonempty");
  for (double l : c.lambdas)
    require(l >= 1.0, "lambdas", "entries must be at least 1");
  require(c.side == "upper" || c.side == "lower", "side", "must be upper or lower");
  require(c.ladder.empty() || c.ladder.size() >= 3, "ladder", "needs at least three rungs");
  for (double L : c.ladder)
    require(L > 0.0, "ladder", "entries must be positive");
}

void add_entry(std::map<std::string, Entry>& seen, const std::string& section,
               const std::string& key, const std::string& value, int line) {
  const Key* k = find_key(key);
  if (!k)
    throw ConfigError("unknown key '" + key + "'", line);
  if (!section.empty() && section != k->section)
    throw ConfigError("key '" + key + "' belongs to section [" + k->section + "], not [" +
                          section + "]",
                      line);
  auto [it, fresh] = seen.emplace(key, Entry{value, line});
  if (!fresh)
    throw ConfigError("duplicate key '" + key + "' (first set on line " +
                          std::to_string(it->second.line) + ")",
                      line);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::map<std::string, Entry> seen;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty())
      continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("malformed section header '" + s + "'", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section != "model" && section != "shell" && section != "optimizer" &&
          section != "sweep")
        throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + s + "'", line);
    add_entry(seen, section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line);
  }
  const int end_line = line + 1;

  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + o + "': expected key=value");
    const std::string key = trim(o.substr(0, eq));
    if (!find_key(key))
      throw ConfigError("override: unknown key '" + key + "'");
    seen[key] = Entry{trim(o.substr(eq + 1)), 0};
  }

  RunConfig c;
  for (const auto& [key, e] : seen)
    find_key(key)->set(c, e.value, e.line);
  if (c.alphas.empty())
    c.alphas = {c.alpha};
  if (c.lambdas.empty())
    c.lambdas = {c.lambda};
  validate(c, seen, end_line);
  return c;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw InvalidInput("cannot write '" + path + "'");
  f << text;
  f.flush();
  if (!f)
    throw InvalidInput("write to '" + path + "' failed");
}

RunConfig read_config(const std::string& path, const std::vector<std::string>& overrides) {
  return parse_config(read_text(path), overrides);
}

std::string write_config(const RunConfig& cfg) {
  std::string out;
  for (const char* sec : {"model", "shell", "optimizer", "sweep"}) {
    out += std::string(out.empty() ? "" : "\n") + "[" + sec + "]\n";
    for (const auto& [name, k] : keys()) {
      if (std::string(k.section) != sec)
        continue;
      if (name == "ladder" && cfg.ladder.empty())
        continue;
      out += name + " = " + k.get(cfg) + "\n";
    }
  }
  return out;
}

namespace {

const char* kHeader =
    "alpha,lambda,sigma,L,eps,delta,n_radial,n_angular,e_ll,beta_emp,beta_paper,f_pred,"
    "ratio_emp,ratio_paper,runtime_s,seed";

}  // namespace

std::string records_to_string(const std::vector<SweepRecord>& records) {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : records) {
    const double d1[] = {r.alpha, r.lambda, r.sigma, r.L, r.eps, r.delta};
    const double d2[] = {r.e_ll,      r.beta_emp,    r.beta_paper, r.f_pred,
                         r.ratio_emp, r.ratio_paper, r.runtime_s};
    for (double x : d1)
      out += format_double(x) + ",";
    out += std::to_string(r.n_radial) + "," + std::to_string(r.n_angular) + ",";
    for (double x : d2)
      out += format_double(x) + ",";
    out += std::to_string(r.seed) + "\n";
  }
  return out;
}

std::vector<SweepRecord> records_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kHeader)
    throw InvalidInput("record table: unexpected header");
  std::vector<SweepRecord> out;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty())
      continue;
    std::vector<std::string> f;
    std::stringstream ss(trim(line));
    std::string item;
    while (std::getline(ss, item, ','))
      f.push_back(item);
    if (f.size() != 16)
      throw InvalidInput("record table line " + std::to_string(n) + ": expected 16 fields");
    auto num = [&](int i) {
      double x;
      if (!parse_number(f[i], x))
        throw InvalidInput("record table line " + std::to_string(n) + ": bad number '" + f[i] +
                           "'");
      return x;
    };
    auto integer = [&](int i, auto& x) {
      if (!parse_number(f[i], x))
        throw InvalidInput("record table line " + std::to_string(n) + ": bad integer '" +
                           f[i] + "'");
    };
    SweepRecord r;
    r.alpha = num(0);
    r.lambda = num(1);
    r.sigma = num(2);
    r.L = num(3);
    r.eps = num(4);
    r.delta = num(5);
    integer(6, r.n_radial);
    integer(7, r.n_angular);
    r.e_ll = num(8);
    r.beta_emp = num(9);
    r.beta_paper = num(10);
    r.f_pred = num(11);
    r.ratio_emp = num(12);
    r.ratio_paper = num(13);
    r.runtime_s = num(14);
    integer(15, r.seed);
    out.push_back(r);
  }
  return out;
}

void write_records(const std::vector<SweepRecord>& records, const std::string& path) {
  write_text(path, records_to_string(records));
}

std::vector<SweepRecord> read_records(const std::string& path) {
  return records_from_string(read_text(path));
}

std::string summary_json(const ExponentReport& rep, const RunConfig& cfg) {
  using json = nlohmann::ordered_json;
  auto fit = [](const std::optional<PowerFit>& f, double target) {
    if (!f)
      return json(nullptr);
    return json{{"slope", f->exponent},
                {"ci95", f->ci95},
                {"stderr", f->stderr_slope},
                {"prefactor", f->prefactor},
                {"points", f->points},
                {"target", target},
                {"deviation", f->exponent - target}};
  };
  json j;
  j["tool_version"] = kToolVersion;
  j["seed"] = cfg.seed;
  j["schedule_side"] = cfg.side;
  j["lambda_fit"] = fit(rep.lambda_fit, 12.0 / 7.0);
  j["lambda_fit"]["at_alpha"] = rep.lambda_fit_alpha;
  j["alpha_fit"] = fit(rep.alpha_fit, 2.0 / 7.0);
  j["alpha_fit"]["at_lambda"] = rep.alpha_fit_lambda;
  const auto& c = rep.convention;
  j["convention"] = {{"c_conv_main", c.c_conv_main},
                     {"main_verdict", c.main_verdict},
                     {"c_conv_beta_mean", c.c_conv_beta_mean},
                     {"c_conv_beta_spread", c.c_conv_beta_spread},
                     {"mean_abs_dev_ratio_emp", c.mean_abs_dev_emp},
                     {"mean_abs_dev_ratio_paper", c.mean_abs_dev_paper},
                     {"closer_to_one", c.closer}};
  j["bounds"] =
      "energies are variational upper bounds; lower-bound behaviour is probed by gap-term "
      "trend tests only";
  return j.dump(2) + "\n";
}

bool FockFixture::operator==(const FockFixture& o) const {
  return name == o.name && blocks.a == o.blocks.a && blocks.b == o.blocks.b &&
         blocks.d == o.blocks.d && blocks.y == o.blocks.y && truncation == o.truncation &&
         expected == o.expected && tolerance == o.tolerance;
}

// instance NAME / n N / a .. / b .. / d .. / y .. / truncation N /
// expected E / tolerance T / end ; matrices row-major on one line
std::vector<FockFixture> fixtures_from_string(const std::string& text) {
  std::vector<FockFixture> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  FockFixture cur;
  bool open = false;
  int n = 0;
  auto numbers = [&](std::istringstream& ss, std::size_t count) {
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
      double x;
      if (!parse_number(tok, x))
        throw ConfigError("fixture: bad number '" + tok + "'", line);
      v.push_back(x);
    }
    if (v.size() != count)
      throw ConfigError("fixture: expected " + std::to_string(count) + " numbers", line);
    return v;
  };
  auto matrix = [&](std::istringstream& ss) {
    const auto v = numbers(ss, static_cast<std::size_t>(n) * n);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = v[i * n + j];
    return m;
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty())
      continue;
    std::istringstream ss(s);
    std::string tag;
    ss >> tag;
    if (tag == "instance") {
      if (open)
        throw ConfigError("fixture: missing 'end'", line);
      cur = FockFixture{};
      ss >> cur.name;
      open = true;
      n = 0;
      continue;
    }
    if (!open)
      throw ConfigError("fixture: '" + tag + "' outside an instance", line);
    if (tag == "n") {
      n = static_cast<int>(numbers(ss, 1)[0]);
      if (n < 1)
        throw ConfigError("fixture: n must be positive", line);
      cur.blocks.y = Eigen::VectorXd::Zero(n);
    } else if (tag == "a" || tag == "b" || tag == "d") {
      if (n < 1)
        throw ConfigError("fixture: 'n' must precede matrices", line);
      (tag == "a" ? cur.blocks.a : tag == "b" ? cur.blocks.b : cur.blocks.d) = matrix(ss);
    } else if (tag == "y") {
      const auto v = numbers(ss, n);
      cur.blocks.y = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    } else if (tag == "truncation") {
      cur.truncation = static_cast<int>(numbers(ss, 1)[0]);
    } else if (tag == "expected") {
      cur.expected = numbers(ss, 1)[0];
    } else if (tag == "tolerance") {
      cur.tolerance = numbers(ss, 1)[0];
    } else if (tag == "end") {
      if (cur.blocks.a.size() == 0 || cur.blocks.b.size() == 0 || cur.blocks.d.size() == 0)
        throw ConfigError("fixture '" + cur.name + "': a, b and d are required", line);
      out.push_back(cur);
      open = false;
    } else {
      throw ConfigError("fixture: unknown tag '" + tag + "'", line);
    }
  }
  if (open)
    throw ConfigError("fixture: missing 'end'", line + 1);
  return out;
}

std::string fixtures_to_string(const std::vector<FockFixture>& fixtures) {
  std::string out;
  for (const auto& f : fixtures) {
    const int n = f.blocks.n();
    out += "instance " + f.name + "\nn " + std::to_string(n) + "\n";
    auto mat = [&](const char* tag, const Eigen::MatrixXd& m) {
      out += tag;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out += " " + format_double(m(i, j));
      out += "\n";
    };
    mat("a", f.blocks.a);
    mat("b", f.blocks.b);
    mat("d", f.blocks.d);
    out += "y";
    for (int i = 0; i < n; ++i)
      out += " " + format_double(f.blocks.y.size() ? f.blocks.y(i) : 0.0);
    out += "\ntruncation " + std::to_string(f.truncation) + "\nexpected " +
           format_double(f.expected) + "\ntolerance " + format_double(f.tolerance) + "\nend\n";
  }
  return out;
}

std::vector<FockFixture> read_fixtures(const std::string& path) {
  return fixtures_from_string(read_text(path));
}

}  // namespace lluv
