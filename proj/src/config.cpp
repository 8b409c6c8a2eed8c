#include "gcurve/config.hpp"

#include <cstdint>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "gcurve/errors.hpp"
#include "gcurve/expr.hpp"

namespace gcurve {

using json = nlohmann::json;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Periodic: return "periodic";
    case Mode::Radial: return "radial";
    case Mode::Value: return "value";
    case Mode::Limit: return "limit";
    case Mode::Verify: return "verify";
    case Mode::Study: return "study";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::Periodic, Mode::Radial, Mode::Value, Mode::Limit, Mode::Verify,
                 Mode::Study}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorKind::ValidationError, "mode: unknown mode '" + std::string(name) + "'");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::ValidationError, field + ": " + why);
}

// A JSON object whose keys are checked against a whitelist up front.
class Obj {
 public:
  Obj(const json& j, std::string path, std::initializer_list<const char*> keys)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) invalid(path_.empty() ? "config" : path_, "expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!allowed.count(it.key())) invalid(field(it.key()), "unknown");
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* get(const char* key) const {
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::optional<double> number(const char* key) const {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) invalid(field(key), "expected a number");
    return v->get<double>();
  }

  std::optional<double> positive(const char* key) const {
    auto v = number(key);
    if (v && !(*v > 0.0)) invalid(field(key), "must be > 0");
    return v;
  }

  std::optional<int> integer(const char* key) const {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) invalid(field(key), "expected an integer");
    return v->get<int>();
  }

  std::optional<bool> boolean(const char* key) const {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) invalid(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::optional<std::string> string(const char* key) const {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) invalid(field(key), "expected a string");
    return v->get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
};

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array()) invalid(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) invalid(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ScalarSpec scalar(const json& j, const std::string& field, std::vector<std::string> vars,
                  bool allow_abscissae) {
  if (j.is_number()) return ScalarSpec::constant(j.get<double>());
  if (j.is_string()) {
    auto s = j.get<std::string>();
    try {
      (void)Expr::compile(s, std::move(vars));
    } catch (const Error& e) {
      invalid(field, e.what());
    }
    return ScalarSpec::expr(std::move(s));
  }
  if (j.is_array()) {
    ScalarSpec spec;
    spec.samples = number_array(j, field);
    return spec;
  }
  if (j.is_object() && allow_abscissae) {
    Obj o(j, field, {"samples", "r"});
    ScalarSpec spec;
    const json* s = o.get("samples");
    if (!s) invalid(o.field("samples"), "required");
    spec.samples = number_array(*s, o.field("samples"));
    if (const json* r = o.get("r")) {
      spec.sample_r = number_array(*r, o.field("r"));
      if (spec.sample_r.size() != spec.samples.size()) {
        invalid(o.field("r"), "must have as many entries as samples");
      }
    }
    return spec;
  }
  invalid(field, "expected an expression string, a number or samples");
}

const std::vector<std::string> kPeriodicVars{"x1", "x2", "x3", "x", "y", "z"};
const std::vector<std::string> kRadialVars{"r"};

void parse_periodic(const json& j, PeriodicConfig& c) {
  Obj o(j, "problem", {"kind", "dim", "N", "f", "g", "wind", "ergodic", "aubry_tol"});
  if (auto v = o.integer("dim")) {
    if (*v < 1 || *v > 3) invalid(o.field("dim"), "must be 1, 2 or 3");
    c.dim = *v;
  }
  if (auto v = o.integer("N")) {
    if (*v < 8) invalid(o.field("N"), "must be >= 8");
    c.N = *v;
  }
  std::size_t nodes = 1;
  for (int a = 0; a < c.dim; ++a) nodes *= static_cast<std::size_t>(c.N);
  auto field_spec = [&](const char* key) {
    const json* v = o.get(key);
    if (!v) invalid(o.field(key), "required");
    ScalarSpec s = scalar(*v, o.field(key), kPeriodicVars, false);
    if (!s.closed_form() && s.samples.size() != nodes) {
      invalid(o.field(key), "expected " + std::to_string(nodes) + " node samples");
    }
    return s;
  };
  c.f = field_spec("f");
  c.g = field_spec("g");
  c.wind.clear();
  if (const json* w = o.get("wind")) {
    if (!w->is_array() || w->size() != static_cast<std::size_t>(c.dim)) {
      invalid(o.field("wind"), "expected one component per axis");
    }
    for (std::size_t a = 0; a < w->size(); ++a) {
      const std::string f = o.field("wind") + "[" + std::to_string(a) + "]";
      ScalarSpec s = scalar((*w)[a], f, kPeriodicVars, false);
      if (!s.closed_form() && s.samples.size() != nodes) {
        invalid(f, "expected " + std::to_string(nodes) + " node samples");
      }
      c.wind.push_back(std::move(s));
    }
  }
  if (auto v = o.boolean("ergodic")) c.ergodic = *v;
  if (auto v = o.positive("aubry_tol")) c.aubry_tol = *v;
}

void parse_radial(const json& j, RadialConfig& c) {
  Obj o(j, "problem", {"kind", "n", "F", "G", "c_F", "r_min", "r_max", "grid_n", "ergodic",
                       "aubry_tol", "tail_tol", "outer"});
  if (auto v = o.integer("n")) {
    if (*v < 1) invalid(o.field("n"), "must be >= 1");
    c.n = *v;
  }
  const json* F = o.get("F");
  if (!F) invalid(o.field("F"), "required");
  c.F = scalar(*F, o.field("F"), kRadialVars, true);
  const json* G = o.get("G");
  if (!G) invalid(o.field("G"), "required");
  c.G = scalar(*G, o.field("G"), kRadialVars, true);
  if (auto v = o.positive("c_F")) c.c_F = *v;
  if (auto v = o.positive("r_min")) c.r_min = *v;
  if (auto v = o.positive("r_max")) c.r_max = *v;
  if (auto v = o.integer("grid_n")) {
    if (*v < 3) invalid(o.field("grid_n"), "must be >= 3");
    c.grid_n = *v;
  }
  if (auto v = o.boolean("ergodic")) c.ergodic = *v;
  if (auto v = o.positive("aubry_tol")) c.aubry_tol = *v;
  if (auto v = o.positive("tail_tol")) c.tail_tol = *v;
  if (auto v = o.string("outer")) {
    if (*v == "clamped") {
      c.outer = OuterBoundary::ClampedSlope;
    } else if (*v == "free") {
      c.outer = OuterBoundary::ExtrapolateFree;
    } else {
      invalid(o.field("outer"), "expected \"clamped\" or \"free\"");
    }
  }
  const double r_min = c.r_min.value_or(1e-3 * (c.n - 1));
  if (c.r_min && !(c.r_max > r_min)) invalid(o.field("r_max"), "must exceed r_min");
}

void parse_numerics(const json& j, Numerics& nm) {
  Obj o(j, "numerics",
        {"t_max", "snapshot_every", "dt", "eps_reg", "cfl_safety", "velocity_samples", "cone_tol",
         "conv_tol", "limit_tol", "alphas", "window", "region", "kappa", "dp"});
  auto t = o.positive("t_max");
  if (!t) invalid(o.field("t_max"), "required");
  nm.t_max = *t;
  nm.snapshot_every = o.positive("snapshot_every");
  nm.dt = o.positive("dt");
  if (auto v = o.positive("eps_reg")) nm.eps_reg = *v;
  if (auto v = o.positive("cfl_safety")) {
    if (*v > 1.0) invalid(o.field("cfl_safety"), "must be <= 1");
    nm.cfl_safety = *v;
  }
  if (auto v = o.integer("velocity_samples")) {
    if (*v < 2) invalid(o.field("velocity_samples"), "must be >= 2");
    nm.velocity_samples = *v;
  }
  if (auto v = o.positive("cone_tol")) nm.cone_tol = *v;
  if (auto v = o.positive("conv_tol")) nm.conv_tol = *v;
  if (auto v = o.positive("limit_tol")) nm.limit_tol = *v;
  if (const json* a = o.get("alphas")) {
    nm.alphas = number_array(*a, o.field("alphas"));
    for (double x : nm.alphas) {
      if (!(x > 0.0)) invalid(o.field("alphas"), "entries must be > 0");
    }
  }
  nm.window = o.positive("window");
  if (const json* r = o.get("region")) {
    auto v = number_array(*r, o.field("region"));
    if (v.size() != 2 || !(v[0] < v[1])) invalid(o.field("region"), "expected [a, b] with a < b");
    nm.region = std::make_pair(v[0], v[1]);
  }
  if (auto v = o.positive("kappa")) nm.kappa = *v;
  if (const json* d = o.get("dp")) {
    Obj p(*d, o.field("dp"), {"r_min", "r_max", "grid_n", "dt", "t_max"});
    nm.dp.r_min = p.positive("r_min");
    nm.dp.r_max = p.positive("r_max");
    if (auto v = p.integer("grid_n")) {
      if (*v < 3) invalid(p.field("grid_n"), "must be >= 3");
      nm.dp.grid_n = *v;
    }
    nm.dp.dt = p.positive("dt");
    nm.dp.t_max = p.positive("t_max");
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a 1-based line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(col) + ": " + e.what());
  }

  RunConfig c;
  Obj top(j, "", {"mode", "name", "problem", "numerics", "output_dir"});
  const json* problem = top.get("problem");
  if (!problem) invalid("problem", "required");
  if (!problem->is_object()) invalid("problem", "expected an object");
  auto kind_it = problem->find("kind");
  if (kind_it == problem->end() || !kind_it->is_string()) {
    invalid("problem.kind", "required (\"periodic\" or \"radial\")");
  }
  const auto kind = kind_it->get<std::string>();
  if (kind == "periodic") {
    c.kind = ProblemKind::Periodic;
    parse_periodic(*problem, c.periodic);
  } else if (kind == "radial") {
    c.kind = ProblemKind::Radial;
    parse_radial(*problem, c.radial);
  } else {
    invalid("problem.kind", "expected \"periodic\" or \"radial\"");
  }
  c.mode = c.kind == ProblemKind::Periodic ? Mode::Periodic : Mode::Radial;
  if (auto m = top.string("mode")) c.mode = parse_mode(*m);

  const json* numerics = top.get("numerics");
  if (!numerics) invalid("numerics", "required");
  parse_numerics(*numerics, c.numerics);
  if (c.numerics.snapshot_every && *c.numerics.snapshot_every > c.numerics.t_max) {
    invalid("numerics.snapshot_every", "must not exceed t_max");
  }
  if (auto v = top.string("output_dir")) c.output_dir = *v;
  if (auto v = top.string("name")) c.name = *v;
  return c;
}

}  // namespace gcurve
