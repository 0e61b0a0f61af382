#include "document.hpp"

#include <algorithm>
#include <cmath>

namespace rdsio::scenario::detail {

void Doc::fail(const YAML::Node& at, const std::string& msg) const {
  const YAML::Mark m = at.IsDefined() ? at.Mark() : YAML::Mark::null_mark();
  throw ScenarioError(source_, m.line >= 0 ? m.line + 1 : 0, m.column >= 0 ? m.column + 1 : 0, msg);
}

void Doc::fail_in(const YAML::Node& at, std::size_t offset, const std::string& msg) const {
  const YAML::Mark m = at.Mark();
  // Quoted scalars start one character later.
  const int quote = at.Tag() == "!" ? 1 : 0;
  throw ScenarioError(source_, m.line + 1, m.column + 1 + quote + static_cast<int>(offset), msg);
}

Map::Map(Doc& doc, const YAML::Node& node, std::string what) : doc_(&doc), node_(node), what_(std::move(what)) {
  if (!node.IsMap()) doc.fail(node, what_ + " must be a mapping");
}

void Map::allow(std::initializer_list<const char*> keys) const {
  for (const auto& kv : node_) {
    const std::string k = kv.first.as<std::string>();
    if (std::none_of(keys.begin(), keys.end(), [&k](const char* a) { return k == a; })) {
      doc_->fail(kv.first, "unknown key '" + k + "' in " + what_);
    }
  }
}

bool Map::has(const char* key) const { return static_cast<bool>(node_[key]); }

YAML::Node Map::get(const char* key) const {
  const YAML::Node n = node_[key];
  if (!n) doc_->fail(node_, what_ + ": missing required key '" + key + "'");
  return n;
}

double as_number(Doc& doc, const YAML::Node& n) {
  if (!n.IsScalar()) doc.fail(n, "expected a number");
  try {
    const double v = n.as<double>();
    if (!std::isfinite(v)) doc.fail(n, "expected a finite number");
    return v;
  } catch (const YAML::BadConversion&) {
    doc.fail(n, "expected a number, got '" + n.Scalar() + "'");
  }
}

Vec as_numbers(Doc& doc, const YAML::Node& n) {
  if (n.IsSequence()) {
    Vec v;
    for (const auto& e : n) v.push_back(as_number(doc, e));
    if (v.empty()) doc.fail(n, "expected at least one number");
    return v;
  }
  return {as_number(doc, n)};
}

double Map::number(const char* key) const { return as_number(*doc_, get(key)); }

double Map::number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

std::size_t Map::count(const char* key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const YAML::Node n = get(key);
  const double v = as_number(*doc_, n);
  if (v < 0 || v != std::floor(v)) doc_->fail(n, std::string(key) + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::string Map::text(const char* key) const {
  const YAML::Node n = get(key);
  if (!n.IsScalar()) doc_->fail(n, std::string(key) + " must be a string");
  return n.Scalar();
}

std::string Map::text(const char* key, const std::string& fallback) const { return has(key) ? text(key) : fallback; }

bool Map::flag(const char* key, bool fallback) const {
  if (!has(key)) return fallback;
  const YAML::Node n = get(key);
  try {
    return n.as<bool>();
  } catch (const YAML::BadConversion&) {
    doc_->fail(n, std::string(key) + " must be true or false");
  }
}

namespace {

CellLaw parse_law(Doc& doc, const Map& m) {
  if (m.has("constant")) return law::Constant{as_numbers(doc, m.get("constant"))};
  if (m.has("uniform")) {
    const YAML::Node u = m.get("uniform");
    if (u.IsMap()) {
      Map b(doc, u, "uniform");
      b.allow({"low", "high"});
      return law::Uniform{as_numbers(doc, b.get("low")), as_numbers(doc, b.get("high"))};
    }
    const Vec lh = as_numbers(doc, u);
    if (lh.size() != 2) doc.fail(u, "uniform takes [low, high] or {low: [...], high: [...]}");
    return law::Uniform{{lh[0]}, {lh[1]}};
  }
  if (m.has("exponential")) return law::Exponential{as_numbers(doc, m.get("exponential"))};
  if (m.has("discrete")) {
    law::Discrete d;
    for (const auto& e : m.get("discrete")) d.support.push_back(as_numbers(doc, e));
    if (m.has("weights")) d.weights = as_numbers(doc, m.get("weights"));
    return d;
  }
  doc.fail(m.node(), "variable needs one of constant, uniform, exponential or discrete");
}

}  // namespace

RandomVariable parse_variable(Doc& doc, const YAML::Node& n, std::size_t dim) {
  // A bare number is a constant.
  if (n.IsScalar() || n.IsSequence()) {
    const Vec v = as_numbers(doc, n);
    if (dim != 0 && v.size() != dim) doc.fail(n, "expected dimension " + std::to_string(dim));
    return RandomVariable::constant(v);
  }
  Map m(doc, n, "variable");
  m.allow({"constant", "uniform", "exponential", "discrete", "weights", "stream"});
  const CellLaw law = parse_law(doc, m);
  try {
    validate_law(law);
  } catch (const Error& e) {
    doc.fail(n, e.what());
  }
  if (dim != 0 && law_dim(law) != dim) doc.fail(n, "expected dimension " + std::to_string(dim));
  const std::uint64_t stream = m.has("stream") ? static_cast<std::uint64_t>(m.count("stream", 0)) : doc.next_stream();
  if (std::holds_alternative<law::Constant>(law)) return RandomVariable::constant(std::get<law::Constant>(law).value);
  return RandomVariable::cell(law, stream);
}

namespace {

struct Symbols {
  ExprSymbols table;
  std::vector<RandomVariable> noises;
};

Symbols parse_symbols(Doc& doc, const Map& m, std::size_t n, std::size_t k) {
  Symbols s;
  s.table.state_dim = n;
  s.table.input_dim = k;
  if (m.has("noise")) {
    Map noise(doc, m.get("noise"), "noise");
    for (const auto& kv : noise.node()) {
      const RandomVariable r = parse_variable(doc, kv.second, 1);
      if (r.regularity() != Regularity::cell_constant) doc.fail(kv.second, "noise must be constant on cells");
      s.table.noises.push_back(kv.first.as<std::string>());
      s.noises.push_back(r);
    }
  }
  if (m.has("tables")) {
    Map tables(doc, m.get("tables"), "tables");
    for (const auto& kv : tables.node()) {
      Map t(doc, kv.second, "table");
      t.allow({"x", "y"});
      Table tab{as_numbers(doc, t.get("x")), as_numbers(doc, t.get("y"))};
      try {
        tab.validate();
      } catch (const Error& e) {
        doc.fail(kv.second, e.what());
      }
      s.table.tables.emplace(kv.first.as<std::string>(), std::move(tab));
    }
  }
  return s;
}

std::vector<Expr> parse_exprs(Doc& doc, const YAML::Node& n, const ExprSymbols& sym, std::size_t expect,
                              const char* what) {
  std::vector<YAML::Node> items;
  if (n.IsSequence()) {
    for (const auto& e : n) items.push_back(e);
  } else {
    items.push_back(n);
  }
  if (expect != 0 && items.size() != expect) {
    doc.fail(n, std::string(what) + ": expected " + std::to_string(expect) + " expression(s)");
  }
  std::vector<Expr> out;
  for (const auto& e : items) {
    if (!e.IsScalar()) doc.fail(e, std::string(what) + ": expected an expression string");
    try {
      out.push_back(Expr::parse(e.Scalar(), sym));
    } catch (const ExprError& err) {
      doc.fail_in(e, err.column() - 1, err.what());
    }
  }
  return out;
}

Vec noise_values(const std::vector<RandomVariable>& noises, const Fiber& w) {
  Vec v;
  v.reserve(noises.size());
  for (const auto& r : noises) v.push_back(r.scalar(w));
  return v;
}

OutputMap make_output(const Symbols& sym, std::vector<Expr> exprs, std::size_t n) {
  const std::size_t p = exprs.size();
  return OutputMap(n, p, [noises = sym.noises, exprs = std::move(exprs)](const Fiber& w, const Vec& x) {
    const Vec nv = noise_values(noises, w);
    Vec y;
    y.reserve(exprs.size());
    for (const auto& e : exprs) y.push_back(e.eval(x, {}, nv));
    return y;
  });
}

SystemFlow with_fault(Doc& doc, const YAML::Node& n, SystemFlow flow) {
  Map f(doc, n, "fault");
  f.allow({"identity_offset"});
  const double c = f.number("identity_offset");
  return SystemFlow(flow.time_kind(), flow.state_dim(), flow.input_dim(),
                    [flow, c](double t, const Fiber& w, const Vec& x, const Process& u) {
                      if (t == 0.0) {
                        Vec y = x;
                        for (double& v : y) v += c;
                        return y;
                      }
                      return flow(t, w, x, u);
                    },
                    flow.name() + "+fault");
}

}  // namespace

SystemModel parse_system(Doc& doc, const YAML::Node& n, TimeKind time) {
  Map m(doc, n, "system");
  const std::string type = m.text("type");
  if (type == "generator") {
    m.allow({"type", "state_dim", "input_dim", "noise", "tables", "step", "output", "fault"});
    if (time != TimeKind::discrete) doc.fail(m.get("type"), "generator systems need time: discrete");
    const std::size_t sd = m.count("state_dim", 1);
    const std::size_t id = m.count("input_dim", 1);
    if (sd == 0) doc.fail(m.get("state_dim"), "state_dim must be positive");
    const Symbols sym = parse_symbols(doc, m, sd, id);
    const std::vector<Expr> step = parse_exprs(doc, m.get("step"), sym.table, sd, "step");
    Generator g{sd, id, [noises = sym.noises, step](const Fiber& w, const Vec& x, const Vec& u) {
                  const Vec nv = noise_values(noises, w);
                  Vec y;
                  y.reserve(step.size());
                  for (const auto& e : step) y.push_back(e.eval(x, u, nv));
                  return y;
                }};
    ExprSymbols out_sym = sym.table;
    out_sym.input_dim = 0;
    const OutputMap h = m.has("output") ? make_output(sym, parse_exprs(doc, m.get("output"), out_sym, 0, "output"), sd)
                                        : OutputMap::identity(sd);
    SystemFlow flow = flow_from_generator(g, "generator");
    if (m.has("fault")) flow = with_fault(doc, m.get("fault"), flow);
    return SystemModel{flow, h, g, std::nullopt};
  }
  if (type == "linear") {
    m.allow({"type", "a", "b", "lambda", "output", "noise", "fault"});
    if (time != TimeKind::continuous) doc.fail(m.get("type"), "linear systems need time: continuous");
    LinearCoeffs c{parse_variable(doc, m.get("a"), 1), parse_variable(doc, m.get("b"), 1), std::nullopt};
    if (m.has("lambda")) c.lambda_hint = m.number("lambda");
    try {
      validate(c);
    } catch (const Error& e) {
      doc.fail(n, e.what());
    }
    const Symbols sym = parse_symbols(doc, m, 1, 0);
    ExprSymbols out_sym = sym.table;
    const OutputMap h = m.has("output") ? make_output(sym, parse_exprs(doc, m.get("output"), out_sym, 0, "output"), 1)
                                        : OutputMap::identity(1);
    SystemFlow flow = linear_system(c);
    if (m.has("fault")) flow = with_fault(doc, m.get("fault"), flow);
    return SystemModel{flow, h, std::nullopt, c};
  }
  doc.fail(m.get("type"), "system type must be generator or linear");
}

InputModel parse_input(Doc& doc, const YAML::Node& n, std::size_t dim, TimeKind time) {
  if (!n) {
    return InputModel{"none", Process::constant(Vec(dim, 0.0), time), RandomVariable::constant(Vec(dim, 0.0)),
                      std::nullopt};
  }
  Map m(doc, n, "input");
  const std::string type = m.text("type");
  if (type == "none") {
    m.allow({"type"});
    return InputModel{"none", Process::constant(Vec(dim, 0.0), time), RandomVariable::constant(Vec(dim, 0.0)),
                      std::nullopt};
  }
  if (dim == 0) doc.fail(n, "the system takes no input");
  if (type == "constant") {
    m.allow({"type", "value"});
    const Vec v = as_numbers(doc, m.get("value"));
    if (v.size() != dim) doc.fail(m.get("value"), "expected dimension " + std::to_string(dim));
    return InputModel{type, Process::constant(v, time), RandomVariable::constant(v), std::nullopt};
  }
  if (type == "stationary") {
    m.allow({"type", "variable"});
    const RandomVariable q = parse_variable(doc, m.get("variable"), dim);
    return InputModel{type, stationary(q, time).process(), q, std::nullopt};
  }
  if (type == "converging") {
    // u_t(w) = limit(theta_t w) + e^{-t} kick(theta_t w)
    m.allow({"type", "limit", "kick"});
    const RandomVariable limit = parse_variable(doc, m.get("limit"), dim);
    const RandomVariable kick = parse_variable(doc, m.get("kick"), dim);
    const Process u(dim, time, [limit, kick](double t, const Fiber& w) {
      const Fiber at = shift(w, t);
      return add(limit(at), scale(std::exp(-t), kick(at)));
    });
    return InputModel{type, u, std::nullopt, limit};
  }
  doc.fail(m.get("type"), "input type must be none, constant, stationary or converging");
}

}  // namespace rdsio::scenario::detail
