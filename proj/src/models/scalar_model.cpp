#include "shelab/models/scalar_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "shelab/errors.hpp"

namespace shelab::models {

namespace {

constexpr double kE = 2.718281828459045;

enum class PowKind { zero, one, two, three, half, three_halves, general };

struct BaseParams {
  double amplitude = 1.0;
  double exponent = 1.0;
  double offset = 0.0;
  double shift = 0.0;
  double a0 = 1.0;
  double a1 = 1.0;
  double rate = 1.0;
  double phase = 0.0;
  double c = 0.0;
  int depth = 1;
  double floor = 1.0;  // log-iterated: y below which the value is `offset`
  PowKind pow_kind = PowKind::general;
};

double get(const ParamMap& m, const char* key, double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

template <class T>
T lift(double c) {
  if constexpr (std::is_same_v<T, double>) return c;
  else return Jet::constant(c);
}

}  // namespace

struct ScalarFunctionModel::Node {
  Kind kind = Kind::base;
  ModelSpec spec;
  BaseParams p;
  std::shared_ptr<const Node> child;
  double level = 0.0;  // cutoff level or scale factor
  double h0 = 0.0;     // g-transform / g-inverse: h(0)
};

namespace {

using Node = ScalarFunctionModel::Node;

BaseParams parse_params(const ModelSpec& s) {
  BaseParams p;
  const auto& m = s.params;
  for (const auto& [k, v] : m) {
    if (!std::isfinite(v)) throw ParameterError("model parameter '" + k + "' is not finite");
  }
  p.amplitude = get(m, "A", 1.0);
  p.offset = get(m, "offset", 0.0);
  switch (s.family) {
    case Family::power: {
      p.exponent = get(m, "beta", 1.0);
      const double b = p.exponent;
      p.pow_kind = b == 0.0   ? PowKind::zero
                   : b == 1.0 ? PowKind::one
                   : b == 2.0 ? PowKind::two
                   : b == 3.0 ? PowKind::three
                   : b == 0.5 ? PowKind::half
                   : b == 1.5 ? PowKind::three_halves
                              : PowKind::general;
      break;
    }
    case Family::affine_log_power:
      p.shift = get(m, "shift", 1.0);
      p.a0 = get(m, "a0", p.shift);
      p.a1 = get(m, "a1", 1.0);
      p.exponent = get(m, "beta", 1.0);
      break;
    case Family::log_iterated: {
      const double d = get(m, "depth", 1.0);
      if (!is_integer(d) || d < 1 || d > 3) throw ParameterError("log-iterated depth must be 1, 2 or 3");
      p.depth = static_cast<int>(d);
      p.shift = get(m, "shift", 0.0);
      p.floor = p.depth == 1 ? 1.0 : p.depth == 2 ? kE : std::exp(kE);
      break;
    }
    case Family::constant:
      p.c = get(m, "c", 0.0);
      break;
    case Family::exponential:
      p.rate = get(m, "lambda", 1.0);
      break;
    case Family::trigonometric:
      p.rate = get(m, "omega", 1.0);
      p.phase = get(m, "phase", 0.0);
      break;
    case Family::tabulated: {
      const auto& xs = s.knots_x;
      const auto& ys = s.knots_y;
      if (xs.size() < 2 || xs.size() != ys.size())
        throw ParameterError("tabulated model needs at least two knots with matching x and y");
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
          throw ParameterError("tabulated knot is not finite");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ParameterError("tabulated knots must be strictly increasing");
      }
      break;
    }
  }
  return p;
}

template <class T>
T power_phi(const BaseParams& p, T x) {
  using std::pow;
  using std::sqrt;
  T y;
  switch (p.pow_kind) {
    case PowKind::zero: return lift<T>(p.amplitude + p.offset);
    case PowKind::one: y = x; break;
    case PowKind::two: y = x * x; break;
    case PowKind::three: y = x * x * x; break;
    case PowKind::half: y = sqrt(x); break;
    case PowKind::three_halves: y = x * sqrt(x); break;
    default: y = pow(x, p.exponent); break;
  }
  return y * p.amplitude + p.offset;
}

template <class T>
T affine_log_phi(const BaseParams& p, T x) {
  using std::log;
  using std::pow;
  const T lg = log(x + p.shift);
  const T lp = p.exponent == 1.0 ? lg : pow(lg, p.exponent);
  return (x * p.a1 + p.a0) * lp * p.amplitude + p.offset;
}

template <class T>
T log_iter_phi(const BaseParams& p, T x) {
  using std::log;
  const T y = x + p.shift;
  if (!(value_of(y) > p.floor)) return lift<T>(p.offset);
  T prod = y;
  T l = y;
  for (int j = 0; j < p.depth; ++j) {
    l = log(l);
    prod = prod * l;
  }
  return prod * p.amplitude + p.offset;
}

template <class T>
T phi(const Node& n, T x);

double tab_value(const ModelSpec& s, double x, double* slope) {
  const auto& xs = s.knots_x;
  const auto& ys = s.knots_y;
  if (x < xs.front() || x > xs.back()) {
    std::ostringstream os;
    os << "tabulated model queried at " << x << " outside [" << xs.front() << ", " << xs.back() << "]";
    throw RangeError(os.str());
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i >= xs.size()) i = xs.size() - 1;
  if (i == 0) i = 1;
  const double s1 = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
  if (slope) *slope = s1;
  return ys[i - 1] + s1 * (x - xs[i - 1]);
}

template <class T>
T phi(const Node& n, T x) {
  using std::exp;
  using std::sin;
  const BaseParams& p = n.p;
  switch (n.spec.family) {
    case Family::power: return power_phi(p, x);
    case Family::affine_log_power: return affine_log_phi(p, x);
    case Family::log_iterated: return log_iter_phi(p, x);
    case Family::constant: return lift<T>(p.c);
    case Family::exponential: return exp(x * p.rate) * p.amplitude + p.offset;
    case Family::trigonometric: return sin(x * p.rate + p.phase) * p.amplitude + p.offset;
    case Family::tabulated: {
      double slope = 0.0;
      const double v = tab_value(n.spec, value_of(x), &slope);
      if constexpr (std::is_same_v<T, double>) {
        return v;
      } else {
        return compose(x, v, slope, 0.0);
      }
    }
  }
  return lift<T>(0.0);
}

template <class T>
T base_eval(const Node& n, double u) {
  const Symmetry sym = n.spec.symmetry;
  if (sym == Symmetry::none) {
    if constexpr (std::is_same_v<T, double>) return phi<double>(n, u);
    else return phi<Jet>(n, Jet::variable(u));
  }
  const bool neg = u < 0.0;
  T x;
  if constexpr (std::is_same_v<T, double>) x = neg ? -u : u;
  else x = neg ? Jet{-u, -1.0, 0.0} : Jet::variable(u);
  T r = phi<T>(n, x);
  if (sym == Symmetry::odd && neg) return -r;
  return r;
}

std::shared_ptr<Node> make_base(const ModelSpec& spec) {
  auto n = std::make_shared<Node>();
  n->kind = ScalarFunctionModel::Kind::base;
  n->spec = spec;
  n->spec.cutoff.reset();
  n->p = parse_params(spec);
  return n;
}

template <class T>
T eval_node(const Node& n, double u);

// h^{-1}(w) on [0, inf) by bracketing and bisection.
double invert_node(const Node& n, double w, double lower);

template <class T>
T eval_node(const Node& n, double u) {
  using Kind = ScalarFunctionModel::Kind;
  switch (n.kind) {
    case Kind::base: return base_eval<T>(n, u);
    case Kind::cutoff: {
      const double lv = n.level;
      if (u > lv) {
        return lift<T>(eval_node<double>(*n.child, lv));
      }
      if (u < -lv) {
        return lift<T>(eval_node<double>(*n.child, -lv));
      }
      return eval_node<T>(*n.child, u);
    }
    case Kind::scaled: return eval_node<T>(*n.child, u) * n.level;
    case Kind::f_product: {
      if constexpr (std::is_same_v<T, double>) return u * eval_node<double>(*n.child, u);
      else return Jet::variable(u) * eval_node<Jet>(*n.child, u);
    }
    case Kind::g_inverse_product: {
      const double y = invert_node(*n.child, u, 0.0);
      if constexpr (std::is_same_v<T, double>) {
        return u * y;
      } else {
        const Jet hy = eval_node<Jet>(*n.child, y);
        const Jet inv{y, 1.0 / hy.d1, -hy.d2 / (hy.d1 * hy.d1 * hy.d1)};
        return Jet::variable(u) * inv;
      }
    }
    case Kind::g_transform: {
      // e^{-u}(h(e^u) - h0); switch to the log route once h(e^u) overflows.
      if (u < 700.0) {
        if constexpr (std::is_same_v<T, double>) {
          const double x = std::exp(u);
          const double hx = eval_node<double>(*n.child, x);
          if (std::isfinite(hx)) return (hx - n.h0) / x;
        } else {
          const Jet x = exp(Jet::variable(u));
          const Jet hj = eval_node<Jet>(*n.child, x.v);
          const Jet hx = compose(x, hj.v, hj.d1, hj.d2);
          if (std::isfinite(hx.v) && std::isfinite(hx.d1) && std::isfinite(hx.d2))
            return (hx - n.h0) * exp(-Jet::variable(u));
        }
      }
      const ScalarFunctionModel h(n.child);
      if constexpr (std::is_same_v<T, double>) {
        const double lg = h.log_value_at_exp(Jet::constant(u)).v;
        return std::exp(lg - u) - n.h0 * std::exp(-u);
      } else {
        const Jet lg = h.log_value_at_exp(Jet::variable(u));
        return exp(lg - Jet::variable(u)) - exp(-Jet::variable(u)) * n.h0;
      }
    }
  }
  return lift<T>(0.0);
}

double invert_node(const Node& n, double w, double lower) {
  auto f = [&](double x) { return eval_node<double>(n, x) - w; };
  double lo = lower;
  double flo = f(lo);
  if (!std::isfinite(flo)) throw InversionError("inverse: model not finite at the lower end");
  if (flo > 0.0) {
    std::ostringstream os;
    os << "inverse: no bracket, model at " << lo << " already exceeds " << w;
    throw InversionError(os.str());
  }
  if (flo == 0.0) return lo;
  double step = std::max(1.0, std::abs(lo));
  double hi = lo + step;
  double fhi = f(hi);
  while (!(fhi >= 0.0)) {
    if (!std::isfinite(fhi) && !std::isnan(fhi)) break;
    if (std::isnan(fhi)) throw InversionError("inverse: model returned NaN while bracketing");
    lo = hi;
    step *= 2.0;
    hi = lo + step;
    if (hi > 1e300) throw InversionError("inverse: failed to bracket target value");
    fhi = f(hi);
  }
  if (fhi == 0.0) return hi;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)); };
  std::uintmax_t iters = 2000;
  const auto r = boost::math::tools::bisect(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

// log phi(e^s) for base families with x = e^s > 0.
Jet log_base_at_exp(const Node& n, Jet s) {
  const BaseParams& p = n.p;
  auto fallback = [&]() -> Jet {
    const Jet x = exp(s);
    return log(phi<Jet>(n, x));
  };
  if (s.v < 600.0) return fallback();
  switch (n.spec.family) {
    case Family::power:
      if (p.amplitude > 0.0 && p.exponent > 0.0) {
        // A e^{beta s} + offset, offset negligible relative to the leading term
        return s * p.exponent + std::log(p.amplitude);
      }
      break;
    case Family::affine_log_power:
      if (p.amplitude > 0.0 && p.a1 > 0.0) {
        // log(a1 x + a0) ~ s + log a1; log(shift + x) ~ s
        Jet lin = s + std::log(p.a1);
        Jet lg = s;
        return lin + log(lg) * p.exponent + std::log(p.amplitude);
      }
      break;
    case Family::log_iterated:
      if (p.amplitude > 0.0) {
        Jet acc = s + std::log(p.amplitude);
        Jet l = s;  // log y for y = e^s (shift negligible)
        acc = acc + log(l);
        for (int j = 1; j < p.depth; ++j) {
          l = log(l);
          acc = acc + log(l);
        }
        return acc;
      }
      break;
    case Family::exponential:
      if (p.amplitude > 0.0 && p.rate > 0.0) {
        return exp(s) * p.rate + std::log(p.amplitude);
      }
      break;
    case Family::constant:
      if (p.c > 0.0) return Jet::constant(std::log(p.c));
      break;
    default: break;
  }
  throw DomainError("log-domain evaluation not available for " + to_string(n.spec.family));
}

Jet log_node_at_exp(const Node& n, Jet s) {
  using Kind = ScalarFunctionModel::Kind;
  switch (n.kind) {
    case Kind::base: return log_base_at_exp(n, s);
    case Kind::scaled:
      if (n.level > 0.0) return log_node_at_exp(*n.child, s) + std::log(n.level);
      break;
    case Kind::f_product: return log_node_at_exp(*n.child, s) + s;
    default: break;
  }
  throw DomainError("log-domain evaluation not available for this model");
}

Domain node_domain(const Node& n) {
  using Kind = ScalarFunctionModel::Kind;
  switch (n.kind) {
    case Kind::base: return n.spec.domain;
    case Kind::cutoff:
    case Kind::scaled: return node_domain(*n.child);
    case Kind::f_product: return node_domain(*n.child);
    case Kind::g_inverse_product: return Domain::half_line;
    case Kind::g_transform: return Domain::full_line;
  }
  return Domain::full_line;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::power: return "power";
    case Family::affine_log_power: return "affine-log-power";
    case Family::log_iterated: return "log-iterated";
    case Family::constant: return "constant";
    case Family::tabulated: return "tabulated";
    case Family::exponential: return "exponential";
    case Family::trigonometric: return "trigonometric";
  }
  return "?";
}

std::string to_string(Symmetry s) {
  switch (s) {
    case Symmetry::none: return "none";
    case Symmetry::even: return "even";
    case Symmetry::odd: return "odd";
  }
  return "?";
}

std::string to_string(Domain d) { return d == Domain::half_line ? "half-line" : "full-line"; }

Family family_from_string(const std::string& s) {
  for (Family f : {Family::power, Family::affine_log_power, Family::log_iterated, Family::constant,
                   Family::tabulated, Family::exponential, Family::trigonometric})
    if (to_string(f) == s) return f;
  throw ParameterError("unknown model family '" + s + "'");
}

Symmetry symmetry_from_string(const std::string& s) {
  for (Symmetry v : {Symmetry::none, Symmetry::even, Symmetry::odd})
    if (to_string(v) == s) return v;
  throw ParameterError("unknown symmetry '" + s + "'");
}

Domain domain_from_string(const std::string& s) {
  if (s == "half-line") return Domain::half_line;
  if (s == "full-line") return Domain::full_line;
  throw ParameterError("unknown domain '" + s + "'");
}

ScalarFunctionModel::ScalarFunctionModel() : ScalarFunctionModel(ModelSpec{}) {}

ScalarFunctionModel::ScalarFunctionModel(const ModelSpec& spec) {
  auto base = make_base(spec);
  if (spec.cutoff) {
    if (!(*spec.cutoff > 0.0)) throw ParameterError("cutoff level must be positive");
    auto n = std::make_shared<Node>();
    n->kind = Kind::cutoff;
    n->child = base;
    n->level = *spec.cutoff;
    node_ = n;
  } else {
    node_ = base;
  }
}

ScalarFunctionModel ScalarFunctionModel::power(double amplitude, double exponent, Symmetry sym, Domain dom,
                                               double offset) {
  ModelSpec s;
  s.family = Family::power;
  s.params = {{"A", amplitude}, {"beta", exponent}};
  if (offset != 0.0) s.params["offset"] = offset;
  s.symmetry = sym;
  s.domain = dom;
  return ScalarFunctionModel(s);
}

ScalarFunctionModel ScalarFunctionModel::constant(double c, Domain dom) {
  ModelSpec s;
  s.family = Family::constant;
  s.params = {{"c", c}};
  s.domain = dom;
  return ScalarFunctionModel(s);
}

ScalarFunctionModel ScalarFunctionModel::affine_log_power(double amplitude, double a0, double a1, double shift,
                                                          double exponent, Symmetry sym, Domain dom,
                                                          double offset) {
  ModelSpec s;
  s.family = Family::affine_log_power;
  s.params = {{"A", amplitude}, {"a0", a0}, {"a1", a1}, {"shift", shift}, {"beta", exponent}};
  if (offset != 0.0) s.params["offset"] = offset;
  s.symmetry = sym;
  s.domain = dom;
  return ScalarFunctionModel(s);
}

ScalarFunctionModel ScalarFunctionModel::log_iterated(double amplitude, int depth, double shift, Symmetry sym,
                                                      Domain dom, double offset) {
  ModelSpec s;
  s.family = Family::log_iterated;
  s.params = {{"A", amplitude}, {"depth", static_cast<double>(depth)}, {"shift", shift}};
  if (offset != 0.0) s.params["offset"] = offset;
  s.symmetry = sym;
  s.domain = dom;
  return ScalarFunctionModel(s);
}

ScalarFunctionModel ScalarFunctionModel::exponential(double amplitude, double rate, double offset, Domain dom) {
  ModelSpec s;
  s.family = Family::exponential;
  s.params = {{"A", amplitude}, {"lambda", rate}};
  if (offset != 0.0) s.params["offset"] = offset;
  s.domain = dom;
  return ScalarFunctionModel(s);
}

ScalarFunctionModel ScalarFunctionModel::trigonometric(double amplitude, double frequency, double phase,
                                                       double offset) {
  ModelSpec s;
  s.family = Family::trigonometric;
  s.params = {{"A", amplitude}, {"omega", frequency}, {"phase", phase}};
  if (offset != 0.0) s.params["offset"] = offset;
  return ScalarFunctionModel(s);
}

ScalarFunctionModel ScalarFunctionModel::tabulated(std::vector<double> xs, std::vector<double> ys, Domain dom) {
  ModelSpec s;
  s.family = Family::tabulated;
  s.knots_x = std::move(xs);
  s.knots_y = std::move(ys);
  s.domain = dom;
  return ScalarFunctionModel(s);
}

double ScalarFunctionModel::value(double u) const {
  const Node& n = *node_;
  if (n.kind == Kind::base && n.spec.symmetry == Symmetry::none) {
    const BaseParams& p = n.p;
    switch (n.spec.family) {
      case Family::power: return power_phi<double>(p, u);
      case Family::constant: return p.c;
      default: break;
    }
  }
  return eval_node<double>(n, u);
}

Jet ScalarFunctionModel::jet(double u) const {
  if (!std::isfinite(u)) throw DomainError("model evaluated at a non-finite point");
  if (domain() == Domain::half_line && u < 0.0) {
    std::ostringstream os;
    os << "u = " << u << " outside the half-line domain";
    throw DomainError(os.str());
  }
  if (node_->kind == Kind::g_inverse_product && u < node_->h0) {
    std::ostringstream os;
    os << "u = " << u << " below h(0) = " << node_->h0;
    throw DomainError(os.str());
  }
  const Jet j = eval_node<Jet>(*node_, u);
  if (std::isnan(j.v)) {
    std::ostringstream os;
    os << "u = " << u << " outside the domain of " << describe();
    throw DomainError(os.str());
  }
  return j;
}

double ScalarFunctionModel::evaluate(double u, int order) const {
  if (order < 0 || order > 2) throw ParameterError("derivative order must be 0, 1 or 2");
  const Jet j = jet(u);
  const double r = order == 0 ? j.v : order == 1 ? j.d1 : j.d2;
  if (std::isnan(r) || (order > 0 && !std::isfinite(r) && std::isfinite(j.v))) {
    std::ostringstream os;
    os << "derivative of order " << order << " undefined at u = " << u;
    throw DomainError(os.str());
  }
  return r;
}

Jet ScalarFunctionModel::log_value_at_exp(Jet s) const { return log_node_at_exp(*node_, s); }

ScalarFunctionModel::Kind ScalarFunctionModel::kind() const { return node_->kind; }

Domain ScalarFunctionModel::domain() const { return node_domain(*node_); }

std::optional<ModelSpec> ScalarFunctionModel::spec() const {
  if (node_->kind == Kind::base) return node_->spec;
  if (node_->kind == Kind::cutoff && node_->child->kind == Kind::base) {
    ModelSpec s = node_->child->spec;
    s.cutoff = node_->level;
    return s;
  }
  return std::nullopt;
}

std::optional<double> ScalarFunctionModel::param(const std::string& name) const {
  const Node* n = node_.get();
  while (n->kind != Kind::base && n->child) n = n->child.get();
  if (n->kind != Kind::base) return std::nullopt;
  auto it = n->spec.params.find(name);
  if (it == n->spec.params.end()) return std::nullopt;
  return it->second;
}

std::string ScalarFunctionModel::describe() const {
  std::ostringstream os;
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::base: {
      os << to_string(n.spec.family) << "(";
      bool first = true;
      for (const auto& [k, v] : n.spec.params) {
        os << (first ? "" : ", ") << k << "=" << v;
        first = false;
      }
      os << ")";
      if (n.spec.symmetry != Symmetry::none) os << "[" << to_string(n.spec.symmetry) << "]";
      break;
    }
    case Kind::cutoff: os << "cutoff(" << ScalarFunctionModel(n.child).describe() << ", " << n.level << ")"; break;
    case Kind::scaled: os << n.level << "*" << ScalarFunctionModel(n.child).describe(); break;
    case Kind::g_transform: os << "g_transform(" << ScalarFunctionModel(n.child).describe() << ")"; break;
    case Kind::f_product: os << "u*" << ScalarFunctionModel(n.child).describe(); break;
    case Kind::g_inverse_product: os << "u*inverse(" << ScalarFunctionModel(n.child).describe() << ")"; break;
  }
  return os.str();
}

double evaluate(const ScalarFunctionModel& model, double u, int order) { return model.evaluate(u, order); }

ScalarFunctionModel cutoff(const ScalarFunctionModel& model, double n) {
  if (!(n > 0.0)) throw ParameterError("cutoff level must be positive");
  auto node = std::make_shared<Node>();
  node->kind = ScalarFunctionModel::Kind::cutoff;
  node->child = std::make_shared<const Node>(model.node());
  node->level = n;
  return ScalarFunctionModel(std::shared_ptr<const Node>(node));
}

ScalarFunctionModel scaled(const ScalarFunctionModel& model, double factor) {
  auto node = std::make_shared<Node>();
  node->kind = ScalarFunctionModel::Kind::scaled;
  node->child = std::make_shared<const Node>(model.node());
  node->level = factor;
  return ScalarFunctionModel(std::shared_ptr<const Node>(node));
}

double invert_increasing(const ScalarFunctionModel& m, double w, double lower) {
  return invert_node(m.node(), w, lower);
}

double FgPair::f_inverse(double w) const { return invert_increasing(f, w, 0.0); }

double FgPair::g_inverse(double w) const { return invert_increasing(g, w, h_at_zero); }

FgPair fg_pair(const ScalarFunctionModel& h) {
  FgPair out;
  out.h = h;
  out.h_at_zero = h.evaluate(0.0, 0);
  if (!(out.h_at_zero >= 0.0)) throw PreconditionError("fg_pair: h(0) must be nonnegative");
  auto child = std::make_shared<const Node>(h.node());
  auto fn = std::make_shared<Node>();
  fn->kind = ScalarFunctionModel::Kind::f_product;
  fn->child = child;
  auto gn = std::make_shared<Node>();
  gn->kind = ScalarFunctionModel::Kind::g_inverse_product;
  gn->child = child;
  gn->h0 = out.h_at_zero;
  out.f = ScalarFunctionModel(std::shared_ptr<const Node>(fn));
  out.g = ScalarFunctionModel(std::shared_ptr<const Node>(gn));
  return out;
}

ScalarFunctionModel g_transform(const ScalarFunctionModel& h) {
  auto node = std::make_shared<Node>();
  node->kind = ScalarFunctionModel::Kind::g_transform;
  node->child = std::make_shared<const Node>(h.node());
  node->h0 = h.evaluate(0.0, 0);
  return ScalarFunctionModel(std::shared_ptr<const Node>(node));
}

double capital_G(const ScalarFunctionModel& g, double gamma, double x) {
  if (!(gamma > 0.5 && gamma < 1.0)) throw ParameterError("capital_G: gamma must lie in (1/2, 1)");
  if (!(x >= 1.0)) throw PreconditionError("capital_G: x must be at least 1");
  if (x == 1.0) return 0.0;
  const double k = 2.0 / (2.0 * gamma - 1.0);
  auto integrand = [&](double u) {
    const double gv = g.value(k * u);
    if (!(gv > 0.0)) {
      std::ostringstream os;
      os << "capital_G: g is not positive at " << k * u;
      throw PreconditionError(os.str());
    }
    return 1.0 / gv;
  };
  // endpoints are not GK nodes, check them explicitly
  integrand(1.0);
  integrand(x);
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 1.0, x, 15, 1e-12, &err);
}

ScalarFunctionModel propose_envelope_h(const ScalarFunctionModel& b, std::span<const double> grid, double constant) {
  if (grid.size() < 2) throw PreconditionError("propose_envelope_h: grid needs at least two points");
  std::vector<double> xs(grid.begin(), grid.end());
  if (xs.front() != 0.0) xs.insert(xs.begin(), 0.0);
  std::vector<double> ys(xs.size());
  double run = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0 && !(xs[i] > xs[i - 1])) throw PreconditionError("propose_envelope_h: grid must be increasing");
    const double bp = std::abs(b.value(xs[i]));
    const double bm = b.domain() == Domain::full_line ? std::abs(b.value(-xs[i])) : 0.0;
    run = std::max({run, bp, bm});
    ys[i] = run + constant;
  }
  return ScalarFunctionModel::tabulated(std::move(xs), std::move(ys), Domain::half_line);
}

}  // namespace shelab::models
