#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shelab/models/jet.hpp"

namespace shelab::models {

/// Closed-form families available for b, sigma, h and the derived g.
///
///   power            A x^beta + offset
///   affine-log-power A (a0 + a1 x) (log(shift + x))^beta + offset
///   log-iterated     A y log(y) log(log(y)) ... (depth factors) + offset, y = shift + x;
///                    zero below the point where the last factor turns negative
///   constant         c
///   tabulated        piecewise-linear through the knots; range-error outside
///   exponential      A exp(lambda x) + offset
///   trigonometric    A sin(omega x + phase) + offset
///
/// `x` is the folded argument: u itself (symmetry none), |u| (even) or |u|
/// with the sign of u restored on the output (odd).
enum class Family { power, affine_log_power, log_iterated, constant, tabulated, exponential, trigonometric };
enum class Symmetry { none, even, odd };
enum class Domain { half_line, full_line };

using ParamMap = std::map<std::string, double>;

std::string to_string(Family f);
std::string to_string(Symmetry s);
std::string to_string(Domain d);
Family family_from_string(const std::string& s);
Symmetry symmetry_from_string(const std::string& s);
Domain domain_from_string(const std::string& s);

/// Serializable description of a base family instance.
struct ModelSpec {
  Family family = Family::constant;
  ParamMap params;
  Domain domain = Domain::full_line;
  Symmetry symmetry = Symmetry::none;
  std::vector<double> knots_x;  // tabulated only
  std::vector<double> knots_y;
  std::optional<double> cutoff;  // clamp level n, applied on top of the family

  bool operator==(const ModelSpec&) const = default;
};

/// Immutable, cheaply copyable scalar function u -> f(u) with exact first
/// and second derivatives. Safe to share across threads.
class ScalarFunctionModel {
 public:
  enum class Kind { base, cutoff, scaled, g_transform, f_product, g_inverse_product };

  ScalarFunctionModel();  // the zero function
  explicit ScalarFunctionModel(const ModelSpec& spec);

  static ScalarFunctionModel power(double amplitude, double exponent, Symmetry sym = Symmetry::none,
                                   Domain dom = Domain::full_line, double offset = 0.0);
  static ScalarFunctionModel constant(double c, Domain dom = Domain::full_line);
  static ScalarFunctionModel affine_log_power(double amplitude, double a0, double a1, double shift,
                                              double exponent, Symmetry sym = Symmetry::none,
                                              Domain dom = Domain::half_line, double offset = 0.0);
  /// shift = 0 gives the canonical u log(max(u,1)) style extension (use
  /// Symmetry::odd for the odd extension to negative u).
  static ScalarFunctionModel log_iterated(double amplitude, int depth, double shift,
                                          Symmetry sym = Symmetry::none,
                                          Domain dom = Domain::full_line, double offset = 0.0);
  static ScalarFunctionModel exponential(double amplitude, double rate, double offset = 0.0,
                                         Domain dom = Domain::full_line);
  static ScalarFunctionModel trigonometric(double amplitude, double frequency, double phase,
                                           double offset = 0.0);
  static ScalarFunctionModel tabulated(std::vector<double> xs, std::vector<double> ys,
                                       Domain dom = Domain::full_line);

  /// Unchecked hot-path value. Outside the domain the result may be NaN;
  /// use `evaluate` where errors must surface.
  double value(double u) const;
  double operator()(double u) const { return value(u); }

  /// Value and derivatives. Throws DomainError/RangeError.
  Jet jet(double u) const;

  /// order 0, 1 or 2. Throws DomainError when u is outside the domain or the
  /// requested derivative is undefined at u; RangeError for tabulated models
  /// queried outside the table.
  double evaluate(double u, int order) const;

  /// log f(e^s), computed without forming e^s. Available for base families
  /// (even/none symmetry) and scaled models; throws DomainError otherwise.
  Jet log_value_at_exp(Jet s) const;

  Kind kind() const;
  Domain domain() const;
  /// The base spec, when kind() == base or cutoff-of-base.
  std::optional<ModelSpec> spec() const;
  /// Named parameter of the underlying base family, if any.
  std::optional<double> param(const std::string& name) const;
  std::string describe() const;

  // Used by the transform constructors below.
  struct Node;
  explicit ScalarFunctionModel(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

/// Free-function form of ScalarFunctionModel::evaluate.
double evaluate(const ScalarFunctionModel& model, double u, int order);

/// Clamped model: f(u) on [-n, n], f(-n) below, f(n) above.
ScalarFunctionModel cutoff(const ScalarFunctionModel& model, double n);

/// c * f(u).
ScalarFunctionModel scaled(const ScalarFunctionModel& model, double factor);

/// Solves m(x) = w for x >= lower by geometric bracketing followed by
/// bisection. m must be nondecreasing on [lower, inf). Throws InversionError
/// when no bracket exists.
double invert_increasing(const ScalarFunctionModel& m, double w, double lower = 0.0);

/// f(u) = u h(u) and g(u) = u h^{-1}(u) with their monotone inverses.
struct FgPair {
  ScalarFunctionModel h;
  ScalarFunctionModel f;
  ScalarFunctionModel g;
  double h_at_zero = 0.0;

  double f_inverse(double w) const;
  double g_inverse(double w) const;
};

FgPair fg_pair(const ScalarFunctionModel& h);

/// u -> e^{-u} (h(e^u) - h(0)). Large u is evaluated in the log domain.
ScalarFunctionModel g_transform(const ScalarFunctionModel& h);

/// Quadrature of int_1^x du / g(2u / (2 gamma - 1)).
double capital_G(const ScalarFunctionModel& g, double gamma, double x);

/// Proposed dominating function for b: the running maximum of |b| over
/// [0, x] on the given increasing grid, plus `constant`, as a tabulated
/// model on the half line.
ScalarFunctionModel propose_envelope_h(const ScalarFunctionModel& b, std::span<const double> grid,
                                       double constant);

}  // namespace shelab::models
