#pragma once

#include <span>
#include <vector>

namespace shelab::spde {

/// Uniform periodic grid on [-pi, pi): x_i = -pi + i dx.
struct Grid1D {
  int nx = 0;
  double dx = 0.0;

  Grid1D() = default;
  explicit Grid1D(int cells);

  double x(int i) const;
  std::vector<double> points() const;
  double length() const { return dx * nx; }
};

/// Field values at one time with cached norms.
class FieldState {
 public:
  FieldState() = default;
  FieldState(double t, std::vector<double> values, double dx);
  FieldState(double t, std::vector<double> values, const Grid1D& g) : FieldState(t, std::move(values), g.dx) {}

  static FieldState constant(const Grid1D& g, double c, double t = 0.0);

  double t() const { return t_; }
  double dx() const { return dx_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double l1() const { return l1_; }
  double linf() const { return linf_; }
  double min() const { return min_; }
  double integral() const { return integral_; }  // dx * sum(values), signed
  bool finite() const { return finite_; }

  /// Replaces the values (and time) and refreshes the cached norms.
  void assign(double t, std::span<const double> values);
  void set_time(double t) { t_ = t; }
  /// Mutable access for in-place stepping; call refresh() afterwards.
  std::vector<double>& mutable_values() { return values_; }
  void refresh();

 private:
  double t_ = 0.0;
  double dx_ = 0.0;
  std::vector<double> values_;
  double l1_ = 0.0;
  double linf_ = 0.0;
  double min_ = 0.0;
  double integral_ = 0.0;
  bool finite_ = true;
};

}  // namespace shelab::spde
