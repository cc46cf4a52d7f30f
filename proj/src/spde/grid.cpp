#include "shelab/spde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shelab/errors.hpp"

namespace shelab::spde {

Grid1D::Grid1D(int cells) : nx(cells), dx(2.0 * std::numbers::pi / cells) {
  if (cells < 8) throw ParameterError("grid needs at least 8 cells");
}

double Grid1D::x(int i) const { return -std::numbers::pi + i * dx; }

std::vector<double> Grid1D::points() const {
  std::vector<double> p(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) p[static_cast<std::size_t>(i)] = x(i);
  return p;
}

FieldState::FieldState(double t, std::vector<double> values, double dx) : t_(t), dx_(dx), values_(std::move(values)) {
  refresh();
}

FieldState FieldState::constant(const Grid1D& g, double c, double t) {
  return FieldState(t, std::vector<double>(static_cast<std::size_t>(g.nx), c), g.dx);
}

void FieldState::assign(double t, std::span<const double> values) {
  t_ = t;
  values_.assign(values.begin(), values.end());
  refresh();
}

void FieldState::refresh() {
  double s = 0.0, sa = 0.0, mx = 0.0;
  double mn = values_.empty() ? 0.0 : values_.front();
  bool fin = true;
  for (double v : values_) {
    fin = fin && std::isfinite(v);
    s += v;
    sa += std::abs(v);
    mx = std::max(mx, std::abs(v));
    mn = std::min(mn, v);
  }
  integral_ = dx_ * s;
  l1_ = dx_ * sa;
  linf_ = fin ? mx : std::numeric_limits<double>::infinity();
  min_ = mn;
  finite_ = fin;
}

}  // namespace shelab::spde
