#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shelab::diagnostics {

enum class Direction { triple, third };
std::string to_string(Direction d);

struct RhoEvent {
  double t = 0.0;
  int level = 0;  // exponent m of the level 3^m reached
  Direction direction = Direction::triple;
  bool operator==(const RhoEvent&) const = default;
};

enum class Outcome { survived, exploded, min_hit, inconclusive };
std::string to_string(Outcome o);

struct Classification {
  Outcome outcome = Outcome::survived;
  double time = 0.0;  // t* for exploded/min_hit, horizon reached otherwise
  bool overflow = false;  // non-finite values rather than a cap crossing
  bool operator==(const Classification&) const = default;
};

struct StoppingParams {
  double M = std::numeric_limits<double>::infinity();
  double eps = 0.0;
  double u_cap = 1e6;
  std::vector<double> linf_levels;  // tau-infty-hits tracked for these n
  bool halt_on_min = false;
};

/// Follows the tripling recursion on a piecewise-linear L-infinity path.
class TriplingTracker {
 public:
  void observe(double t, double linf);
  const std::vector<RhoEvent>& events() const { return events_; }
  std::optional<int> level() const { return level_; }
  std::optional<double> entry_time() const { return entry_t_; }

 private:
  void walk(double t0, double y0, double t1, double y1);
  bool have_prev_ = false;
  double t_prev_ = 0.0;
  double y_prev_ = 0.0;
  std::optional<int> level_;
  std::optional<double> entry_t_;
  std::vector<RhoEvent> events_;
};

/// First-crossing history of one trajectory. Times are linear
/// interpolations between samples and are never overwritten.
struct StoppingRecord {
  std::optional<double> tau_inf_eps;
  std::optional<double> tau_l1_M;
  std::map<double, double> tau_infty_hits;
  std::vector<RhoEvent> rho_sequence;
  Classification classification;
  bool halted = false;

  // last sample seen
  bool has_last = false;
  double last_t = 0.0, last_l1 = 0.0, last_linf = 0.0, last_min = 0.0;
  TriplingTracker tracker;
};

/// Folds one sample (t, L1, Linf, min) into the record.
void update_stopping(StoppingRecord& rec, double t, double l1, double linf, double min, const StoppingParams& p);
/// Value form: returns the updated copy.
StoppingRecord updated(StoppingRecord rec, double t, double l1, double linf, double min, const StoppingParams& p);
/// Marks the record as ending at `horizon` (survived unless already classified).
void finish_stopping(StoppingRecord& rec, double horizon);
/// Marks a non-finite state at time t.
void mark_overflow(StoppingRecord& rec, double t);

/// Tripling events for a sampled L-infinity series; events that start
/// below level m0 are dropped. Throws PreconditionError on entries <= 0.
std::vector<RhoEvent> tripling_sequence(std::span<const double> times, std::span<const double> linf, int m0 = 0);

namespace detail {
/// Linear-interpolation crossing time of `level` on a segment, if any.
std::optional<double> crossing_time(double t0, double y0, double t1, double y1, double level, bool upward);
/// The earlier of an up and down crossing; ties resolve to a fall by a third.
std::optional<Direction> earlier_crossing(std::optional<double> t_up, std::optional<double> t_down);
}  // namespace detail

}  // namespace shelab::diagnostics
