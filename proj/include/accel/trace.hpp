#ifndef ACCEL_TRACE_HPP
#define ACCEL_TRACE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace accel {

/// Per-iteration convergence record. `event` marks restarts, window
/// flushes, mode switches and breakdowns.
struct TraceRecord {
  long iter = 0;
  long fevals = 0;
  double resnorm = 0.0;
  double time_s = 0.0;
  std::string event;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  bool diverged = false;

  void add(long iter, long fevals, double resnorm, double time_s = 0.0,
           std::string event = {}) {
    records.push_back({iter, fevals, resnorm, time_s, std::move(event)});
  }

  double final_resnorm() const {
    return records.empty() ? 0.0 : records.back().resnorm;
  }
  long final_fevals() const {
    return records.empty() ? 0 : records.back().fevals;
  }
};

/// CSV schema: header `iter,fevals,resnorm,time_s,event`, one row per record.
/// When `with_timing` is false the time column is written as 0, which keeps
/// runs byte-reproducible.
void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace,
                     bool with_timing = false);

/// Inverse of write_trace_csv; throws std::runtime_error on malformed input.
ConvergenceTrace parse_trace_csv(std::istream& is);

}  // namespace accel

#endif  // ACCEL_TRACE_HPP
