#include "accel/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace accel {

namespace {

// Shortest round-trip formatting, locale independent.
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that reads back exactly.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace,
                     bool with_timing) {
  os << "iter,fevals,resnorm,time_s,event\n";
  for (const auto& r : trace.records) {
    os << r.iter << ',' << r.fevals << ',' << format_double(r.resnorm) << ','
       << format_double(with_timing ? r.time_s : 0.0) << ',' << r.event
       << '\n';
  }
}

ConvergenceTrace parse_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "iter,fevals,resnorm,time_s,event")
    throw std::runtime_error("trace csv: bad or missing header");
  ConvergenceTrace trace;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    TraceRecord rec;
    std::string field;
    auto next = [&](const char* what) {
      if (!std::getline(row, field, ','))
        throw std::runtime_error(std::string("trace csv: missing ") + what);
      return field;
    };
    rec.iter = std::stol(next("iter"));
    rec.fevals = std::stol(next("fevals"));
    rec.resnorm = std::stod(next("resnorm"));
    rec.time_s = std::stod(next("time_s"));
    std::getline(row, rec.event);  // event may be empty
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace accel
