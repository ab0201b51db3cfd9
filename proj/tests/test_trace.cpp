#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "accel/trace.hpp"

using namespace accel;

TEST_CASE("csv header is bit-exact") {
  ConvergenceTrace trace;
  std::ostringstream os;
  write_trace_csv(os, trace);
  CHECK(os.str() == "iter,fevals,resnorm,time_s,event\n");
}

TEST_CASE("write then parse round-trips") {
  ConvergenceTrace trace;
  trace.add(0, 1, 1.25);
  trace.add(1, 3, 0.03125, 0.0, "restart");
  trace.add(2, 4, 1.0 / 3.0);
  trace.add(3, 6, 1e-300, 0.0, "flush");

  std::ostringstream os;
  write_trace_csv(os, trace);
  std::istringstream is(os.str());
  const ConvergenceTrace back = parse_trace_csv(is);

  REQUIRE(back.records.size() == trace.records.size());
  for (size_t i = 0; i < trace.records.size(); ++i) {
    CHECK(back.records[i].iter == trace.records[i].iter);
    CHECK(back.records[i].fevals == trace.records[i].fevals);
    CHECK(back.records[i].resnorm == trace.records[i].resnorm);
    CHECK(back.records[i].time_s == 0.0);
    CHECK(back.records[i].event == trace.records[i].event);
  }
}

TEST_CASE("timing column is zeroed unless requested") {
  ConvergenceTrace trace;
  trace.add(0, 1, 2.0, 0.75);
  std::ostringstream silent, timed;
  write_trace_csv(silent, trace, false);
  write_trace_csv(timed, trace, true);
  CHECK(silent.str().find("0.75") == std::string::npos);
  CHECK(timed.str().find("0.75") != std::string::npos);
}

TEST_CASE("identical traces serialize to identical bytes") {
  ConvergenceTrace trace;
  trace.add(0, 1, 0.1234567890123456789);
  trace.add(1, 2, 3.0e-11, 0.0, "restart");
  std::ostringstream a, b;
  write_trace_csv(a, trace);
  write_trace_csv(b, trace);
  CHECK(a.str() == b.str());
}

TEST_CASE("parse rejects malformed input") {
  std::istringstream bad_header("iteration,fevals\n");
  CHECK_THROWS_AS(parse_trace_csv(bad_header), std::runtime_error);

  std::istringstream short_row("iter,fevals,resnorm,time_s,event\n3,4\n");
  CHECK_THROWS_AS(parse_trace_csv(short_row), std::runtime_error);
}

TEST_CASE("trace accessors report the final record") {
  ConvergenceTrace trace;
  CHECK(trace.final_resnorm() == 0.0);
  CHECK(trace.final_fevals() == 0);
  trace.add(0, 2, 5.0);
  trace.add(1, 4, 0.5);
  CHECK(trace.final_resnorm() == 0.5);
  CHECK(trace.final_fevals() == 4);
}
