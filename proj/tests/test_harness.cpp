#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "accel/harness.hpp"
#include "accel/trace.hpp"

using namespace accel;

namespace {

RunConfig config_from(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("single keys update the run description") {
  RunConfig cfg;
  apply_config_key(cfg, "method", "tgcr");
  apply_config_key(cfg, "window", "7");
  apply_config_key(cfg, "tol", "1e-9");
  apply_config_key(cfg, "max-fevals", "123");
  CHECK(cfg.method == "tgcr");
  CHECK(cfg.window == 7);
  CHECK(cfg.tol == 1e-9);
  CHECK(cfg.max_fevals == 123);

  const std::string unknown = message_of(
      [&] { apply_config_key(cfg, "bogus", "1"); });
  CHECK(unknown.find("unknown config key 'bogus'") != std::string::npos);
  const std::string bad_int = message_of(
      [&] { apply_config_key(cfg, "window", "2.5"); });
  CHECK(bad_int.find("bad integer") != std::string::npos);
  const std::string bad_num = message_of(
      [&] { apply_config_key(cfg, "tol", "tiny"); });
  CHECK(bad_num.find("bad number") != std::string::npos);
}

TEST_CASE("config files tolerate comments and whitespace") {
  const RunConfig cfg = config_from(
      "# a comment line\n"
      "\n"
      "problem = linear   # trailing comment\n"
      "  method=cg\n"
      "n\t=\t12\n"
      "kappa = 25\n");
  CHECK(cfg.problem == "linear");
  CHECK(cfg.method == "cg");
  CHECK(cfg.n == 12);
  CHECK(cfg.kappa == 25.0);

  const std::string no_eq = message_of([] { config_from("problem linear\n"); });
  CHECK(no_eq.find("config line 1") != std::string::npos);
  const std::string bad_key =
      message_of([] { config_from("problem=linear\nwat=1\n"); });
  CHECK(bad_key.find("config line 2") != std::string::npos);
  CHECK(bad_key.find("unknown config key 'wat'") != std::string::npos);
}

TEST_CASE("linear solves converge and report success") {
  RunConfig cfg = config_from("problem=linear\nmethod=tgcr\nn=12\ntol=1e-10\n");
  const RunOutcome out = run_config(cfg);
  CHECK(out.exit_code == 0);
  CHECK(out.trace.converged);
  CHECK(out.error.empty());
  // Evaluation counts never decrease and respect the budget.
  long prev = -1;
  for (const auto& rec : out.trace.records) {
    CHECK(rec.fevals >= prev);
    prev = rec.fevals;
  }
  CHECK(out.trace.final_fevals() <= cfg.max_fevals);
}

TEST_CASE("an exhausted budget reports the distinct exit code") {
  RunConfig cfg = config_from(
      "problem=linear\nmethod=cheb\nn=30\nkappa=100\n"
      "tol=1e-14\nmax-fevals=5\n");
  const RunOutcome out = run_config(cfg);
  CHECK(out.exit_code == 2);
  CHECK_FALSE(out.trace.converged);
  CHECK(out.trace.final_fevals() <= 5);
}

TEST_CASE("misconfigurations surface as errors that name the cause") {
  const RunOutcome wrong = run_config(
      config_from("problem=atan\nmethod=aa\n"));
  CHECK(wrong.exit_code == 1);
  CHECK(wrong.error.find("'aa'") != std::string::npos);
  CHECK(wrong.error.find("atan") != std::string::npos);

  const RunOutcome dense = run_config(
      config_from("problem=bratu\nmethod=broyden1\nnx=100\n"));
  CHECK(dense.exit_code == 1);
  CHECK(dense.error.find("dense Jacobian") != std::string::npos);

  const RunOutcome cheb = run_config(
      config_from("problem=bratu\nmethod=cheb\n"));
  CHECK(cheb.exit_code == 1);
  CHECK(cheb.error.find("linear") != std::string::npos);

  const RunOutcome method = run_config(config_from("method=sorcery\n"));
  CHECK(method.exit_code == 1);
  CHECK(method.error.find("unknown method 'sorcery'") != std::string::npos);
}

TEST_CASE("series runs always exit cleanly and carry the error trace") {
  const RunOutcome raw = run_config(
      config_from("problem=atan\nmethod=gd\nn=30\n"));
  CHECK(raw.exit_code == 0);
  CHECK(raw.trace.records.size() == 30);
  // The raw alternating series has barely two digits after 30 terms.
  CHECK(raw.trace.final_resnorm() >= 5e-3);
  CHECK(raw.trace.final_resnorm() <= 2e-2);

  const RunOutcome extr = run_config(
      config_from("problem=atan\nmethod=rre\nn=30\nwindow=4\n"));
  CHECK(extr.exit_code == 0);
  CHECK(extr.trace.final_resnorm() < 1e-10);

  const RunOutcome det = run_config(
      config_from("problem=atan\nmethod=mpe\nn=30\nwindow=3\n"));
  CHECK(det.exit_code == 0);
  CHECK(det.trace.final_resnorm() < 1e-6);
}

TEST_CASE("identical configurations reproduce byte-identical traces") {
  const RunConfig cfg = config_from(
      "problem=bratu\nmethod=aa\nnx=20\ntol=1e-10\nseed=7\nmax-fevals=300\n");
  const RunOutcome a = run_config(cfg);
  const RunOutcome b = run_config(cfg);
  std::ostringstream sa, sb;
  write_trace_csv(sa, a.trace);
  write_trace_csv(sb, b.trace);
  CHECK(a.exit_code == 0);
  CHECK(sa.str() == sb.str());

  // Round trip through the serialized form preserves every field.
  std::istringstream is(sa.str());
  const ConvergenceTrace back = parse_trace_csv(is);
  REQUIRE(back.records.size() == a.trace.records.size());
  for (size_t i = 0; i < back.records.size(); ++i) {
    CHECK(back.records[i].iter == a.trace.records[i].iter);
    CHECK(back.records[i].fevals == a.trace.records[i].fevals);
    CHECK(back.records[i].resnorm == a.trace.records[i].resnorm);
    CHECK(back.records[i].event == a.trace.records[i].event);
  }
}
