#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "bfrb/cli_app.hpp"
#include "bfrb/config.hpp"
#include "bfrb/trace_io.hpp"
#include "doctest.h"

using namespace bfrb;

namespace {

std::string write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto f = ConfigFile::parse_string(
      "# comment\n"
      "[problem]\n"
      "source = skew_box_2\n"
      "[solver]\n"
      "method = frb\n"
      "mu = 0.4\n"
      "record_trace = true\n"
      "weights = [1, 2.5]\n");
  CHECK(f.get_string("problem", "source") == "skew_box_2");
  CHECK(f.get_double("solver", "mu") == 0.4);
  CHECK(f.get_bool_or("solver", "record_trace", false));
  const Vec w = f.get_vector("solver", "weights");
  CHECK(w.size() == 2);
  CHECK(w[1] == 2.5);
  CHECK_THROWS_AS(f.get_double("solver", "missing"), Error);
  CHECK_THROWS_AS(ConfigFile::parse_string("key_without_value\n"), Error);
}

TEST_CASE("structured value parsing") {
  const Mat m = parse_matrix("[[0, 1], [-1, 0]]", "m");
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == -1.0);
  const auto s = parse_struct("{type=\"box\", lower=[0, 0], upper=[1, 1]}", "s");
  CHECK(strip_quotes(s.at("type")) == "box");
  CHECK(parse_vector(s.at("lower"), "s.lower").size() == 2);
  CHECK_THROWS_AS(parse_matrix("[[1, 2], [3]]", "ragged"), Error);
  CHECK_THROWS_AS(parse_vector("1, 2", "no-brackets"), Error);

  const DSchedule g = parse_d_schedule("geometric(0.5, 0.1)");
  CHECK(g.kind == DSchedule::Kind::geometric);
  CHECK(g.at(1) == doctest::Approx(0.05));
  CHECK(parse_d_schedule("zero").sum() == 0.0);
  CHECK(parse_d_schedule("[0.1, 0.2]").sum() == doctest::Approx(0.3));
  CHECK_THROWS_AS(parse_d_schedule("geometric(2, 0.1)"), Error);
}

TEST_CASE("run subcommand end to end") {
  const std::string cfg = write_file("/tmp/bfrb_run.cfg",
                                     "[problem]\n"
                                     "source = skew_box_2\n"
                                     "[solver]\n"
                                     "method = frb\n"
                                     "mu = 0.4\n"
                                     "delta = 0.1\n"
                                     "max_iters = 100000\n"
                                     "tol = 1e-10\n"
                                     "[output]\n"
                                     "trace = /tmp/bfrb_run_trace.csv\n"
                                     "summary = /tmp/bfrb_run_summary.json\n");
  CHECK(cmd_run(cfg) == 0);

  const TraceFile tf = read_trace_csv("/tmp/bfrb_run_trace.csv");
  CHECK(tf.meta.get_or("problem", "") == "skew_box_2");
  CHECK(tf.run.method == Method::frb_constant);
  CHECK(tf.run.iterates.size() == tf.run.records.size());
  CHECK(tf.run.a_evaluations == static_cast<std::size_t>(tf.run.iterations) + 1);

  const std::string summary = slurp("/tmp/bfrb_run_summary.json");
  CHECK(summary.find("\"status\": \"CONVERGED\"") != std::string::npos);
  CHECK(summary.find("final_residual") != std::string::npos);
}

TEST_CASE("run exit codes") {
  SUBCASE("iteration budget exhausted maps to 2") {
    const std::string cfg = write_file("/tmp/bfrb_budget.cfg",
                                       "[problem]\n"
                                       "source = skew_box_2\n"
                                       "[solver]\n"
                                       "method = frb\n"
                                       "mu = 0.4\n"
                                       "max_iters = 1\n"
                                       "tol = 1e-12\n");
    CHECK(cmd_run(cfg) == 2);
  }
  SUBCASE("empty admissible interval maps to 1") {
    const std::string cfg = write_file("/tmp/bfrb_empty.cfg",
                                       "[problem]\n"
                                       "source = skew_box_2\n"
                                       "[solver]\n"
                                       "method = frb\n"
                                       "mu = 0.2\n"
                                       "delta = 0.45\n");
    CHECK(cmd_run(cfg) == 1);
  }
  SUBCASE("config errors map to 1") {
    CHECK(cmd_run("/tmp/no_such_config.cfg") == 1);
    const std::string bad = write_file("/tmp/bfrb_bad_method.cfg",
                                       "[problem]\n"
                                       "source = skew_box_2\n"
                                       "[solver]\n"
                                       "method = warp\n");
    CHECK(cmd_run(bad) == 1);
    const std::string nosrc = write_file("/tmp/bfrb_nosrc.cfg", "[solver]\nmethod = frb\n");
    CHECK(cmd_run(nosrc) == 1);
    const std::string nomu = write_file("/tmp/bfrb_nomu.cfg",
                                        "[problem]\nsource = skew_box_2\n"
                                        "[solver]\nmethod = frb\n");
    CHECK(cmd_run(nomu) == 1);
  }
  SUBCASE("divergence guard maps to 3") {
    // a problem file with a deliberately wrong declared constant
    write_file("/tmp/bfrb_doomed.prob",
               "label = doomed\n"
               "A = {type=\"linear\", matrix=[[2, 0], [0, 2]], offset=[0, 0], lipschitz=0.001, "
               "tau=2}\n"
               "B = {type=\"scaled_identity\", c=1e-6, shift=[0, 0]}\n"
               "v0 = [1, 1]\n"
               "v1 = [1, 1]\n");
    const std::string cfg = write_file("/tmp/bfrb_doomed.cfg",
                                       "[problem]\n"
                                       "source = /tmp/bfrb_doomed.prob\n"
                                       "[solver]\n"
                                       "method = frb\n"
                                       "mu = 30\n"
                                       "delta = 0.1\n"
                                       "max_iters = 10000\n");
    CHECK(cmd_run(cfg) == 3);
  }
}

TEST_CASE("trace output is byte-identical across reruns") {
  const std::string cfg = write_file("/tmp/bfrb_det.cfg",
                                     "[problem]\n"
                                     "source = cournot_m2_k1\n"
                                     "[solver]\n"
                                     "method = frb-adaptive\n"
                                     "alpha = 0.39\n"
                                     "mu0 = 1\n"
                                     "mu1 = 1\n"
                                     "d_schedule = geometric(0.5, 0.1)\n"
                                     "max_iters = 5000\n"
                                     "tol = 1e-9\n"
                                     "[output]\n"
                                     "trace = /tmp/bfrb_det_a.csv\n");
  CHECK(cmd_run(cfg) == 0);
  const std::string first = slurp("/tmp/bfrb_det_a.csv");
  CHECK(cmd_run(cfg) == 0);
  CHECK(first == slurp("/tmp/bfrb_det_a.csv"));
  CHECK(!first.empty());
  CHECK(first.find("\r") == std::string::npos);  // LF endings only
}

TEST_CASE("diagnose consumes a run trace") {
  const std::string cfg = write_file("/tmp/bfrb_diag.cfg",
                                     "[problem]\n"
                                     "source = skew_box_2\n"
                                     "[solver]\n"
                                     "method = frb\n"
                                     "mu = 0.4\n"
                                     "max_iters = 5000\n"
                                     "tol = 1e-11\n"
                                     "[output]\n"
                                     "trace = /tmp/bfrb_diag_trace.csv\n");
  REQUIRE(cmd_run(cfg) == 0);
  write_file("/tmp/bfrb_diag_sol.txt", "[0, 0]\n");
  CHECK(cmd_diagnose("/tmp/bfrb_diag_trace.csv", "/tmp/bfrb_diag_sol.txt",
                     "/tmp/bfrb_diag_report.json") == 0);
  const std::string rep = slurp("/tmp/bfrb_diag_report.json");
  CHECK(rep.find("\"lyapunov\": \"PASS\"") != std::string::npos);
  CHECK(rep.find("\"rate\": \"PASS\"") != std::string::npos);
  CHECK(rep.find("\"eval_count\": \"PASS\"") != std::string::npos);
  CHECK(cmd_diagnose("/tmp/no_such_trace.csv", "/tmp/bfrb_diag_sol.txt") == 1);
}

TEST_CASE("compare runs several methods on one instance") {
  const std::string cfg = write_file("/tmp/bfrb_cmp.cfg",
                                     "[problem]\n"
                                     "source = skew_box_2\n"
                                     "[solver]\n"
                                     "mu = 0.4\n"
                                     "alpha = 0.39\n"
                                     "max_iters = 100000\n"
                                     "tol = 1e-10\n"
                                     "[compare]\n"
                                     "methods = frb, frb-adaptive, tseng\n"
                                     "[output]\n"
                                     "table = /tmp/bfrb_cmp.csv\n");
  CHECK(cmd_compare(cfg) == 0);
  const std::string table = slurp("/tmp/bfrb_cmp.csv");
  CHECK(table.find("method,iterations,a_evals") == 0);
  CHECK(table.find("frb,") != std::string::npos);
  CHECK(table.find("tseng,") != std::string::npos);

  const std::string single = write_file("/tmp/bfrb_cmp1.cfg",
                                        "[problem]\nsource = skew_box_2\n"
                                        "[solver]\nmu = 0.4\n"
                                        "[compare]\nmethods = frb\n");
  CHECK(cmd_compare(single) == 1);  // needs at least two methods

  // on a zero forward operator the one-evaluation method collapses onto the
  // proximal point method, so both appear with the same iteration count
  const std::string ppa = write_file("/tmp/bfrb_cmp_ppa.cfg",
                                     "[problem]\nsource = halving_1\n"
                                     "[solver]\nmu = 1.0\ntol = 1e-10\n"
                                     "[compare]\nmethods = frb, ppa\n"
                                     "[output]\ntable = /tmp/bfrb_cmp_ppa.csv\n");
  CHECK(cmd_compare(ppa) == 0);
  std::istringstream rows(slurp("/tmp/bfrb_cmp_ppa.csv"));
  std::string header, frb_row, ppa_row;
  std::getline(rows, header);
  std::getline(rows, frb_row);
  std::getline(rows, ppa_row);
  const auto iters_of = [](const std::string& row) {
    const auto a = row.find(',');
    return row.substr(a + 1, row.find(',', a + 1) - a - 1);
  };
  CHECK(iters_of(frb_row) == iters_of(ppa_row));
}

TEST_CASE("residual stopping through the config") {
  const std::string cfg = write_file("/tmp/bfrb_stop_res.cfg",
                                     "[problem]\n"
                                     "source = skew_box_2\n"
                                     "[solver]\n"
                                     "method = frb\n"
                                     "mu = 0.4\n"
                                     "stop = residual\n"
                                     "tol = 1e-7\n"
                                     "max_iters = 100000\n"
                                     "[output]\n"
                                     "summary = /tmp/bfrb_stop_res.json\n");
  CHECK(cmd_run(cfg) == 0);
  const std::string summary = slurp("/tmp/bfrb_stop_res.json");
  CHECK(summary.find("CONVERGED") != std::string::npos);
}

TEST_CASE("problems export round trips through run") {
  CHECK(cmd_problems_export("cournot_m2_k1", "/tmp/bfrb_export.prob") == 0);
  const std::string cfg = write_file("/tmp/bfrb_export.cfg",
                                     "[problem]\n"
                                     "source = /tmp/bfrb_export.prob\n"
                                     "[solver]\n"
                                     "method = frb\n"
                                     "mu = 0.26\n"
                                     "max_iters = 100000\n"
                                     "tol = 1e-10\n");
  CHECK(cmd_run(cfg) == 0);
  CHECK(cmd_problems_export("no_such_instance", "") == 1);
}

TEST_CASE("geometry configuration") {
  // entropy over the simplex game runs end to end
  const std::string cfg = write_file("/tmp/bfrb_entropy.cfg",
                                     "[problem]\n"
                                     "source = rps_simplex\n"
                                     "[geometry]\n"
                                     "geometry = entropy\n"
                                     "entropy_gamma = 1.0\n"
                                     "[solver]\n"
                                     "method = projected\n"
                                     "mu = 0.2\n"
                                     "max_iters = 200000\n"
                                     "tol = 1e-10\n");
  CHECK(cmd_run(cfg) == 0);

  // entropy without the declared modulus is a config error
  const std::string bad = write_file("/tmp/bfrb_entropy_bad.cfg",
                                     "[problem]\n"
                                     "source = rps_simplex\n"
                                     "[geometry]\n"
                                     "geometry = entropy\n"
                                     "[solver]\n"
                                     "method = projected\n"
                                     "mu = 0.2\n");
  CHECK(cmd_run(bad) == 1);

  // scaled-identity B has no entropy resolvent: rejected up front
  const std::string incompatible = write_file("/tmp/bfrb_entropy_incomp.cfg",
                                              "[problem]\n"
                                              "source = halving_1\n"
                                              "[geometry]\n"
                                              "geometry = entropy\n"
                                              "entropy_gamma = 1.0\n"
                                              "[solver]\n"
                                              "method = ppa\n"
                                              "mu = 1.0\n");
  CHECK(cmd_run(incompatible) == 1);
}
