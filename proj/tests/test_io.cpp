#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>

#include <mmdual/io.hpp>
#include <mmdual/tcl.hpp>

#include "oracles/instances.hpp"

using namespace mmdual;

TEST(FormatDouble, ShortestRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, (k % 40) - 20);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.5), "1.5");
  EXPECT_TRUE(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
  EXPECT_THROW(parse_double("1.5x"), MalformedFile);
}

TEST(ProblemJson, RoundTrip) {
  std::mt19937_64 rng(2);
  MinMaxProblem p;
  p.S = 3;
  for (int i = 0; i < 3; ++i) p.agents.push_back(oracle::random_agent(rng, 3, i, true));
  const auto q = problem_from_json(json::parse(to_json(p).dump()));
  ASSERT_EQ(q.agents.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(q.agents[i].A, p.agents[i].A);
    EXPECT_EQ(q.agents[i].b, p.agents[i].b);
    EXPECT_EQ(q.agents[i].lower, p.agents[i].lower);
    EXPECT_EQ(q.agents[i].costs, p.agents[i].costs);
  }
  EXPECT_EQ(problem_hash(p), problem_hash(q));
}

TEST(ProblemJson, Schema) {
  const auto j = to_json(oracle::tiny_problem());
  EXPECT_EQ(j.at("S"), 2);
  EXPECT_EQ(j.at("agents")[0].at("A")[0], json({-1.0, -1.0}));
  EXPECT_EQ(j.at("agents")[1].at("costs")[0], json({{"kind", "affine"}, {"c", 2.0}}));
}

TEST(ProblemJson, Errors) {
  auto j = to_json(oracle::tiny_problem());
  j["agents"][0]["lower"] = json::array({0.0});
  EXPECT_THROW(problem_from_json(j), MalformedFile);
  j = to_json(oracle::tiny_problem());
  j["agents"][0]["costs"][0]["kind"] = "cubic";
  EXPECT_THROW(problem_from_json(j), MalformedFile);
  j = to_json(oracle::tiny_problem());
  j.erase("S");
  EXPECT_THROW(problem_from_json(j), MalformedFile);
}

TEST(ProblemHash, DistinguishesProblems) {
  EXPECT_NE(problem_hash(build_scenario(3, 8, 1).problem), problem_hash(build_scenario(3, 8, 2).problem));
  EXPECT_EQ(problem_hash(oracle::tiny_problem()).size(), 16u);
}

TEST(OracleJson, RoundTripAndHashCheck) {
  OracleResult r;
  r.P_star = 1.5;
  r.mu_star = (VectorXd(2) << 0.25, 0.75).finished();
  r.x_star = {VectorXd::Constant(2, 0.5)};
  const auto j = to_json(r, "abc");
  const auto back = oracle_from_json(j, "abc");
  EXPECT_EQ(back.P_star, 1.5);
  EXPECT_EQ(back.mu_star, r.mu_star);
  EXPECT_EQ(back.x_star[0], r.x_star[0]);
  EXPECT_THROW(oracle_from_json(j, "def"), MalformedFile);
}

TEST(TraceCsv, RoundTrip) {
  RunTrace t;
  t.num_agents = 2;
  t.S = 2;
  t.rows.push_back(TraceRow{1, 1.0 / 3.0, 0.3, 0.1, -1e-17, {0.1, 0.2}, {}});
  t.rows.push_back(TraceRow{10, 2.0, 1.5, 0.25, 0.0, {0.5, 1.5}, {}});
  std::stringstream ss;
  write_trace_csv(ss, t);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,sum_rho,P_t,cost_error,max_violation,rho_0,rho_1");
  const auto back = read_trace_csv(ss);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].sum_rho, 1.0 / 3.0);
  EXPECT_EQ(back.rows[0].max_violation, -1e-17);
  EXPECT_EQ(back.rows[1].rho, (std::vector<double>{0.5, 1.5}));
}

TEST(TraceCsv, NoOracleLeavesErrorEmpty) {
  RunTrace t;
  t.rows.push_back(TraceRow{1, 1.0, 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, {}, {}});
  std::stringstream ss;
  write_trace_csv(ss, t);
  EXPECT_NE(ss.str().find("1,1,1,,0"), std::string::npos);
  EXPECT_TRUE(std::isnan(read_trace_csv(ss).rows[0].cost_error));
}

TEST(TraceCsv, Malformed) {
  std::stringstream empty("");
  EXPECT_THROW(read_trace_csv(empty), MalformedFile);
  std::stringstream header("t,sum\n1,2\n");
  EXPECT_THROW(read_trace_csv(header), MalformedFile);
  std::stringstream short_row("t,sum_rho,P_t,cost_error,max_violation\n1,2,3\n");
  EXPECT_THROW(read_trace_csv(short_row), MalformedFile);
  std::stringstream bad("t,sum_rho,P_t,cost_error,max_violation\n1,2,x,0,0\n");
  EXPECT_THROW(read_trace_csv(bad), MalformedFile);
  std::stringstream no_rows("t,sum_rho,P_t,cost_error,max_violation\n");
  EXPECT_THROW(read_trace_csv(no_rows), MalformedFile);
}

TEST(ReportJson, Fields) {
  FinalReport r;
  r.x = {VectorXd::Zero(2)};
  r.rho = {1.0};
  r.profile = VectorXd::Ones(2);
  r.sum_rho = 1.0;
  r.P_t = 1.0;
  r.iterations = 3;
  r.oracle_value = 1.0;
  r.relative_error = 0.0;
  r.converged = true;
  r.wall_time_s = 12.0;
  const auto j = to_json(r);
  EXPECT_EQ(j.at("iterations"), 3);
  EXPECT_EQ(j.at("oracle_value"), 1.0);
  EXPECT_FALSE(j.contains("wall_time_s"));
  r.oracle_value.reset();
  EXPECT_TRUE(to_json(r).at("oracle_value").is_null());
}
