#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lcd/runner.hpp"
#include "lcd/suites.hpp"

using namespace lcd;

TEST_CASE("config reader rejects unknown keys with their path") {
  const json j = {{"a", 1}, {"sub", {{"b", 2.5}, {"typo", true}}}};
  ConfigReader r(j);
  CHECK(r.integer("a", 0) == 1);
  ConfigReader& sub = r.object("sub");
  CHECK(sub.number("b") == 2.5);
  try {
    r.finish();
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path == "sub.typo");
  }
  const json k = {{"N", "inf"}, {"x", "str"}};
  ConfigReader q(k);
  CHECK(std::isinf(q.extended("N", 0)));
  CHECK_THROWS_AS(q.number("x"), ConfigError);
  CHECK_THROWS_AS(q.number("missing"), ConfigError);
}

TEST_CASE("numbers round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(kInf) == "inf");
  CHECK(format_number(-kInf) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(format_number(x)) == x);
  CHECK(sanitize(json{{"a", kInf}, {"b", {1.5, -kInf}}}) == json{{"a", "inf"}, {"b", {1.5, "-inf"}}});
  Curve c{"c", {"t", "y"}, {{0.0, 0.5}, {1.0, kInf}}};
  CHECK(to_csv(c) == "t,y\n0,0.5\n1,inf\n");
}

TEST_CASE("ricci operation end to end") {
  const json cfg = {{"operation", "ricci"},
                    {"model", {{"name", "hyperbolic_horocycle"}}},
                    {"params", {{"N", 2}, {"samples", 20}}},
                    {"seed", 7}};
  const ExperimentReport a = run(cfg);
  CHECK(a.verdict == Verdict::Pass);
  CHECK(a.records.size() == 20);
  CHECK(a.summary["max_oracle_error"].get<double>() <= 1e-3);

  // Same seed, same bytes (outside the timing block).
  json ja = to_json(a), jb = to_json(run(cfg));
  ja.erase("timing");
  jb.erase("timing");
  CHECK(ja.dump() == jb.dump());
  json jc = to_json(run(cfg, 8));
  jc.erase("timing");
  CHECK(ja.dump() != jc.dump());

  const auto dir = std::filesystem::temp_directory_path() / "lcd_report_test";
  std::filesystem::remove_all(dir);
  const auto path = write_report(a, dir);
  std::ifstream in(path);
  const json back = json::parse(in);
  CHECK(back["schema_version"] == 1);
  CHECK(back["verdict"] == "pass");
  CHECK(std::filesystem::exists(dir / "samples.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("configs are validated before anything runs") {
  auto path_of = [](const json& cfg) {
    try {
      run(cfg);
    } catch (const ConfigError& e) {
      return e.path;
    }
    return std::string("<none>");
  };
  CHECK(path_of({{"operation", "ricci"}, {"model", {{"name", "flat_euclidean"}}},
                 {"params", {{"samples", 5}, {"smaples", 5}}}}) == "params.smaples");
  CHECK(path_of({{"operation", "ricci"}, {"model", {{"name", "flat_euclidean"}}}, {"extra", 1}}) ==
        "extra");
  CHECK(path_of({{"operation", "nope"}}) == "operation");
  CHECK(path_of({{"operation", "verify"}, {"params", {{"suite", "bogus"}}}}) == "params.suite");
  CHECK(path_of({{"operation", "ricci"}, {"model", {{"name", "flat_euclidean"}}},
                 {"params", {{"N", 1.5}}}}) == "params.N");
}

TEST_CASE("custom models from expressions") {
  const json cfg = {
      {"operation", "ricci"},
      {"model",
       {{"dim", 2},
        {"box", 1.0},
        {"classical", {{"metric", {"1", "0", "0", "1"}}, {"potential", "1 + 0.1*x1^2"}, {"form", {"0", "0"}}}}}},
      {"params", {{"samples", 5}}}};
  const ExperimentReport r = run(cfg);
  CHECK(r.summary["reference"] == "none");
  // -Laplacian U = -0.2 bounds Ric from below along directions orthogonal to grad U.
  CHECK(r.summary["ric_weighted"]["min"].get<double>() >= -0.2 - 1e-3);
}

TEST_CASE("suites") {
  CHECK(suite_members("full").size() == 10);
  CHECK(suite_members("smoke") == std::vector<int>{1, 5, 7});
  CHECK_THROWS_AS(suite_members("bogus"), DomainError);
  const auto r = run_criterion(1, 1, true);
  CHECK(r.pass);
  CHECK(r.id == 1);
}
