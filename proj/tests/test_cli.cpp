#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <string>

#include "riccibound/report.hpp"
#include "riccibound/scenario.hpp"

using namespace rb;

namespace {

const char* kGoodConfig =
    "# comment line\n"
    "[scenario]\n"
    "name = flat_check\n"
    "seed = 99\n"
    "tolerance = 1e-7\n"
    "pairs = 5000\n"
    "suites = radial curvature\n"
    "\n"
    "[ladders]\n"
    "r = 1.0 0.25 0.5\n"
    "\n"
    "[model]\n"
    "name = euclidean\n"
    "dim = 2\n"
    "\n"
    "[model]\n"
    "name = hyperbolic\n"
    "lambda = 0.5\n";

Scenario parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

}  // namespace

TEST_CASE("scenario parser reads all sections and applies overrides") {
  Scenario sc = parse_text(kGoodConfig);
  CHECK(sc.name == "flat_check");
  CHECK(sc.seed == 99);
  CHECK(sc.tolerance == doctest::Approx(1e-7));
  CHECK(sc.mc_pairs == 5000);
  REQUIRE(sc.suites.size() == 2);
  CHECK(sc.suites[0] == "radial");
  CHECK(sc.suites[1] == "curvature");
  REQUIRE(sc.r_ladder.size() == 3);
  // The ladder is sorted ascending regardless of input order.
  CHECK(sc.r_ladder[0] == doctest::Approx(0.25));
  CHECK(sc.r_ladder[2] == doctest::Approx(1.0));
  REQUIRE(sc.models.size() == 2);
  CHECK(sc.models[0].dim == 2);
  CHECK(sc.models[1].lambda == doctest::Approx(0.5));
  CHECK_NOTHROW(sc.validate());
}

TEST_CASE("scenario parser reports the offending line and field") {
  SUBCASE("malformed key-value line") {
    std::string msg;
    try {
      parse_text("[scenario]\nname flat\n");
    } catch (const ConfigParseError& e) {
      msg = e.what();
    }
    CHECK(msg.find("line 2") != std::string::npos);
  }
  SUBCASE("non-numeric value names the field") {
    std::string msg;
    try {
      parse_text("[scenario]\nseed = banana\nsuites = radial\n");
    } catch (const ConfigParseError& e) {
      msg = e.what();
    }
    CHECK(msg.find("seed") != std::string::npos);
  }
  SUBCASE("unknown section") {
    CHECK_THROWS_AS(parse_text("[wat]\nx = 1\n"), ConfigParseError);
  }
  SUBCASE("unknown field in a known section") {
    CHECK_THROWS_AS(
        parse_text("[scenario]\nsuites = radial\nbogus = 1\n"),
        ConfigParseError);
  }
  SUBCASE("unknown suite name") {
    CHECK_THROWS_AS(parse_text("[scenario]\nsuites = nope\n"),
                    ConfigParseError);
  }
  SUBCASE("model section without a name") {
    CHECK_THROWS_AS(
        parse_text("[scenario]\nsuites = radial\n[model]\ndim = 3\n"),
        ConfigParseError);
  }
  SUBCASE("unknown model name") {
    CHECK_THROWS_AS(
        parse_text("[scenario]\nsuites = radial\n[model]\nname = torus\n"),
        ModelUnknown);
  }
  SUBCASE("scenario with no model is rejected") {
    CHECK_THROWS_AS(parse_text("[scenario]\nsuites = radial\n"),
                    ConfigParseError);
  }
}

TEST_CASE("catalog lookup by name") {
  CHECK(model_by_name("euclidean").kind == ModelKind::Euclidean);
  CHECK(model_by_name("hyperbolic").kind == ModelKind::Hyperbolic);
  CHECK_THROWS_AS(model_by_name("no_such_model"), ModelUnknown);
}

TEST_CASE("flat radial scenario passes every certificate") {
  Scenario sc;
  sc.name = "flat_radial";
  sc.models = {model_by_name("euclidean")};
  sc.suites = {"radial"};
  sc.r_ladder = {0.1, 0.5, 1.0};
  Report rep = run_scenario(sc);
  CHECK(rep.certificates.size() >= 10);
  CHECK(rep.all_pass());
  CHECK(rep.fail_count() == 0);
  CHECK(rep.worst_margin() >= -1e-12);
  REQUIRE(rep.suite_of.size() == rep.certificates.size());
  for (const auto& s : rep.suite_of) CHECK(s == "radial");
}

TEST_CASE("understated curvature budget is caught as failures") {
  // Hyperbolic space has Ric = -(n-1) g; claiming lambda = 1 understates
  // the true lower-bound budget, so comparison certificates must fail.
  Scenario sc;
  sc.name = "negative_control";
  ModelSpec m = model_by_name("hyperbolic");
  m.lambda = 1.0;
  sc.models = {m};
  sc.suites = {"radial"};
  sc.r_ladder = {0.5, 1.0};
  Report rep = run_scenario(sc);
  CHECK_FALSE(rep.all_pass());
  CHECK(rep.fail_count() > 0);
  CHECK(rep.worst_margin() < -1e-3);
}

TEST_CASE("report JSON roundtrip preserves every row") {
  Scenario sc;
  sc.name = "roundtrip";
  sc.models = {model_by_name("sphere")};
  sc.suites = {"curvature"};
  Report rep = run_scenario(sc);
  rep.wall_time_seconds = 1.25;

  std::ostringstream out;
  write_report_json(rep, out);
  std::istringstream in(out.str());
  Report back = read_report_json(in);

  CHECK(back.schema == rep.schema);
  CHECK(back.scenario.name == "roundtrip");
  REQUIRE(back.certificates.size() == rep.certificates.size());
  for (size_t i = 0; i < rep.certificates.size(); ++i) {
    const auto& a = rep.certificates[i];
    const auto& b = back.certificates[i];
    CHECK(a.kind == b.kind);
    CHECK(a.pass == b.pass);
    CHECK(a.min_margin == doctest::Approx(b.min_margin).epsilon(1e-14));
    REQUIRE(a.lhs.size() == b.lhs.size());
  }
  CHECK(back.suite_of == rep.suite_of);
}

TEST_CASE("serialized report is byte-identical across reruns") {
  Scenario sc;
  sc.name = "determinism";
  sc.models = {model_by_name("euclidean"), model_by_name("hyperbolic")};
  sc.suites = {"radial", "curvature"};
  sc.mc_pairs = 2000;

  std::ostringstream a, b;
  Report ra = run_scenario(sc);
  ra.wall_time_seconds = 0.7;
  write_report_json(ra, a);
  Report rb2 = run_scenario(sc);
  rb2.wall_time_seconds = 123.4;  // timing must not leak into the bytes
  write_report_json(rb2, b);
  CHECK(a.str() == b.str());
  CHECK(!a.str().empty());
}

TEST_CASE("margin CSV has a header and one row per certificate") {
  Scenario sc;
  sc.models = {model_by_name("euclidean")};
  sc.suites = {"curvature"};
  Report rep = run_scenario(sc);

  std::ostringstream out;
  write_margin_csv(rep, out);
  std::istringstream lines(out.str());
  std::string line;
  size_t n = 0;
  REQUIRE(std::getline(lines, line));
  CHECK(line.find("suite") != std::string::npos);
  CHECK(line.find("min_margin") != std::string::npos);
  while (std::getline(lines, line))
    if (!line.empty()) ++n;
  CHECK(n == rep.certificates.size());
}

TEST_CASE("plot extraction rejects kinds absent from the report") {
  Scenario sc;
  sc.models = {model_by_name("euclidean")};
  sc.suites = {"radial"};
  Report rep = run_scenario(sc);

  std::ostringstream ok;
  CHECK_NOTHROW(write_plot_csv(rep, "laplacian_comparison", ok));
  CHECK(ok.str().find("margin") != std::string::npos);
  std::ostringstream bad;
  CHECK_THROWS_AS(write_plot_csv(rep, "no_such_kind", bad), UnknownKind);
}
