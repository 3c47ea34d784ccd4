#include <doctest.h>

#include <cmath>
#include <limits>

#include "experiment_config.hpp"

using namespace tlbt_cli;

TEST_CASE("config JSON round-trip") {
  ExperimentConfig cfg;
  cfg.model = "gen:30,2,3";
  cfg.tbar = std::numeric_limits<double>::infinity();
  cfg.dt = 0.001;
  cfg.order = 5;
  cfg.input = "random:8";
  cfg.seed = 42;
  cfg.out = "results";
  cfg.verify = true;
  cfg.jobs = 3;
  cfg.axis = "tbar";
  cfg.values = {1.0, 2.5, std::numeric_limits<double>::infinity()};
  const auto back = config_from_json(to_json(cfg));
  CHECK(back.model == cfg.model);
  CHECK(std::isinf(back.tbar));
  CHECK(back.dt == cfg.dt);
  CHECK_FALSE(back.tend.has_value());
  CHECK(back.order == cfg.order);
  CHECK_FALSE(back.tol.has_value());
  CHECK(back.input == cfg.input);
  CHECK(back.seed == 42);
  CHECK(back.out == "results");
  CHECK(back.verify);
  CHECK(back.jobs == 3);
  CHECK(back.axis == "tbar");
  CHECK(back.values == cfg.values);
  CHECK(to_json(back) == to_json(cfg));
}

TEST_CASE("config rejects unknown and mistyped fields") {
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"modle", "x"}}), UsageError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"tbar", "soon"}}), UsageError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"order", "five"}}), UsageError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), UsageError);
}

TEST_CASE("defaults") {
  ExperimentConfig cfg;
  cfg.tbar = 2.0;
  CHECK(cfg.effective_dt() == doctest::Approx(2.0 / 2500.0));
  CHECK(cfg.effective_tend() == doctest::Approx(8.0));
  const auto g = parse_gen_spec(cfg.model);
  REQUIRE(g);
  CHECK(g->n == 20);
  CHECK(g->m == 7);
  CHECK(g->p == 6);
}

TEST_CASE("reduction control and validation") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(require_reduction_control(cfg), UsageError);
  cfg.order = 3;
  CHECK_NOTHROW(require_reduction_control(cfg));
  cfg.tol = 1e-3;
  CHECK_THROWS_AS(require_reduction_control(cfg), UsageError);
  cfg.order.reset();
  CHECK_NOTHROW(require_reduction_control(cfg));
  cfg.tol = -1.0;
  CHECK_THROWS_AS(require_reduction_control(cfg), UsageError);

  ExperimentConfig v;
  v.tbar = 0.0;
  CHECK_THROWS_AS(validate(v), UsageError);
  v.tbar = 1.0;
  v.dt = -1.0;
  CHECK_THROWS_AS(validate(v), UsageError);
  v.dt.reset();
  v.jobs = 0;
  CHECK_THROWS_AS(validate(v), UsageError);
}

TEST_CASE("generator specs and value lists") {
  CHECK(parse_gen_spec("gen:12")->n == 12);
  const auto g = parse_gen_spec("gen:12,2,3");
  CHECK(g->m == 2);
  CHECK(g->p == 3);
  CHECK_FALSE(parse_gen_spec("model/manifest.json"));
  CHECK_THROWS_AS(parse_gen_spec("gen:12,2"), UsageError);
  CHECK_THROWS_AS(parse_gen_spec("gen:x"), UsageError);

  CHECK(parse_value_list("1, 2.5,inf") == std::vector<double>{1.0, 2.5, std::numeric_limits<double>::infinity()});
  CHECK_THROWS_AS(parse_value_list("1,,2"), UsageError);
  CHECK_THROWS_AS(parse_real("1e"), UsageError);
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
}
