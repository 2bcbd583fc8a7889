#include "doctest.h"
#include "ellroll/config.hpp"
#include "ellroll/errors.hpp"

using namespace ellroll;

TEST_CASE("defaults validate and convert to SI") {
  const RunConfig c;
  CHECK_NOTHROW(c.validate());
  const EllipseParams p = c.physics();
  CHECK(p.mass == doctest::Approx(0.020).epsilon(1e-15));
  CHECK(p.semi_major == doctest::Approx(0.034).epsilon(1e-15));
  CHECK(p.semi_minor == doctest::Approx(0.026).epsilon(1e-15));
  CHECK(p.torque_limit == 1e-3);
  CHECK(c.task_spec().theta_ref() == doctest::Approx(kPi / 2));
}

TEST_CASE("serialize and parse round trip") {
  RunConfig c;
  c.task = TaskId::VerticalToHorizontal;
  c.seed = 123456789012345ULL;
  c.mass_g = 15.5;
  c.agent.hidden = {32, 16};
  c.agent.normalize_observations = true;
  c.sulqr.state_cost(0, 0) = 50.0;
  c.sweep.tasks = {TaskId::VerticalFlip};
  c.sweep.masses_g = {10, 12.5};
  c.clock.sim_dt = 1.0 / 3000.0;
  const RunConfig back = RunConfig::parse(c.serialize());
  CHECK(back.serialize() == c.serialize());
  CHECK(back.hash() == c.hash());
  CHECK(back.seed == c.seed);
  CHECK(back.clock.sim_dt == c.clock.sim_dt);
  CHECK(back.agent.hidden == std::vector<int>{32, 16});
  CHECK(back.sweep.masses_g == std::vector<double>{10, 12.5});
}

TEST_CASE("hash is stable and sensitive") {
  const RunConfig a, b;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  RunConfig c;
  c.seed = 1;
  CHECK(c.hash() != a.hash());
  RunConfig moved;
  moved.out_dir = "elsewhere";
  CHECK(moved.hash() == a.hash());
}

TEST_CASE("partial files keep defaults") {
  const RunConfig c = RunConfig::parse("[body]\nmass_g = 25\n[run]\ntask = h2h\n");
  CHECK(c.mass_g == 25.0);
  CHECK(c.physics().mass == doctest::Approx(0.025));
  CHECK(c.task == TaskId::HorizontalFlip);
  CHECK(c.semi_major_mm == 34.0);
  CHECK(c.epochs == 1000);
}

TEST_CASE("invalid files are rejected") {
  CHECK_THROWS_AS(RunConfig::parse("[body]\nmas_g = 25\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[body]\nmass_g = heavy\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[body]\nmass_g = -1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[body]\nsemi_major_mm = 20\nsemi_minor_mm = 26\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[agent]\nnormalize_observations = maybe\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[run]\ntask = sideways\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.ini"), ConfigError);
}
