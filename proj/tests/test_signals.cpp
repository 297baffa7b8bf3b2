#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dremr/signals.hpp"

using namespace dremr;

TEST_CASE("piece evaluation") {
  Piece p;
  p.kind = PieceKind::Sin;
  p.c = 9.0;
  p.a = 1.0;
  CHECK(p.eval(2.0) == doctest::Approx(9.0 * std::sin(2.0)));

  p.kind = PieceKind::CosExp;
  p.c = -2.0;
  CHECK(p.eval(0.7) == doctest::Approx(-2.0 * std::cos(0.7) * std::exp(-0.7)));

  p.kind = PieceKind::Exp;
  p.c = 1.0;
  p.offset = 0.1;
  CHECK(p.eval(3.0) == doctest::Approx(std::exp(-3.0) + 0.1));

  p.kind = PieceKind::Const;
  p.c = 4.0;
  CHECK(p.eval(123.0) == 4.0);
}

TEST_CASE("component intervals are left-closed, right-open, last closed") {
  Component comp;
  Piece a;
  a.t_begin = 0.0;
  a.t_end = 1.0;
  a.kind = PieceKind::Const;
  a.c = 1.0;
  Piece b = a;
  b.t_begin = 1.0;
  b.t_end = 2.0;
  b.c = 2.0;
  comp.pieces = {a, b};
  CHECK(comp.eval(0.0) == 1.0);
  CHECK(comp.eval(1.0) == 2.0);  // boundary belongs to the right piece
  CHECK(comp.eval(2.0) == 2.0);  // final endpoint owned by the last piece
  CHECK_THROWS_AS(comp.eval(2.5), std::out_of_range);
}

TEST_CASE("scenario validation catches bad partitions") {
  ScenarioSpec s = preset("exp-a");
  s.components[0].pieces[0].t_end = 0.9;  // no longer reaches the horizon
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  ScenarioSpec s2 = preset("exp-a");
  s2.theta_true.pop_back();
  CHECK_THROWS_AS(s2.validate(), std::invalid_argument);

  ScenarioSpec s3 = preset("exp-b1");
  s3.components[1].pieces[1].t_begin = 6.0;  // gap at [5, 6)
  CHECK_THROWS_AS(s3.validate(), std::invalid_argument);
}

TEST_CASE("preset exp-a values") {
  const ScenarioSpec s = preset("exp-a");
  const RegressorSample s0 = sample(s, 0.0);
  CHECK(s0.phibar[0] == doctest::Approx(-2.0));
  CHECK(s0.phibar[1] == doctest::Approx(1.0));
  CHECK(s0.phibar[2] == doctest::Approx(1.0));
  CHECK(s0.z == doctest::Approx(4.0 * -2.0 - 8.0 * 1.0 + 12.0 * 1.0));

  const double t = 0.37;
  const RegressorSample st = sample(s, t);
  CHECK(st.phibar[0] == doctest::Approx(-2.0 * std::cos(t) * std::exp(-t)));
  CHECK(st.phibar[1] == doctest::Approx(std::cos(t) * std::exp(-t)));
  CHECK(st.phibar[2] == doctest::Approx(std::exp(-t)));
  // Collinearity: phibar_1 = -2 * phibar_2 throughout.
  CHECK(st.phibar[0] == doctest::Approx(-2.0 * st.phibar[1]));
}

TEST_CASE("preset exp-b1 piecewise boundaries") {
  const ScenarioSpec s = preset("exp-b1");
  CHECK(sample(s, 2.0).phibar[0] == doctest::Approx(9.0 * std::sin(2.0)));
  CHECK(sample(s, 4.9).phibar[1] == doctest::Approx(2.0 * std::sin(4.9)));
  CHECK(sample(s, 5.0).phibar[1] == doctest::Approx(4.0));
  CHECK(sample(s, 14.9).phibar[1] == doctest::Approx(4.0));
  CHECK(sample(s, 15.0).phibar[1] == doctest::Approx(2.0 * std::sin(15.0)));
  CHECK(sample(s, 12.0).phibar[2] == doctest::Approx(std::sin(50.0 * 12.0)));
  CHECK(sample(s, 9.9).phibar[2] == doctest::Approx(std::sin(9.9)));
  CHECK(sample(s, 25.0).phibar[0] == doctest::Approx(9.0 * std::sin(25.0)));
}

TEST_CASE("preset exp-b2 switches regressor structure at t = 1 and t = 2") {
  const ScenarioSpec s = preset("exp-b2");
  const RegressorSample a = sample(s, 0.5);
  CHECK(a.phibar[0] == doctest::Approx(-2.0 * std::cos(0.5) * std::exp(-0.5)));
  CHECK(a.phibar[2] == doctest::Approx(std::exp(-0.5)));
  const RegressorSample b = sample(s, 1.5);
  CHECK(b.phibar[0] == doctest::Approx(std::exp(-1.5)));
  CHECK(b.phibar[1] == doctest::Approx(-2.0 * std::cos(1.5) * std::exp(-1.5)));
  const RegressorSample c = sample(s, 2.5);
  CHECK(c.phibar[1] == doctest::Approx(std::exp(-2.5) + 0.1));
  CHECK(c.phibar[2] == doctest::Approx(-2.0 * std::cos(2.5) * std::exp(-2.5)));
}

TEST_CASE("sampling outside the horizon throws") {
  const ScenarioSpec s = preset("exp-a");
  CHECK_THROWS_AS(sample(s, -0.1), std::out_of_range);
  CHECK_THROWS_AS(sample(s, 1.1), std::out_of_range);
}

TEST_CASE("normalization scales the whole regression consistently") {
  const ScenarioSpec s = preset("exp-b1");
  RegressorSample raw = sample(s, 3.3);
  RegressorSample nrm = normalize(raw);
  const double scale = 1.0 / (1.0 + dot(raw.phibar, raw.phibar));
  for (int i = 0; i < 3; ++i) CHECK(nrm.phibar[i] == doctest::Approx(raw.phibar[i] * scale));
  CHECK(nrm.z == doctest::Approx(raw.z * scale));
  // The regression identity is preserved: z = phibar . theta still holds.
  CHECK(nrm.z == doctest::Approx(dot(nrm.phibar, s.theta_true)));
}

TEST_CASE("JSON round-trip preserves every preset exactly") {
  for (const auto& name : preset_names()) {
    const ScenarioSpec s = preset(name);
    const ScenarioSpec back = scenario_from_json(to_json(s));
    CHECK(back.n == s.n);
    CHECK(back.horizon == s.horizon);
    CHECK(back.theta_true == s.theta_true);
    for (double t : {0.0, 0.25 * s.horizon, 0.7 * s.horizon, s.horizon}) {
      const auto a = sample(s, t);
      const auto b = sample(back, t);
      CHECK(a.phibar == b.phibar);
      CHECK(a.z == b.z);
    }
  }
}

TEST_CASE("scenario file save/load") {
  const auto path = std::filesystem::temp_directory_path() / "dremr_scenario_test.json";
  const ScenarioSpec s = preset("exp-b2");
  save_scenario(s, path.string());
  const ScenarioSpec back = load_scenario(path.string());
  CHECK(back.theta_true == s.theta_true);
  CHECK(sample(back, 1.5).phibar == sample(s, 1.5).phibar);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_scenario("/nonexistent/dir/file.json"), std::runtime_error);
}
