#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dremr/linalg.hpp"

namespace dremr {

/// One time instant of the measurable pair: regressor vector and regressand.
struct RegressorSample {
  double t = 0.0;
  Vec phibar;
  double z = 0.0;
};

enum class PieceKind { Sin, CosExp, Exp, Const };

inline std::string to_string(PieceKind k) {
  switch (k) {
    case PieceKind::Sin: return "sin";
    case PieceKind::CosExp: return "cosexp";
    case PieceKind::Exp: return "exp";
    case PieceKind::Const: return "const";
  }
  throw std::logic_error("unknown piece kind");
}

inline PieceKind piece_kind_from_string(const std::string& s) {
  if (s == "sin") return PieceKind::Sin;
  if (s == "cosexp") return PieceKind::CosExp;
  if (s == "exp") return PieceKind::Exp;
  if (s == "const") return PieceKind::Const;
  throw std::invalid_argument("unknown piece kind: " + s);
}

/// Elementary signal piece on [t_begin, t_end):
///   sin:    c*sin(a*t)
///   cosexp: c*cos(a*t)*e^{-t}
///   exp:    c*e^{-t} + offset
///   const:  c
struct Piece {
  double t_begin = 0.0;
  double t_end = 0.0;
  PieceKind kind = PieceKind::Const;
  double c = 1.0;
  double a = 1.0;
  double offset = 0.0;

  double eval(double t) const {
    switch (kind) {
      case PieceKind::Sin: return c * std::sin(a * t);
      case PieceKind::CosExp: return c * std::cos(a * t) * std::exp(-t);
      case PieceKind::Exp: return c * std::exp(-t) + offset;
      case PieceKind::Const: return c;
    }
    throw std::logic_error("unknown piece kind");
  }
};

/// One regressor component: pieces partition [0, horizon]. Intervals are
/// left-closed/right-open; the final piece also owns its right endpoint.
struct Component {
  std::vector<Piece> pieces;

  double eval(double t) const {
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const bool last = (i + 1 == pieces.size());
      if (t >= pieces[i].t_begin && (t < pieces[i].t_end || (last && t <= pieces[i].t_end)))
        return pieces[i].eval(t);
    }
    throw std::out_of_range("component: time not covered by any piece");
  }
};

struct ScenarioSpec {
  int n = 0;
  Vec theta_true;
  double horizon = 0.0;
  bool normalize = false;
  std::vector<Component> components;

  void validate() const {
    if (n <= 0) throw std::invalid_argument("scenario: n must be positive");
    if (static_cast<int>(theta_true.size()) != n) throw std::invalid_argument("scenario: theta_true size mismatch");
    if (static_cast<int>(components.size()) != n) throw std::invalid_argument("scenario: component count mismatch");
    if (horizon < 0.0) throw std::invalid_argument("scenario: negative horizon");
    for (const auto& comp : components) {
      if (comp.pieces.empty()) throw std::invalid_argument("scenario: component without pieces");
      double cursor = 0.0;
      for (const auto& p : comp.pieces) {
        if (std::abs(p.t_begin - cursor) > 1e-12)
          throw std::invalid_argument("scenario: pieces do not partition [0, horizon]");
        if (p.t_end <= p.t_begin && horizon > 0.0)
          throw std::invalid_argument("scenario: empty piece interval");
        cursor = p.t_end;
      }
      if (std::abs(cursor - horizon) > 1e-12)
        throw std::invalid_argument("scenario: pieces do not reach the horizon");
    }
  }
};

inline RegressorSample sample(const ScenarioSpec& spec, double t) {
  if (t < 0.0 || t > spec.horizon) throw std::out_of_range("sample: time outside horizon");
  RegressorSample s;
  s.t = t;
  s.phibar.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) s.phibar[i] = spec.components[i].eval(t);
  s.z = dot(s.phibar, spec.theta_true);
  return s;
}

/// Boundedness normalization: scale the whole regression by 1/(1 + |phibar|^2).
inline RegressorSample normalize(RegressorSample s) {
  const double ns = 1.0 / (1.0 + dot(s.phibar, s.phibar));
  for (double& v : s.phibar) v *= ns;
  s.z *= ns;
  return s;
}

// ---- scenario presets ------------------------------------------------------

inline std::vector<std::string> preset_names() { return {"exp-a", "exp-b1", "exp-b2"}; }

inline ScenarioSpec preset(const std::string& name) {
  const Vec theta{4.0, -8.0, 12.0};
  auto piece = [](double t0, double t1, PieceKind k, double c, double a = 1.0, double offset = 0.0) {
    Piece p;
    p.t_begin = t0;
    p.t_end = t1;
    p.kind = k;
    p.c = c;
    p.a = a;
    p.offset = offset;
    return p;
  };

  ScenarioSpec s;
  s.n = 3;
  s.theta_true = theta;
  if (name == "exp-a") {
    s.horizon = 1.0;
    s.components.resize(3);
    s.components[0].pieces = {piece(0, 1, PieceKind::CosExp, -2.0)};
    s.components[1].pieces = {piece(0, 1, PieceKind::CosExp, 1.0)};
    s.components[2].pieces = {piece(0, 1, PieceKind::Exp, 1.0)};
  } else if (name == "exp-b1") {
    s.horizon = 25.0;
    s.components.resize(3);
    s.components[0].pieces = {piece(0, 25, PieceKind::Sin, 9.0)};
    s.components[1].pieces = {piece(0, 5, PieceKind::Sin, 2.0), piece(5, 15, PieceKind::Const, 4.0),
                              piece(15, 25, PieceKind::Sin, 2.0)};
    s.components[2].pieces = {piece(0, 10, PieceKind::Sin, 1.0), piece(10, 15, PieceKind::Sin, 1.0, 50.0),
                              piece(15, 25, PieceKind::Sin, 1.0)};
  } else if (name == "exp-b2") {
    s.horizon = 10.0;
    s.components.resize(3);
    s.components[0].pieces = {piece(0, 1, PieceKind::CosExp, -2.0), piece(1, 2, PieceKind::Exp, 1.0),
                              piece(2, 10, PieceKind::CosExp, 1.0)};
    s.components[1].pieces = {piece(0, 1, PieceKind::CosExp, 1.0), piece(1, 2, PieceKind::CosExp, -2.0),
                              piece(2, 10, PieceKind::Exp, 1.0, 1.0, 0.1)};
    s.components[2].pieces = {piece(0, 1, PieceKind::Exp, 1.0), piece(1, 2, PieceKind::CosExp, 1.0),
                              piece(2, 10, PieceKind::CosExp, -2.0)};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  s.validate();
  return s;
}

// ---- scenario file I/O -----------------------------------------------------

inline nlohmann::json to_json(const ScenarioSpec& spec) {
  nlohmann::json j;
  j["n"] = spec.n;
  j["theta_true"] = spec.theta_true;
  j["horizon"] = spec.horizon;
  j["normalize"] = spec.normalize;
  j["components"] = nlohmann::json::array();
  for (const auto& comp : spec.components) {
    nlohmann::json jc;
    jc["pieces"] = nlohmann::json::array();
    for (const auto& p : comp.pieces) {
      nlohmann::json jp;
      jp["interval"] = {p.t_begin, p.t_end};
      jp["kind"] = to_string(p.kind);
      jp["coefficients"] = {{"c", p.c}, {"a", p.a}, {"offset", p.offset}};
      jc["pieces"].push_back(jp);
    }
    j["components"].push_back(jc);
  }
  return j;
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  spec.n = j.at("n").get<int>();
  spec.theta_true = j.at("theta_true").get<Vec>();
  spec.horizon = j.at("horizon").get<double>();
  spec.normalize = j.value("normalize", false);
  for (const auto& jc : j.at("components")) {
    Component comp;
    for (const auto& jp : jc.at("pieces")) {
      Piece p;
      p.t_begin = jp.at("interval").at(0).get<double>();
      p.t_end = jp.at("interval").at(1).get<double>();
      p.kind = piece_kind_from_string(jp.at("kind").get<std::string>());
      const auto& co = jp.at("coefficients");
      p.c = co.value("c", 1.0);
      p.a = co.value("a", 1.0);
      p.offset = co.value("offset", 0.0);
      comp.pieces.push_back(p);
    }
    spec.components.push_back(comp);
  }
  spec.validate();
  return spec;
}

inline void save_scenario(const ScenarioSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open scenario file for writing: " + path);
  out << to_json(spec).dump(2) << "\n";
  if (!out) throw std::runtime_error("write failure: " + path);
}

inline ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  nlohmann::json j;
  in >> j;
  return scenario_from_json(j);
}

}  // namespace dremr
