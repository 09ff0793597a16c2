#include "wavefront/model_json.hpp"

#include <fstream>

namespace wavefront {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

namespace {

Mat parse_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ConfigError(where + ": expected " + std::to_string(n) + " rows");
  Mat w(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ConfigError(where + ": expected " + std::to_string(n) + " columns");
    for (int c = 0; c < n; ++c) w(r, c) = row.at(c).get<double>();
  }
  return w;
}

double require_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ConfigError(where + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

DelayKernel parse_kernel(const json& j, int n, double tau) {
  reject_unknown_keys(j, {"atoms", "density"}, "kernel");
  DelayKernel k(n, tau);
  if (j.contains("atoms")) {
    for (const auto& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 2)
        throw ConfigError("kernel.atoms entries must be [theta, weight] pairs");
      k.add_atom(a.at(0).get<double>(), parse_matrix(a.at(1), n, "kernel.atoms weight"));
    }
  }
  if (j.contains("density")) {
    reject_unknown_keys(j.at("density"), {"pieces"}, "kernel.density");
    for (const auto& pj : j.at("density").at("pieces")) {
      reject_unknown_keys(pj, {"a", "b", "coeffs", "quad_nodes"}, "kernel.density piece");
      DensityPiece p;
      p.a = require_number(pj, "a", "kernel.density piece");
      p.b = require_number(pj, "b", "kernel.density piece");
      for (const auto& c : pj.at("coeffs"))
        p.coeffs.push_back(parse_matrix(c, n, "kernel.density coeffs"));
      if (pj.contains("quad_nodes")) p.quad_nodes = pj.at("quad_nodes").get<int>();
      k.add_piece(std::move(p));
    }
  }
  return k;
}

Model parse_model(const json& j) {
  reject_unknown_keys(j, {"name", "N", "tau", "kernel", "builtin"}, "model");
  if (j.contains("builtin")) {
    const auto& b = j.at("builtin");
    if (!b.contains("name")) throw ConfigError("model.builtin: missing 'name'");
    const std::string name = b.at("name").get<std::string>();
    if (name == "fisher_kpp_delay") {
      reject_unknown_keys(b, {"name", "b", "tau", "K"}, "model.builtin");
      return make_fisher(require_number(b, "b", "fisher"), require_number(b, "tau", "fisher"),
                         require_number(b, "K", "fisher"));
    }
    if (name == "logistic_distributed") {
      reject_unknown_keys(b, {"name", "b"}, "model.builtin");
      if (!j.contains("kernel"))
        throw ConfigError("logistic_distributed requires a model kernel");
      const int n = j.value("N", 1);
      if (n != 1) throw ConfigError("logistic_distributed is scalar (N = 1)");
      const double tau = require_number(j, "tau", "model");
      return make_logistic(require_number(b, "b", "logistic"),
                           parse_kernel(j.at("kernel"), 1, tau));
    }
    if (name == "chemostat") {
      reject_unknown_keys(b, {"name", "D", "S0", "tau", "m", "a", "d1", "d2"},
                          "model.builtin");
      ChemostatParams p;
      p.D = b.value("D", p.D);
      p.S0 = b.value("S0", p.S0);
      p.tau = b.value("tau", p.tau);
      p.m = b.value("m", p.m);
      p.a = b.value("a", p.a);
      p.d1 = b.value("d1", p.d1);
      p.d2 = b.value("d2", p.d2);
      return make_chemostat(p);
    }
    throw ConfigError("unknown builtin model: " + name);
  }

  // Linear model defined by its kernel alone.
  const int n = j.value("N", 1);
  const double tau = require_number(j, "tau", "model");
  if (!j.contains("kernel")) throw ConfigError("model: missing 'kernel'");
  DelayKernel L = parse_kernel(j.at("kernel"), n, tau);
  Model m;
  m.name = j.value("name", std::string("linear"));
  m.n = n;
  m.tau = tau;
  m.delay_horizon = L.delay_horizon();
  m.diffusion = Vec::Ones(n);
  m.f = [L](const History& phi) { return L.apply(phi); };
  m.jacobian_at = [L](const History&) { return L; };
  m.has_equilibrium = false;
  m.K = Vec::Zero(n);
  return m;
}

}  // namespace wavefront
