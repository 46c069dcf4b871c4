#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "intop/cli.hpp"

namespace intop::cli {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + "expected an object");
  }

  template <class T>
  void get(const char* key, T& dst) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if (!has_type<T>(*it)) throw ConfigError(where(key) + "has the wrong type");
    dst = it->get<T>();
  }

  Reader child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    static const json empty = json::object();
    return Reader(it == obj_.end() ? empty : *it, path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where(it.key().c_str()) + "is not a known field");
    }
  }

 private:
  std::string where(const char* key = nullptr) const {
    std::string p = path_;
    if (key) p = p.empty() ? key : p + "." + key;
    return p.empty() ? "config: " : "config field '" + p + "': ";
  }

  template <class T>
  struct is_vector : std::false_type {};
  template <class U>
  struct is_vector<std::vector<U>> : std::true_type {};

  template <class T>
  static bool has_type(const json& v) {
    if constexpr (std::is_same_v<T, bool>) {
      return v.is_boolean();
    } else if constexpr (std::is_integral_v<T>) {
      return v.is_number_integer() && (!std::is_unsigned_v<T> || v.is_number_unsigned());
    } else if constexpr (std::is_floating_point_v<T>) {
      return v.is_number();
    } else if constexpr (std::is_same_v<T, std::string>) {
      return v.is_string();
    } else if constexpr (is_vector<T>::value) {
      if (!v.is_array()) return false;
      for (const auto& e : v) {
        if (!has_type<typename T::value_type>(e)) return false;
      }
      return true;
    } else {
      return false;
    }
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_quadrature(Reader r, QuadratureSpec& q) {
  r.get("r_outer", q.r_outer);
  r.get("r_split", q.r_split);
  r.get("radial_nodes", q.radial_nodes);
  r.get("panel_length", q.panel_length);
  r.get("theta_nodes", q.theta_nodes);
  r.get("phi_nodes", q.phi_nodes);
  r.get("excision_ladder", q.excision_ladder);
  r.get("threads", q.threads);
  r.finish();
}

template <class F>
void rethrow_as_config(const char* section, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config section '") + section + "': " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  if (model != "toy" && model != "fock" && model != "pair") {
    throw ConfigError("config field 'model': expected toy, fock or pair");
  }
  rethrow_as_config("grid", [&] { (void)make_grid(r_max, n_nodes); });
  rethrow_as_config("toy", [&] { toy.validate(); });
  rethrow_as_config("fock", [&] { fock.validate(); });
  rethrow_as_config("pair", [&] { pair.validate(); });
  rethrow_as_config("suite", [&] {
    suite.validate();
    suite.quad.validate({Vec3::Zero()});
  });
  if (spectrum.k < 1) throw ConfigError("config field 'spectrum.k': must be at least 1");
  if (spectrum.profiles && model == "fock") {
    throw ConfigError("config field 'spectrum.profiles': radial profiles exist for toy and pair only");
  }
  if (!std::isfinite(evolve.dt) || evolve.dt < 0.0) {
    throw ConfigError("config field 'evolve.dt': must be finite and non-negative");
  }
  if (evolve.steps < 1) throw ConfigError("config field 'evolve.steps': must be at least 1");
  if (evolve.stride < 1) throw ConfigError("config field 'evolve.stride': must be at least 1");
  const auto& lv = convergence.levels;
  if (lv.size() < 3) {
    throw ConfigError("config field 'convergence.levels': need at least three refinement levels");
  }
  for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
    if (lv[i + 1] <= lv[i]) {
      throw ConfigError("config field 'convergence.levels': levels must be strictly increasing");
    }
  }
  for (std::size_t n : lv) rethrow_as_config("convergence", [&] { (void)make_grid(r_max, n); });
  const double ratio = double(lv[1] - 1) / double(lv[0] - 1);
  for (std::size_t i = 1; i + 1 < lv.size(); ++i) {
    if (std::abs(double(lv[i + 1] - 1) / double(lv[i] - 1) - ratio) > 1e-12 * ratio) {
      throw ConfigError("config field 'convergence.levels': spacings must refine by a constant ratio");
    }
  }
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Reader root(doc, "");
  root.get("model", c.model);
  {
    auto g = root.child("grid");
    g.get("r_max", c.r_max);
    g.get("n_nodes", c.n_nodes);
    g.finish();
  }
  {
    auto t = root.child("toy");
    t.get("mass_m", c.toy.mass_m);
    t.get("energy_e", c.toy.energy_e);
    t.get("coupling_g", c.toy.coupling_g);
    t.get("lambda_scale", c.toy.lambda_scale);
    t.get("point_coupling_mu", c.toy.point_coupling_mu);
    t.finish();
  }
  {
    auto f = root.child("fock");
    f.get("boson_mass", c.fock.boson_mass);
    f.get("source_energy", c.fock.source_energy);
    f.get("boson_energy", c.fock.boson_energy);
    f.get("coupling_h", c.fock.coupling_h);
    f.get("n_max", c.fock.n_max);
    f.get("dof_budget", c.fock.dof_budget);
    f.finish();
  }
  {
    auto p = root.child("pair");
    p.get("fermion_mass", c.pair.fermion_mass);
    p.get("boson_channel_energy", c.pair.boson_channel_energy);
    p.get("coupling_g", c.pair.coupling_g);
    p.finish();
  }
  {
    auto s = root.child("suite");
    s.get("n_scenes", c.suite.n_scenes);
    s.get("seed", c.suite.seed);
    s.get("self_test", c.suite.self_test);
    s.get("injection", c.suite.injection);
    s.get("identities", c.suite.identities);
    read_quadrature(s.child("quadrature"), c.suite.quad);
    s.finish();
  }
  {
    auto s = root.child("spectrum");
    s.get("k", c.spectrum.k);
    s.get("profiles", c.spectrum.profiles);
    s.finish();
  }
  {
    auto e = root.child("evolve");
    e.get("dt", c.evolve.dt);
    e.get("steps", c.evolve.steps);
    e.get("stride", c.evolve.stride);
    e.get("reverse", c.evolve.reverse);
    e.finish();
  }
  {
    auto v = root.child("convergence");
    v.get("levels", c.convergence.levels);
    v.finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  const auto& q = c.suite.quad;
  return json{
      {"model", c.model},
      {"grid", {{"r_max", c.r_max}, {"n_nodes", c.n_nodes}}},
      {"toy",
       {{"mass_m", c.toy.mass_m},
        {"energy_e", c.toy.energy_e},
        {"coupling_g", c.toy.coupling_g},
        {"lambda_scale", c.toy.lambda_scale},
        {"point_coupling_mu", c.toy.point_coupling_mu}}},
      {"fock",
       {{"boson_mass", c.fock.boson_mass},
        {"source_energy", c.fock.source_energy},
        {"boson_energy", c.fock.boson_energy},
        {"coupling_h", c.fock.coupling_h},
        {"n_max", c.fock.n_max},
        {"dof_budget", c.fock.dof_budget}}},
      {"pair",
       {{"fermion_mass", c.pair.fermion_mass},
        {"boson_channel_energy", c.pair.boson_channel_energy},
        {"coupling_g", c.pair.coupling_g}}},
      {"suite",
       {{"n_scenes", c.suite.n_scenes},
        {"seed", c.suite.seed},
        {"self_test", c.suite.self_test},
        {"injection", c.suite.injection},
        {"identities", c.suite.identities},
        {"quadrature",
         {{"r_outer", q.r_outer},
          {"r_split", q.r_split},
          {"radial_nodes", q.radial_nodes},
          {"panel_length", q.panel_length},
          {"theta_nodes", q.theta_nodes},
          {"phi_nodes", q.phi_nodes},
          {"excision_ladder", q.excision_ladder},
          {"threads", q.threads}}}}},
      {"spectrum", {{"k", c.spectrum.k}, {"profiles", c.spectrum.profiles}}},
      {"evolve",
       {{"dt", c.evolve.dt},
        {"steps", c.evolve.steps},
        {"stride", c.evolve.stride},
        {"reverse", c.evolve.reverse}}},
      {"convergence", {{"levels", c.convergence.levels}}},
  };
}

}  // namespace intop::cli
