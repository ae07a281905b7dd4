#include "nholo/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nholo/expression.hpp"

namespace nholo {

using nlohmann::json;

std::string mode_name(ProblemMode mode) {
  switch (mode) {
    case ProblemMode::kLagrangian: return "lagrangian";
    case ProblemMode::kDMetric: return "dmetric";
    case ProblemMode::kAnsatz: return "ansatz";
  }
  return "?";
}

const std::vector<std::string>& output_catalog() {
  static const std::vector<std::string> names = {
      "almost_complex",  "anholonomy",       "berwald_dconnection",
      "canonical_dconnection", "charforms",  "dcurvature",
      "dmetric",         "distortion",       "dtorsion",
      "einstein",        "frames",           "hessian_metric",
      "levi_civita",     "nconnection_curvature", "ricci",
      "semispray"};
  return names;
}

bool output_needs_lagrangian(const std::string& name) {
  return name == "hessian_metric" || name == "semispray" ||
         name == "almost_complex";
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tols = {
      {"frame_duality", 1e-12},      {"anholonomy_oracle", 1e-9},
      {"nijenhuis_oracle", 1e-9},    {"metricity", 1e-9},
      {"canonical_torsion", 1e-12},  {"torsion_oracles", 1e-8},
      {"curvature_oracles", 1e-8},   {"distortion", 1e-9},
      {"einstein_trace", 1e-9},      {"chern_trace", 1e-8},
      {"wedge_trace_oracle", 1e-10}, {"almost_complex_square", 1e-12},
      {"euler_lagrange", 1e-6},      {"energy_drift", 1e-8}};
  return tols;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

namespace {

struct Loader {
  const json& j;
  std::vector<std::string> errors;
  ProblemConfig cfg;

  explicit Loader(const json& doc) : j(doc) {}

  void fail(const std::string& msg) { errors.push_back(msg); }

  void check_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key()))
        fail(where + ": unknown key '" + it.key() + "'");
  }

  bool get_int(const json& obj, const std::string& where,
               const std::string& key, int& out, int lo, int hi) {
    if (!obj.contains(key)) {
      fail(where + ": missing '" + key + "'");
      return false;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      fail(where + "." + key + ": expected an integer");
      return false;
    }
    long long raw = v.get<long long>();
    if (raw < lo || raw > hi) {
      fail(where + "." + key + ": out of range [" + std::to_string(lo) + ", " +
           std::to_string(hi) + "]");
      return false;
    }
    out = static_cast<int>(raw);
    return true;
  }

  bool get_vector(const json& v, const std::string& where, int size,
                  Eigen::VectorXd& out) {
    if (!v.is_array()) {
      fail(where + ": expected an array of numbers");
      return false;
    }
    if (size >= 0 && static_cast<int>(v.size()) != size) {
      fail(where + ": expected " + std::to_string(size) + " entries, got " +
           std::to_string(v.size()));
      return false;
    }
    out.resize(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(where + "[" + std::to_string(i) + "]: expected a number");
        return false;
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return true;
  }

  void check_expression(const std::string& src, const std::string& where) {
    try {
      parse(src, cfg.dims);
    } catch (const ParseError& e) {
      fail(where + ": " + e.what());
    }
  }

  bool get_grid(const json& v, const std::string& where, int rows, int cols,
                std::vector<std::vector<std::string>>& out) {
    if (!v.is_array() || static_cast<int>(v.size()) != rows) {
      fail(where + ": expected " + std::to_string(rows) + " rows");
      return false;
    }
    out.assign(static_cast<std::size_t>(rows),
               std::vector<std::string>(static_cast<std::size_t>(cols)));
    bool ok = true;
    for (int r = 0; r < rows; ++r) {
      const json& row = v[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<int>(row.size()) != cols) {
        fail(where + "[" + std::to_string(r) + "]: expected " +
             std::to_string(cols) + " entries");
        ok = false;
        continue;
      }
      for (int c = 0; c < cols; ++c) {
        const json& cell = row[static_cast<std::size_t>(c)];
        if (!cell.is_string()) {
          fail(where + "[" + std::to_string(r) + "][" + std::to_string(c) +
               "]: expected an expression string");
          ok = false;
          continue;
        }
        out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            cell.get<std::string>();
        check_expression(cell.get<std::string>(),
                         where + "[" + std::to_string(r) + "][" +
                             std::to_string(c) + "]");
      }
    }
    return ok;
  }

  void load_dims() {
    if (!j.contains("dims")) {
      fail("dims: missing");
      return;
    }
    const json& d = j.at("dims");
    if (!d.is_object()) {
      fail("dims: expected an object with 'n' and 'm'");
      return;
    }
    check_keys(d, "dims", {"n", "m"});
    int n = 0, m = 0;
    bool ok = get_int(d, "dims", "n", n, 1, 8);
    ok = get_int(d, "dims", "m", m, 1, 8) && ok;
    if (ok) cfg.dims = Dims(n, m);
    dims_ok_ = ok;
  }

  void load_mode_sources() {
    if (!j.contains("mode") || !j.at("mode").is_string()) {
      fail("mode: missing or not a string");
      return;
    }
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "lagrangian") cfg.mode = ProblemMode::kLagrangian;
    else if (mode == "dmetric") cfg.mode = ProblemMode::kDMetric;
    else if (mode == "ansatz") cfg.mode = ProblemMode::kAnsatz;
    else {
      fail("mode: expected lagrangian, dmetric, or ansatz");
      return;
    }
    if (!dims_ok_) return;
    const int n = cfg.dims.n, m = cfg.dims.m;

    if (cfg.mode == ProblemMode::kLagrangian) {
      if (n != m) fail("dims: lagrangian mode requires m == n");
      if (j.contains("metric")) fail("metric: not used in lagrangian mode");
      if (j.contains("nconnection"))
        fail("nconnection: derived in lagrangian mode, remove it");
      if (j.contains("ansatz")) fail("ansatz: not used in lagrangian mode");
      if (!j.contains("lagrangian") || !j.at("lagrangian").is_string()) {
        fail("lagrangian: missing expression string");
        return;
      }
      cfg.lagrangian_src = j.at("lagrangian").get<std::string>();
      if (n == m) check_expression(cfg.lagrangian_src, "lagrangian");
      return;
    }

    if (cfg.mode == ProblemMode::kDMetric) {
      if (j.contains("lagrangian"))
        fail("lagrangian: not used in dmetric mode");
      if (j.contains("ansatz")) fail("ansatz: not used in dmetric mode");
      if (!j.contains("metric") || !j.at("metric").is_object()) {
        fail("metric: missing object with 'g' and 'h'");
      } else {
        const json& mt = j.at("metric");
        check_keys(mt, "metric", {"g", "h"});
        if (mt.contains("g")) get_grid(mt.at("g"), "metric.g", n, n, cfg.g_src);
        else fail("metric.g: missing");
        if (mt.contains("h")) get_grid(mt.at("h"), "metric.h", m, m, cfg.h_src);
        else fail("metric.h: missing");
      }
      if (j.contains("nconnection"))
        get_grid(j.at("nconnection"), "nconnection", m, n, cfg.n_src);
      return;
    }

    // ansatz
    if (j.contains("lagrangian")) fail("lagrangian: not used in ansatz mode");
    if (j.contains("metric")) fail("metric: not used in ansatz mode");
    if (j.contains("nconnection"))
      fail("nconnection: derived in ansatz mode, remove it");
    if (!j.contains("ansatz")) {
      fail("ansatz: missing (n+m) x (n+m) grid");
      return;
    }
    get_grid(j.at("ansatz"), "ansatz", n + m, n + m, cfg.ansatz_src);
  }

  void load_points() {
    if (!j.contains("points")) return;
    const json& p = j.at("points");
    if (!p.is_object()) {
      fail("points: expected an object");
      return;
    }
    check_keys(p, "points", {"explicit", "count", "box", "seed"});
    const int total = cfg.dims.total();

    bool have_box = false;
    if (p.contains("box")) {
      const json& b = p.at("box");
      if (!b.is_object()) {
        fail("points.box: expected an object with 'lo' and 'hi'");
      } else {
        check_keys(b, "points.box", {"lo", "hi"});
        bool ok = b.contains("lo") && b.contains("hi");
        if (!ok) fail("points.box: needs both 'lo' and 'hi'");
        if (ok) {
          ok = get_vector(b.at("lo"), "points.box.lo", total, cfg.box_lo);
          ok = get_vector(b.at("hi"), "points.box.hi", total, cfg.box_hi) && ok;
        }
        if (ok) {
          for (int i = 0; i < total; ++i)
            if (!(cfg.box_lo[i] < cfg.box_hi[i])) {
              fail("points.box: lo must be strictly below hi in every axis");
              ok = false;
              break;
            }
        }
        have_box = ok;
        if (!ok) {
          cfg.box_lo.resize(0);
          cfg.box_hi.resize(0);
        }
      }
    }

    if (p.contains("explicit")) {
      const json& ex = p.at("explicit");
      if (!ex.is_array()) {
        fail("points.explicit: expected an array of points");
      } else {
        for (std::size_t i = 0; i < ex.size(); ++i) {
          Eigen::VectorXd pt;
          if (!get_vector(ex[i], "points.explicit[" + std::to_string(i) + "]",
                          total, pt))
            continue;
          if (have_box) {
            for (int c = 0; c < total; ++c)
              if (pt[c] < cfg.box_lo[c] || pt[c] > cfg.box_hi[c]) {
                fail("points.explicit[" + std::to_string(i) +
                     "]: outside the declared box");
                break;
              }
          }
          cfg.explicit_points.push_back(std::move(pt));
        }
      }
    }

    if (p.contains("count")) {
      int count = 0;
      if (get_int(p, "points", "count", count, 0, 100000)) {
        cfg.sample_count = count;
        if (count > 0 && !have_box)
          fail("points.count: sampling requires points.box");
      }
    }

    if (p.contains("seed")) {
      const json& s = p.at("seed");
      if (!s.is_number_integer() && !s.is_number_unsigned())
        fail("points.seed: expected an integer");
      else if (s.is_number_integer() && s.get<long long>() < 0)
        fail("points.seed: must be nonnegative");
      else
        cfg.seed = s.get<std::uint64_t>();
    }
  }

  void load_outputs() {
    if (!j.contains("outputs")) return;
    const json& o = j.at("outputs");
    if (!o.is_array()) {
      fail("outputs: expected an array of object names");
      return;
    }
    const auto& catalog = output_catalog();
    std::set<std::string> seen, reported;
    for (const json& item : o) {
      if (!item.is_string()) {
        fail("outputs: entries must be strings");
        continue;
      }
      std::string name = item.get<std::string>();
      if (std::find(catalog.begin(), catalog.end(), name) == catalog.end()) {
        fail("outputs: unknown object '" + name + "'");
        continue;
      }
      if (!seen.insert(name).second) {
        if (reported.insert(name).second)
          fail("outputs: duplicate '" + name + "'");
        continue;
      }
      if (output_needs_lagrangian(name) && cfg.mode != ProblemMode::kLagrangian)
        fail("outputs: '" + name + "' requires lagrangian mode");
      cfg.outputs.push_back(name);
    }
  }

  void load_tolerances() {
    if (!j.contains("tolerances")) return;
    const json& t = j.at("tolerances");
    if (!t.is_object()) {
      fail("tolerances: expected an object of name -> value");
      return;
    }
    const auto& known = default_tolerances();
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!known.count(it.key())) {
        fail("tolerances: unknown check '" + it.key() + "'");
        continue;
      }
      if (!it.value().is_number() || it.value().get<double>() <= 0.0) {
        fail("tolerances." + it.key() + ": expected a positive number");
        continue;
      }
      cfg.tolerances[it.key()] = it.value().get<double>();
    }
  }

  void load_geodesic() {
    if (!j.contains("geodesic")) return;
    const json& g = j.at("geodesic");
    if (!g.is_object()) {
      fail("geodesic: expected an object");
      return;
    }
    if (cfg.mode != ProblemMode::kLagrangian) {
      fail("geodesic: requires lagrangian mode");
      return;
    }
    check_keys(g, "geodesic", {"x0", "y0", "tau_end", "steps"});
    GeodesicRequest req;
    bool ok = true;
    if (g.contains("x0"))
      ok = get_vector(g.at("x0"), "geodesic.x0", cfg.dims.n, req.x0) && ok;
    else {
      fail("geodesic.x0: missing");
      ok = false;
    }
    if (g.contains("y0"))
      ok = get_vector(g.at("y0"), "geodesic.y0", cfg.dims.n, req.y0) && ok;
    else {
      fail("geodesic.y0: missing");
      ok = false;
    }
    if (g.contains("tau_end")) {
      if (!g.at("tau_end").is_number() || g.at("tau_end").get<double>() <= 0) {
        fail("geodesic.tau_end: expected a positive number");
        ok = false;
      } else {
        req.tau_end = g.at("tau_end").get<double>();
      }
    }
    if (g.contains("steps"))
      ok = get_int(g, "geodesic", "steps", req.steps, 5, 200000) && ok;
    if (ok) cfg.geodesic = std::move(req);
  }

  void load_misc() {
    if (j.contains("order")) {
      int order = 2;
      if (get_int(j, "", "order", order, 2, 3)) cfg.order = order;
    }
    if (j.contains("vv_middle_term")) {
      const json& v = j.at("vv_middle_term");
      if (v.is_string() && v.get<std::string>() == "symmetrized")
        cfg.vv_middle_term = VvTermForm::kSymmetrized;
      else if (v.is_string() && v.get<std::string>() == "unsymmetrized")
        cfg.vv_middle_term = VvTermForm::kUnsymmetrized;
      else
        fail("vv_middle_term: expected 'symmetrized' or 'unsymmetrized'");
    }
    if (j.contains("einstein_sources")) {
      const json& s = j.at("einstein_sources");
      if (!s.is_object() || !s.contains("lambda_h") ||
          !s.contains("lambda_v") || !s.at("lambda_h").is_number() ||
          !s.at("lambda_v").is_number()) {
        fail("einstein_sources: expected numbers lambda_h and lambda_v");
      } else {
        check_keys(s, "einstein_sources", {"lambda_h", "lambda_v"});
        cfg.einstein_sources = {s.at("lambda_h").get<double>(),
                                s.at("lambda_v").get<double>()};
      }
    }
  }

  ProblemConfig run() {
    if (!j.is_object()) {
      throw ValidationError({"config: top level must be a JSON object"});
    }
    check_keys(j, "config",
               {"dims", "mode", "order", "vv_middle_term", "lagrangian",
                "metric", "nconnection", "ansatz", "points", "outputs",
                "tolerances", "geodesic", "einstein_sources"});
    load_dims();
    load_mode_sources();
    if (dims_ok_) {
      load_points();
      load_outputs();
      load_geodesic();
    }
    load_tolerances();
    load_misc();
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return std::move(cfg);
  }

 private:
  bool dims_ok_ = false;
};

json apply_overrides(json j, const ConfigOverrides& overrides) {
  if (overrides.seed) {
    if (!j.contains("points") || !j["points"].is_object())
      j["points"] = json::object();
    j["points"]["seed"] = *overrides.seed;
  }
  if (overrides.points) {
    if (!j.contains("points") || !j["points"].is_object())
      j["points"] = json::object();
    j["points"]["count"] = *overrides.points;
  }
  if (!overrides.tolerances.empty()) {
    if (!j.contains("tolerances") || !j["tolerances"].is_object())
      j["tolerances"] = json::object();
    for (const auto& [name, value] : overrides.tolerances)
      j["tolerances"][name] = value;
  }
  return j;
}

}  // namespace

ProblemConfig load_config_text(const std::string& text,
                               const ConfigOverrides& overrides) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("config parse: ") + e.what()});
  }
  j = apply_overrides(std::move(j), overrides);
  Loader loader(j);
  ProblemConfig cfg = loader.run();
  std::ostringstream hex;
  hex << std::hex << fnv1a64(j.dump());
  cfg.config_hash = hex.str();
  return cfg;
}

ProblemConfig load_config(const std::string& path,
                          const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"config: cannot open '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str(), overrides);
}

}  // namespace nholo
