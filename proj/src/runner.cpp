#include "nholo/runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nholo/charforms.hpp"
#include "nholo/curvature.hpp"
#include "nholo/dconn.hpp"
#include "nholo/dmetric.hpp"
#include "nholo/expression.hpp"
#include "nholo/lagrange.hpp"
#include "nholo/nconn.hpp"

namespace nholo {
namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

json to_json(const Tensor3<double>& t) {
  json out = json::array();
  for (int a = 0; a < t.dim0(); ++a) {
    json plane = json::array();
    for (int b = 0; b < t.dim1(); ++b) {
      json row = json::array();
      for (int c = 0; c < t.dim2(); ++c) row.push_back(t(a, b, c));
      plane.push_back(row);
    }
    out.push_back(plane);
  }
  return out;
}

json to_json(const Tensor4<double>& t) {
  json out = json::array();
  for (int a = 0; a < t.dim0(); ++a) {
    json cube = json::array();
    for (int b = 0; b < t.dim1(); ++b) {
      json plane = json::array();
      for (int c = 0; c < t.dim2(); ++c) {
        json row = json::array();
        for (int d = 0; d < t.dim3(); ++d) row.push_back(t(a, b, c, d));
        plane.push_back(row);
      }
      cube.push_back(plane);
    }
    out.push_back(cube);
  }
  return out;
}

json form_polynomial_json(const FormPolynomial& p) {
  json out;
  out["degree"] = p.degree;
  out["i_power"] = p.i_power;
  out["beyond_dimension"] = p.beyond_dimension;
  if (p.degree == 2) out["two"] = to_json(p.two);
  if (p.degree == 4) {
    json quads = json::array();
    for (const auto& q : p.quads) quads.push_back({q[0], q[1], q[2], q[3]});
    out["quads"] = quads;
    out["coefficients"] = to_json(p.four);
  }
  return out;
}

// Parsed problem sources, built once per run.
struct Problem {
  ProblemConfig cfg;
  std::optional<LagrangeProblem> lag;
  std::optional<DMetric> dm;
  std::optional<NConnection> nc;
  std::optional<AnsatzMetric> am;

  GeometryJets geometry(const Eigen::VectorXd& pt) const {
    switch (cfg.mode) {
      case ProblemMode::kLagrangian:
        return make_geometry(*lag, pt, cfg.order);
      case ProblemMode::kDMetric:
        return make_geometry(*dm, *nc, pt, cfg.order);
      case ProblemMode::kAnsatz:
        return make_geometry(*am, pt, cfg.order);
    }
    throw std::logic_error("unreachable mode");
  }
};

FieldMatrix parse_grid(const std::vector<std::vector<std::string>>& src,
                       const Dims& dims) {
  FieldMatrix out(static_cast<Eigen::Index>(src.size()),
                  src.empty() ? 0 : static_cast<Eigen::Index>(src[0].size()));
  for (std::size_t i = 0; i < src.size(); ++i)
    for (std::size_t j = 0; j < src[i].size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse(src[i][j], dims);
  return out;
}

Problem build_problem(const ProblemConfig& cfg) {
  Problem prob;
  prob.cfg = cfg;
  switch (cfg.mode) {
    case ProblemMode::kLagrangian:
      prob.lag.emplace(cfg.dims.n,
                       ScalarField(parse(cfg.lagrangian_src, cfg.dims)));
      prob.nc.emplace(canonical_nconnection(*prob.lag));
      break;
    case ProblemMode::kDMetric:
      prob.dm.emplace(cfg.dims, parse_grid(cfg.g_src, cfg.dims),
                      parse_grid(cfg.h_src, cfg.dims));
      if (cfg.n_src.empty())
        prob.nc.emplace(zero_nconnection(cfg.dims));
      else
        prob.nc.emplace(cfg.dims, parse_grid(cfg.n_src, cfg.dims));
      break;
    case ProblemMode::kAnsatz:
      prob.am.emplace(cfg.dims, parse_grid(cfg.ansatz_src, cfg.dims));
      break;
  }
  return prob;
}

std::vector<Eigen::VectorXd> resolve_points(const ProblemConfig& cfg) {
  std::vector<Eigen::VectorXd> points = cfg.explicit_points;
  if (cfg.sample_count > 0) {
    std::mt19937_64 rng(cfg.seed);
    const int total = cfg.dims.total();
    // Fixed-arithmetic uniform draw so payloads do not depend on the
    // standard library's distribution implementation.
    auto draw = [&](double lo, double hi) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      return lo + u * (hi - lo);
    };
    for (int k = 0; k < cfg.sample_count; ++k) {
      Eigen::VectorXd pt(total);
      int attempts = 0;
      for (;;) {
        for (int c = 0; c < total; ++c)
          pt[c] = draw(cfg.box_lo[c], cfg.box_hi[c]);
        // Slit-bundle restriction: Lagrangian data is undefined on the zero
        // section, so reject fiber coordinates too close to it.
        if (cfg.mode != ProblemMode::kLagrangian ||
            pt.tail(cfg.dims.m).norm() >= 1e-3)
          break;
        if (++attempts > 10000)
          throw ValidationError(
              {"points.box: cannot sample |y| >= 1e-3 in this box"});
      }
      points.push_back(std::move(pt));
    }
  }
  return points;
}

int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  int budget = static_cast<int>(hw);
  if (const char* env = std::getenv("NHOLO_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) budget = std::min(budget, v);
  }
  return std::max(1, budget);
}

// Runs fn(i) for i in [0, count) across the thread budget. Any exception is
// rendered into the per-index error slot, so slot order never depends on
// scheduling.
void for_each_index(int count, std::vector<std::string>& error_slots,
                    const std::function<void(int)>& fn) {
  error_slots.assign(static_cast<std::size_t>(count), "");
  auto body = [&](int i) {
    try {
      fn(i);
    } catch (const std::exception& e) {
      error_slots[static_cast<std::size_t>(i)] = e.what();
    }
  };
  const int workers = std::min(thread_budget(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
        body(i);
    });
  for (auto& t : pool) t.join();
}

// Per-point lazily shared intermediates.
struct PointWork {
  const Problem& prob;
  Eigen::VectorXd pt;
  GeometryJets geo;

  PointWork(const Problem& p, const Eigen::VectorXd& point)
      : prob(p), pt(point), geo(p.geometry(point)) {}

  const DConnectionJets& canonical() {
    if (!canonical_)
      canonical_ = canonical_connection_jets(geo, prob.cfg.vv_middle_term);
    return *canonical_;
  }
  const CurvatureBlocks& curvature() {
    if (!curv_) curv_ = dcurvature(canonical(), geo);
    return *curv_;
  }

 private:
  std::optional<DConnectionJets> canonical_;
  std::optional<CurvatureBlocks> curv_;
};

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> frame_matrices(
    const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m, total = n + m;
  Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(total, total);
  Eigen::MatrixXd coframe = Eigen::MatrixXd::Identity(total, total);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) {
      frame(i, n + a) = -geo.N(a, i).value();
      coframe(i, n + a) = geo.N(a, i).value();
    }
  return {frame, coframe};
}

json compute_object(PointWork& w, const std::string& name) {
  const GeometryJets& geo = w.geo;
  json data;
  if (name == "frames") {
    auto [frame, coframe] = frame_matrices(geo);
    data["frame"] = to_json(frame);
    data["coframe"] = to_json(coframe);
    data["duality_residual"] =
        (frame * coframe -
         Eigen::MatrixXd::Identity(frame.rows(), frame.cols()))
            .cwiseAbs()
            .maxCoeff();
  } else if (name == "anholonomy") {
    data["W"] = to_json(values(anholonomy_jets(geo)));
  } else if (name == "nconnection_curvature") {
    Tensor3<double> omega(geo.dims.m, geo.dims.n, geo.dims.n);
    for (int a = 0; a < geo.dims.m; ++a)
      for (int i = 0; i < geo.dims.n; ++i)
        for (int j = 0; j < geo.dims.n; ++j)
          omega(a, i, j) = geo.omega(a, i, j).value();
    data["Omega"] = to_json(omega);
  } else if (name == "dmetric") {
    data["g"] = to_json(values(geo.g));
    data["h"] = to_json(values(geo.h));
    data["N"] = to_json(values(geo.N));
  } else if (name == "canonical_dconnection" ||
             name == "berwald_dconnection") {
    DConnectionValues conn = name[0] == 'c'
                                 ? values(w.canonical())
                                 : values(berwald_connection_jets(geo));
    data["Lh"] = to_json(conn.Lh);
    data["Lv"] = to_json(conn.Lv);
    data["Ch"] = to_json(conn.Ch);
    data["Cv"] = to_json(conn.Cv);
  } else if (name == "levi_civita") {
    data["Gamma"] = to_json(values(levi_civita_jets(geo)));
  } else if (name == "dtorsion") {
    TorsionBlocks t = dtorsion(w.canonical(), geo);
    data["Thh"] = to_json(t.Thh);
    data["Thv"] = to_json(t.Thv);
    data["Tvh"] = to_json(t.Tvh);
    data["Tvm"] = to_json(t.Tvm);
    data["Tvv"] = to_json(t.Tvv);
  } else if (name == "dcurvature") {
    const CurvatureBlocks& c = w.curvature();
    data["B1"] = to_json(c.B1);
    data["B2"] = to_json(c.B2);
    data["B3"] = to_json(c.B3);
    data["B4"] = to_json(c.B4);
    data["B5"] = to_json(c.B5);
    data["B6"] = to_json(c.B6);
  } else if (name == "ricci" || name == "einstein") {
    RicciData rd = ricci_einstein(w.curvature(), geo);
    data["ricci"] = to_json(rd.ricci);
    data["scalar"] = rd.scalar;
    if (name == "einstein") {
      data["einstein"] = to_json(rd.einstein);
      if (w.prob.cfg.einstein_sources) {
        auto [lh, lv] = *w.prob.cfg.einstein_sources;
        data["source_residual"] = einstein_source_residual(rd, geo, lh, lv);
      }
    }
  } else if (name == "distortion") {
    Distortion d = distortion(geo);
    data["Pvh"] = to_json(d.Pvh);
    data["Phv"] = to_json(d.Phv);
    data["residual"] = d.residual;
  } else if (name == "charforms") {
    MatrixTwoForm F = assemble_curvature_form(w.curvature(), geo.dims);
    ChernCharacter ch = chern_character(F, geo.dims);
    data["ch0"] = ch.ch0;
    data["ch1"] = form_polynomial_json(ch.ch1);
    data["ch2"] = form_polynomial_json(ch.ch2);
    data["pontryagin1"] = form_polynomial_json(pontryagin_first(F));
    data["ahat4"] = form_polynomial_json(a_hat_degree4(F));
  } else if (name == "hessian_metric") {
    HessianMetric hm = hessian_metric(*w.prob.lag, w.pt);
    data["g"] = to_json(hm.g);
    data["ginv"] = to_json(hm.ginv);
  } else if (name == "semispray") {
    data["G"] = to_json(semispray(*w.prob.lag, w.pt));
  } else if (name == "almost_complex") {
    Eigen::MatrixXd adapted = almost_complex_adapted(geo.dims.n);
    Eigen::MatrixXd coords = almost_complex_coordinates(*w.prob.nc, w.pt);
    data["adapted"] = to_json(adapted);
    data["coordinates"] = to_json(coords);
    data["square_residual"] =
        (coords * coords +
         Eigen::MatrixXd::Identity(coords.rows(), coords.cols()))
            .cwiseAbs()
            .maxCoeff();
  } else {
    throw std::logic_error("unknown output name: " + name);
  }
  return data;
}

double brute_wedge_trace(const MatrixTwoForm& F, int mu, int nu, int rho,
                         int sg) {
  std::array<int, 4> base = {mu, nu, rho, sg};
  std::array<int, 4> perm = {0, 1, 2, 3};
  double acc = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (perm[i] > perm[j]) ++inversions;
    double sign = inversions % 2 ? -1.0 : 1.0;
    double term = 0.0;
    for (int al = 0; al < F.d; ++al)
      for (int be = 0; be < F.d; ++be)
        term += F(al, be, base[perm[0]], base[perm[1]]) *
                F(be, al, base[perm[2]], base[perm[3]]);
    acc += sign * term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc / 4.0;
}

struct CheckResult {
  std::string name;
  double residual = 0.0;
  json detail;
};

std::vector<CheckResult> run_point_checks(PointWork& w) {
  const GeometryJets& geo = w.geo;
  std::vector<CheckResult> out;

  {
    auto [frame, coframe] = frame_matrices(geo);
    out.push_back({"frame_duality",
                   (frame * coframe - Eigen::MatrixXd::Identity(
                                          frame.rows(), frame.cols()))
                       .cwiseAbs()
                       .maxCoeff(),
                   {}});
  }

  Tensor3<double> w_direct = values(anholonomy_jets(geo));
  Tensor3<double> w_bracket = detail::bracket_anholonomy_values(geo);
  double anh = 0.0, nij = 0.0;
  const int total = geo.dims.total();
  for (int c = 0; c < total; ++c)
    for (int al = 0; al < total; ++al)
      for (int be = 0; be < total; ++be)
        anh = std::max(anh,
                       std::abs(w_direct(c, al, be) - w_bracket(c, al, be)));
  for (int a = 0; a < geo.dims.m; ++a)
    for (int i = 0; i < geo.dims.n; ++i)
      for (int jj = 0; jj < geo.dims.n; ++jj)
        nij = std::max(nij, std::abs(geo.omega(a, i, jj).value() -
                                     w_bracket(geo.dims.n + a, i, jj)));
  out.push_back({"anholonomy_oracle", anh, {}});
  out.push_back({"nijenhuis_oracle", nij, {}});

  {
    MetricityResidual mr = metricity_residual(w.canonical(), geo);
    json detail;
    detail["hh"] = mr.hh;
    detail["hv"] = mr.hv;
    detail["vh"] = mr.vh;
    detail["vv"] = mr.vv;
    out.push_back({"metricity", mr.max(), detail});
  }

  TorsionBlocks t_direct = dtorsion(w.canonical(), geo);
  out.push_back({"canonical_torsion",
                 std::max(max_abs(t_direct.Thh), max_abs(t_direct.Tvv)),
                 {}});
  out.push_back(
      {"torsion_oracles",
       std::max(gap(t_direct, torsion_via_forms_oracle(w.canonical(), geo)),
                gap(t_direct,
                    torsion_via_commutator_oracle(w.canonical(), geo))),
       {}});

  {
    const CurvatureBlocks& direct = w.curvature();
    double worst = std::max(
        gap(direct, curvature_via_forms_oracle(w.canonical(), geo)),
        gap(direct, curvature_via_commutator_oracle(w.canonical(), geo)));
    out.push_back({"curvature_oracles", worst, {}});
  }

  out.push_back({"distortion", distortion(geo).residual, {}});

  {
    RicciData rd = ricci_einstein(w.curvature(), geo);
    Eigen::MatrixXd ginv = values(geo.ginv), hinv = values(geo.hinv);
    double trace = 0.0;
    for (int i = 0; i < geo.dims.n; ++i)
      for (int jj = 0; jj < geo.dims.n; ++jj)
        trace += ginv(i, jj) * rd.einstein(jj, i);
    for (int a = 0; a < geo.dims.m; ++a)
      for (int b = 0; b < geo.dims.m; ++b)
        trace += hinv(a, b) *
                 rd.einstein(geo.dims.n + b, geo.dims.n + a);
    double expected = rd.scalar * (1.0 - 0.5 * total);
    out.push_back({"einstein_trace",
                   std::abs(trace - expected) / std::max(1.0, std::abs(expected)),
                   {}});
  }

  {
    MatrixTwoForm F = assemble_curvature_form(w.curvature(), geo.dims);
    out.push_back(
        {"chern_trace", trace_powers(F, 1).two.cwiseAbs().maxCoeff(), {}});
    if (total >= 4) {
      FormPolynomial t2 = trace_powers(F, 2);
      double worst = 0.0;
      for (std::size_t q = 0; q < t2.quads.size(); ++q) {
        const auto& quad = t2.quads[q];
        worst = std::max(
            worst,
            std::abs(t2.four[static_cast<Eigen::Index>(q)] -
                     brute_wedge_trace(F, quad[0], quad[1], quad[2], quad[3])));
      }
      out.push_back({"wedge_trace_oracle", worst, {}});
    }
  }

  if (w.prob.cfg.mode == ProblemMode::kLagrangian) {
    Eigen::MatrixXd Fc = almost_complex_coordinates(*w.prob.nc, w.pt);
    out.push_back({"almost_complex_square",
                   (Fc * Fc + Eigen::MatrixXd::Identity(Fc.rows(), Fc.cols()))
                       .cwiseAbs()
                       .maxCoeff(),
                   {}});
  }
  return out;
}

double tolerance_for(const ProblemConfig& cfg, const std::string& name) {
  auto it = cfg.tolerances.find(name);
  if (it != cfg.tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

json meta_json(const ProblemConfig& cfg, double wall_time_s) {
  json meta;
  meta["tool"] = "nholo";
  meta["version"] = kToolVersion;
  meta["mode"] = mode_name(cfg.mode);
  meta["dims"] = {{"n", cfg.dims.n}, {"m", cfg.dims.m}};
  meta["order"] = cfg.order;
  meta["config_hash"] = cfg.config_hash;
  meta["seed"] = cfg.seed;
  meta["wall_time_s"] = wall_time_s;
  return meta;
}

json points_json(const std::vector<Eigen::VectorXd>& points) {
  json out = json::array();
  for (const auto& p : points) out.push_back(to_json(p));
  return out;
}

json errors_json(const std::vector<std::string>& slots) {
  json out = json::array();
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (!slots[i].empty())
      out.push_back(
          {{"point", static_cast<int>(i)}, {"message", slots[i]}});
  return out;
}

}  // namespace

RunResult run_compute(const ProblemConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  if (cfg.outputs.empty())
    throw ValidationError({"outputs: compute requires at least one object"});
  Problem prob = build_problem(cfg);
  std::vector<Eigen::VectorXd> points = resolve_points(cfg);
  if (points.empty())
    throw ValidationError({"points: compute requires at least one point"});

  std::vector<std::string> names = cfg.outputs;
  std::sort(names.begin(), names.end());

  const int count = static_cast<int>(points.size());
  std::vector<std::vector<json>> slots(static_cast<std::size_t>(count));
  std::vector<std::string> error_slots;
  for_each_index(count, error_slots, [&](int i) {
    PointWork work(prob, points[static_cast<std::size_t>(i)]);
    std::vector<json>& mine = slots[static_cast<std::size_t>(i)];
    for (const std::string& name : names) {
      json entry;
      entry["point"] = i;
      entry["name"] = name;
      entry["data"] = compute_object(work, name);
      mine.push_back(std::move(entry));
    }
  });

  json report;
  json objects = json::array();
  for (const auto& point_objects : slots)
    for (const auto& entry : point_objects) objects.push_back(entry);
  report["points"] = points_json(points);
  report["objects"] = std::move(objects);
  report["errors"] = errors_json(error_slots);

  const bool failed =
      std::any_of(error_slots.begin(), error_slots.end(),
                  [](const std::string& s) { return !s.empty(); });
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  report["meta"] = meta_json(cfg, wall);
  return RunResult{report.dump(2) + "\n", failed ? 3 : 0};
}

RunResult run_verify(const ProblemConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  Problem prob = build_problem(cfg);
  std::vector<Eigen::VectorXd> points = resolve_points(cfg);
  if (points.empty())
    throw ValidationError({"points: verify requires at least one point"});

  const int count = static_cast<int>(points.size());
  std::vector<std::vector<CheckResult>> slots(
      static_cast<std::size_t>(count));
  std::vector<std::string> error_slots;
  for_each_index(count, error_slots, [&](int i) {
    PointWork work(prob, points[static_cast<std::size_t>(i)]);
    slots[static_cast<std::size_t>(i)] = run_point_checks(work);
  });

  struct Agg {
    double residual = 0.0;
    int worst_point = -1;
    json detail;
  };
  std::map<std::string, Agg> aggregate;
  for (int i = 0; i < count; ++i)
    for (const CheckResult& r : slots[static_cast<std::size_t>(i)]) {
      Agg& agg = aggregate[r.name];
      if (agg.worst_point < 0 || r.residual > agg.residual) {
        agg.residual = r.residual;
        agg.worst_point = i;
        agg.detail = r.detail;
      }
    }

  // Trajectory-level checks ride on the geodesic request when present.
  if (cfg.mode == ProblemMode::kLagrangian && cfg.geodesic) {
    const GeodesicRequest& req = *cfg.geodesic;
    GeodesicResult res = geodesic_integrate(*prob.lag, req.x0, req.y0,
                                            req.tau_end, req.steps);
    aggregate["euler_lagrange"] = {res.el_residual, -1, {}};
    aggregate["energy_drift"] = {res.energy_drift, -1, {}};
  }

  json checks = json::array();
  bool all_pass = true;
  for (const auto& [name, agg] : aggregate) {
    double tol = tolerance_for(cfg, name);
    bool pass = agg.residual < tol;
    all_pass = all_pass && pass;
    json entry;
    entry["name"] = name;
    entry["residual"] = agg.residual;
    entry["tolerance"] = tol;
    entry["pass"] = pass;
    if (agg.worst_point >= 0) entry["worst_point"] = agg.worst_point;
    if (!agg.detail.is_null()) entry["detail"] = agg.detail;
    checks.push_back(std::move(entry));
  }

  json report;
  report["points"] = points_json(points);
  report["checks"] = std::move(checks);
  report["errors"] = errors_json(error_slots);

  const bool had_errors =
      std::any_of(error_slots.begin(), error_slots.end(),
                  [](const std::string& s) { return !s.empty(); });
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  report["meta"] = meta_json(cfg, wall);
  int code = had_errors ? 3 : (all_pass ? 0 : 2);
  return RunResult{report.dump(2) + "\n", code};
}

RunResult run_geodesic(const ProblemConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  if (cfg.mode != ProblemMode::kLagrangian)
    throw ValidationError({"geodesic: requires lagrangian mode"});
  if (!cfg.geodesic)
    throw ValidationError({"geodesic: missing geodesic request in config"});
  Problem prob = build_problem(cfg);

  json report;
  int code = 0;
  try {
    const GeodesicRequest& req = *cfg.geodesic;
    GeodesicResult res = geodesic_integrate(*prob.lag, req.x0, req.y0,
                                            req.tau_end, req.steps);
    json traj;
    traj["tau"] = to_json(res.tau);
    json states = json::array();
    for (const auto& s : res.states) states.push_back(to_json(s));
    traj["states"] = std::move(states);
    traj["el_residual"] = res.el_residual;
    traj["energy_drift"] = res.energy_drift;
    traj["accepted_steps"] = res.accepted_steps;
    traj["rejected_steps"] = res.rejected_steps;
    report["geodesic"] = std::move(traj);
    report["errors"] = json::array();
  } catch (const DegenerateMetricError& e) {
    report["errors"] = json::array({{{"message", e.what()}}});
    code = 3;
  } catch (const DomainError& e) {
    report["errors"] = json::array({{{"message", e.what()}}});
    code = 3;
  }

  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  report["meta"] = meta_json(cfg, wall);
  return RunResult{report.dump(2) + "\n", code};
}

}  // namespace nholo
