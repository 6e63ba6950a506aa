#include "tlsurf/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "tlsurf/canonical.hpp"
#include "tlsurf/expr.hpp"
#include "tlsurf/invariants.hpp"
#include "tlsurf/io.hpp"
#include "tlsurf/pde.hpp"
#include "tlsurf/reconstruct.hpp"
#include "tlsurf/surface.hpp"

namespace tlsurf::cli {

using Json = nlohmann::ordered_json;

void RunConfig::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0)) throw Error(ErrorCode::InvalidInput, fmt::format("{} must be positive", name));
  };
  positive(canonical_tolerance, "canonical tolerance");
  positive(cross_variation_tolerance, "cross-variation tolerance");
  positive(drift_limit, "drift limit");
  positive(closure_limit, "closure limit");
  if (grid && ((*grid)[0] < 2 || (*grid)[1] < 2)) {
    throw Error(ErrorCode::InvalidInput, "grid sizes must be at least 2");
  }
  if (domain && (!((*domain)[1] > (*domain)[0]) || !((*domain)[3] > (*domain)[2]))) {
    throw Error(ErrorCode::InvalidInput, "domain ranges must be increasing");
  }
  if (branch != "+" && branch != "-") throw Error(ErrorCode::InvalidInput, "branch must be + or -");
  const bool surface_cmd = subcommand == "analyze" || subcommand == "invariants" ||
                           subcommand == "canonical";
  if (surface_cmd && inputs.size() != 1) {
    throw Error(ErrorCode::InvalidInput, fmt::format("{} takes exactly one surface file", subcommand));
  }
  if (subcommand == "reconstruct") {
    if (invariants_path.empty() == kh_path.empty()) {
      throw Error(ErrorCode::InvalidInput, "reconstruct needs exactly one of --invariants, --kh");
    }
    if (!base) throw Error(ErrorCode::InvalidInput, "reconstruct needs --base u0,v0");
  }
  if (subcommand == "solve-cosh-gordon") {
    if (!domain || !grid) throw Error(ErrorCode::InvalidInput, "solve-cosh-gordon needs --domain and --grid");
    if ((*domain)[0] != 0.0 || (*domain)[2] != 0.0) {
      throw Error(ErrorCode::InvalidInput, "the Goursat domain must be 0,U,0,V");
    }
    if (bu.empty() || bv.empty()) throw Error(ErrorCode::InvalidInput, "solve-cosh-gordon needs --bu and --bv");
  }
  if (subcommand == "compare") {
    if (inputs.size() != 2) throw Error(ErrorCode::InvalidInput, "compare takes two OBJ files");
    if (frames.empty()) throw Error(ErrorCode::InvalidInput, "compare needs --frames fa.json,fb.json");
  }
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::ArityMismatch:
    case ErrorCode::DomainError:
    case ErrorCode::FrameIncompatible:
    case ErrorCode::CrossVariationTooLarge:
    case ErrorCode::IntegrabilityViolated:
    case ErrorCode::Incompatible:
      return kExitInvalid;
    case ErrorCode::DegeneratePoint:
    case ErrorCode::LightLikeNormal:
    case ErrorCode::SingularMetric:
    case ErrorCode::NotAsymptotic:
    case ErrorCode::WrongSignature:
    case ErrorCode::DegenerateDenominator:
    case ErrorCode::MethodNotApplicable:
    case ErrorCode::AllNodesMasked:
    case ErrorCode::NonPositiveK:
      return kExitNotApplicable;
    case ErrorCode::NonPositiveGauge:
    case ErrorCode::InterpolationOutOfRange:
    case ErrorCode::NonPositiveResult:
    case ErrorCode::StepTooCoarse:
    case ErrorCode::GramDriftExceeded:
    case ErrorCode::ClosureExceeded:
    case ErrorCode::Divergence:
      return kExitNumerical;
  }
  return kExitNumerical;
}

namespace {

std::vector<double> split_numbers(const std::string& text, std::size_t count, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const Expr e = parse(item);
    if (e.depends_on_parameters()) {
      throw Error(ErrorCode::InvalidInput, fmt::format("{}: '{}' is not a constant", what, item));
    }
    out.push_back(eval(e, 0.0, 0.0));
  }
  if (out.size() != count) {
    throw Error(ErrorCode::InvalidInput, fmt::format("{} expects {} comma-separated values", what, count));
  }
  return out;
}

Json config_json(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  j["inputs"] = c.inputs;
  j["domain"] = c.domain ? Json(*c.domain) : Json(nullptr);
  j["grid"] = c.grid ? Json(*c.grid) : Json(nullptr);
  j["base"] = c.base ? Json::array({c.base->first, c.base->second}) : Json(nullptr);
  j["branch"] = c.branch;
  j["apply"] = c.apply;
  j["invariants"] = c.invariants_path;
  j["kh"] = c.kh_path;
  j["truth"] = c.truth_path;
  j["frames"] = c.frames;
  j["bu"] = c.bu;
  j["bv"] = c.bv;
  j["report"] = c.report_path;
  j["csv"] = c.csv_path;
  j["kh_out"] = c.kh_out_path;
  j["obj"] = c.obj_path;
  j["frame_out"] = c.frame_out_path;
  j["map"] = c.map_path;
  j["canonical_tolerance"] = c.canonical_tolerance;
  j["cross_variation_tolerance"] = c.cross_variation_tolerance;
  j["drift_limit"] = c.drift_limit;
  j["closure_limit"] = c.closure_limit;
  j["reorthonormalize_every"] = c.reorthonormalize_every;
  j["timings"] = c.timings;
  return j;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json vec_json(const MVec3& v) { return Json::array({number(v.x1), number(v.x2), number(v.x3)}); }

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidInput, fmt::format("cannot write '{}'", path));
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::InvalidInput, fmt::format("cannot open '{}'", path));
  return is;
}

class Timer {
 public:
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    laps_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  Json json() const { return laps_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  Json laps_ = Json::object();
};

struct Context {
  const RunConfig& cfg;
  std::ostream& err;
  Json report;
  Timer timer;
  std::vector<std::string> warnings;
};

SurfaceDef load_surface(Context& ctx, const std::string& path) {
  SurfaceFile sf = read_surface_file(path);
  for (auto& w : sf.warnings) ctx.warnings.push_back(fmt::format("{}: {}", path, w));
  SurfaceDef& s = sf.def;
  const RunConfig& c = ctx.cfg;
  if (c.domain) {
    s.grid.u_min = (*c.domain)[0];
    s.grid.u_max = (*c.domain)[1];
    s.grid.v_min = (*c.domain)[2];
    s.grid.v_max = (*c.domain)[3];
  }
  if (c.grid) {
    s.grid.nu = (*c.grid)[0];
    s.grid.nv = (*c.grid)[1];
  }
  if (c.base) {
    s.u0 = c.base->first;
    s.v0 = c.base->second;
  }
  if (c.domain && !c.base) {
    s.u0 = 0.5 * (s.grid.u_min + s.grid.u_max);
    s.v0 = 0.5 * (s.grid.v_min + s.grid.v_max);
  }
  s.validate();
  if (!s.grid.u_node(s.u0) || !s.grid.v_node(s.v0)) {
    const double u = s.grid.u(s.grid.nearest_u_node(s.u0));
    const double v = s.grid.v(s.grid.nearest_v_node(s.v0));
    ctx.warnings.push_back(
        fmt::format("base ({}, {}) moved to the nearest grid node ({}, {})", s.u0, s.v0, u, v));
    s.u0 = u;
    s.v0 = v;
  }
  return s;
}

Json extrema_json(const Extrema& e) { return Json{{"min", number(e.min)}, {"max", number(e.max)}}; }

Json class_json(const ClassReport& r) {
  Json j;
  j["surface_type"] = r.surface_type;
  j["K_sign"] = to_string(r.K_sign);
  j["K_minus_H2_sign"] = to_string(r.K_minus_H2_sign);
  j["asymptotic"] = r.asymptotic;
  j["principal"] = r.principal;
  j["isotropic"] = r.isotropic;
  j["E_positive"] = r.E_positive;
  j["G_negative"] = r.G_negative;
  j["method_applicable"] = r.method_applicable;
  j["scale"] = number(r.scale);
  j["extrema"] = Json{{"E", extrema_json(r.E)},         {"F", extrema_json(r.F)},
                      {"G", extrema_json(r.G)},         {"L", extrema_json(r.L)},
                      {"M", extrema_json(r.M)},         {"N", extrema_json(r.N)},
                      {"K", extrema_json(r.K)},         {"H", extrema_json(r.H)},
                      {"K_minus_H2", extrema_json(r.K_minus_H2)}};
  j["E_sign_changes"] = r.E_sign_changes;
  j["G_sign_changes"] = r.G_sign_changes;
  j["reasons"] = r.reasons;
  Json f = Json::array();
  for (const auto& p : r.failures) {
    f.push_back(Json{{"i", p.node.i}, {"j", p.node.j}, {"u", p.u}, {"v", p.v}, {"message", p.message}});
  }
  j["failures"] = f;
  return j;
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? sep : "") + xs[k];
  return out;
}

int cmd_analyze(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const SurfaceDef s = load_surface(ctx, c.inputs[0]);
  const GridSpec& g = s.grid;
  const ClassReport r = classify_patch(s);
  ctx.timer.mark("classify");
  ctx.report["result"] = Json{{"classification", class_json(r)}};

  if (!c.csv_path.empty() || !c.kh_out_path.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ScalarGrid> cols(8, ScalarGrid(g, nan));
    for (std::size_t j = 0; j < g.nv; ++j)
      for (std::size_t i = 0; i < g.nu; ++i) {
        try {
          const FormCoefficients f = forms_at(s, g.u(i), g.v(j));
          const CurvaturePair k = curvatures(f);
          const double vals[] = {f.E, f.F, f.G, f.L, f.M, f.N, k.K, k.H};
          for (std::size_t q = 0; q < 8; ++q) cols[q](i, j) = vals[q];
        } catch (const Error&) {
          // left as NaN
        }
      }
    if (!c.csv_path.empty()) {
      auto os = open_out(c.csv_path);
      write_grid_csv(os, g, {"E", "F", "G", "L", "M", "N", "K", "H"},
                     {&cols[0], &cols[1], &cols[2], &cols[3], &cols[4], &cols[5], &cols[6], &cols[7]});
    }
    if (!c.kh_out_path.empty()) {
      auto os = open_out(c.kh_out_path);
      write_kh_csv(os, cols[6], cols[7]);
    }
  }
  if (!c.obj_path.empty()) {
    auto os = open_out(c.obj_path);
    write_obj(os, sample_positions(s));
  }
  if (!c.frame_out_path.empty()) {
    const GridIndex b = s.base_index();
    FrameRecord fr;
    fr.base_vertex = g.index(b.i, b.j);
    fr.z0 = sample_positions(s)(b);
    fr.frame = asymptotic_frame_at(s, s.u0, s.v0);
    auto os = open_out(c.frame_out_path);
    write_frame_json(os, fr);
  }
  ctx.timer.mark("outputs");
  if (!r.method_applicable) {
    throw Error(ErrorCode::MethodNotApplicable,
                fmt::format("method not applicable: {}", join(r.reasons, "; ")));
  }
  return kExitOk;
}

Json residual_json(const InvariantField& fld) {
  return Json{{"gauss", number(gauss_residual(fld).max_abs())},
              {"codazzi", number(codazzi_residual(fld).max_abs())},
              {"system", number(system_residual(fld).max_abs())}};
}

int cmd_invariants(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const SurfaceDef s = load_surface(ctx, c.inputs[0]);
  const InvariantField fld = build_invariant_field(s);
  ctx.timer.mark("field");
  ctx.report["residuals"] = residual_json(fld);
  ctx.timer.mark("residuals");
  double cross = 0.0;
  for (const auto& p : fld.points()) cross = std::max(cross, p.gamma_crosscheck);
  ctx.report["result"] = Json{{"alpha_sign", fld.alpha_sign()},
                              {"gamma_crosscheck", number(cross)},
                              {"nodes", fld.grid().size()}};
  if (!c.csv_path.empty()) {
    auto os = open_out(c.csv_path);
    write_invariants_csv(os, fld);
  }
  return kExitOk;
}

Json gauge_json(const GaugePair& gp) {
  auto range = [](const std::vector<double>& xs) {
    return Json{{"min", *std::min_element(xs.begin(), xs.end())},
                {"max", *std::max_element(xs.begin(), xs.end())}};
  };
  return Json{{"phi", range(gp.phi)},
              {"psi", range(gp.psi)},
              {"cross_variation", number(gp.cross_variation)},
              {"base", Json::array({gp.u0, gp.v0})}};
}

int cmd_canonical(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const SurfaceDef s = load_surface(ctx, c.inputs[0]);
  const InvariantField fld = build_invariant_field(s);
  ctx.timer.mark("field");
  GaugeOptions go;
  go.cross_variation_tolerance = c.cross_variation_tolerance;
  const GaugePair gp = gauge_functions(fld, s.u0, s.v0, go);
  double dev = 0.0;
  for (double x : gp.phi) dev = std::max(dev, std::abs(x - 1.0));
  for (double x : gp.psi) dev = std::max(dev, std::abs(x - 1.0));
  ctx.timer.mark("gauge");
  Json res{{"gauge", gauge_json(gp)},
           {"deviation", dev},
           {"canonical", dev < c.canonical_tolerance},
           {"note", "canonical parameters are fixed up to the orientation-preserving "
                    "representative; shifts of u and v remain free"}};
  ctx.report["residuals"] = Json{{"cross_variation", number(gp.cross_variation)}};
  if (c.apply) {
    const CanonicalResult cr = canonicalize(fld, s.u0, s.v0, go);
    const Canonicity after = is_canonical(cr.field, s.u0, s.v0, c.canonical_tolerance, go);
    ctx.timer.mark("canonicalize");
    const GridSpec& og = cr.field.grid();
    res["applied"] = Json{{"deviation", after.deviation},
                          {"canonical", after.canonical},
                          {"domain", Json::array({og.u_min, og.u_max, og.v_min, og.v_max})}};
    if (!c.csv_path.empty()) {
      auto os = open_out(c.csv_path);
      write_invariants_csv(os, cr.field);
    }
    if (!c.map_path.empty()) {
      auto os = open_out(c.map_path);
      write_reparam_csv(os, cr.map);
    }
  }
  ctx.report["result"] = res;
  return kExitOk;
}

GridIndex base_on(const GridSpec& g, Context& ctx) {
  const auto [u0, v0] = *ctx.cfg.base;
  if (u0 < g.u_min || u0 > g.u_max || v0 < g.v_min || v0 > g.v_max) {
    throw Error(ErrorCode::InvalidInput, fmt::format("base ({}, {}) outside the data domain", u0, v0));
  }
  auto i = g.u_node(u0);
  auto j = g.v_node(v0);
  if (!i || !j) {
    GridIndex b{g.nearest_u_node(u0), g.nearest_v_node(v0)};
    ctx.warnings.push_back(fmt::format("base ({}, {}) moved to the nearest grid node ({}, {})", u0,
                                       v0, g.u(b.i), g.v(b.j)));
    return b;
  }
  return {*i, *j};
}

int cmd_reconstruct(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  ReconstructOptions opts;
  opts.frames.drift_limit = c.drift_limit;
  opts.frames.reorthonormalize_every = c.reorthonormalize_every;
  opts.closure_limit = c.closure_limit;

  Reconstruction rec;
  GridSpec g;
  GridIndex base;
  std::optional<std::pair<ScalarGrid, ScalarGrid>> kh;
  if (!c.kh_path.empty()) {
    auto is = open_in(c.kh_path);
    kh = read_kh_csv(is);
    g = kh->first.spec();
    base = base_on(g, ctx);
    ctx.timer.mark("read");
    rec = reconstruct_from_kh(kh->first, kh->second,
                              c.branch == "+" ? Branch::Plus : Branch::Minus, base, opts);
  } else {
    auto is = open_in(c.invariants_path);
    const InvariantField fld = read_invariants_csv(is);
    g = fld.grid();
    base = base_on(g, ctx);
    ctx.timer.mark("read");
    rec = reconstruct_from_invariants(fld, base, opts);
  }
  ctx.timer.mark("reconstruct");
  const ReconstructDiagnostics& d = rec.diagnostics;
  for (const auto& w : d.warnings) ctx.warnings.push_back(w);
  ctx.report["residuals"] = Json{{"phi", number(d.phi_residual)},
                                 {"psi", number(d.psi_residual)},
                                 {"gauss", number(d.gauss)},
                                 {"codazzi1", number(d.codazzi1)},
                                 {"codazzi2", number(d.codazzi2)},
                                 {"masked_nodes", d.masked},
                                 {"integrability", number(d.integrability)}};
  ctx.report["drift"] = number(d.drift);
  ctx.report["closure"] = number(d.closure);
  Json res{{"route", d.route}, {"nodes", g.size()}, {"base_vertex", g.index(base.i, base.j)}};

  if (kh) {
    const SampledCurvatures sc = curvatures_from_positions(rec.patch.z);
    double dk = 0.0, dh = 0.0;
    for (std::size_t j = 0; j < g.nv; ++j)
      for (std::size_t i = 0; i < g.nu; ++i) {
        if (!sc.K.has(i, j)) continue;
        dk = std::max(dk, std::abs(sc.K.values(i, j) - kh->first(i, j)));
        dh = std::max(dh, std::abs(sc.H.values(i, j) - kh->second(i, j)));
      }
    res["recomputed_kh_error"] = Json{{"K", dk}, {"H", dh}};
  }
  if (!c.truth_path.empty()) {
    SurfaceFile tf = read_surface_file(c.truth_path);
    SurfaceDef t = tf.def;
    t.grid = g;
    t.u0 = g.u(base.i);
    t.v0 = g.v(base.j);
    SurfacePatch truth;
    truth.z = sample_positions(t);
    truth.base = base;
    truth.base_frame = asymptotic_frame_at(t, t.u0, t.v0);
    truth.provenance = "expressions";
    const MotionComparison mc = compare_up_to_motion(rec.patch, truth);
    ctx.report["rms"] = mc.rms;
    ctx.timer.mark("truth");
  }
  if (!c.obj_path.empty()) {
    auto os = open_out(c.obj_path);
    write_obj(os, rec.patch.z);
  }
  if (!c.frame_out_path.empty()) {
    FrameRecord fr{g.index(base.i, base.j), rec.patch.z(base), rec.patch.base_frame};
    auto os = open_out(c.frame_out_path);
    write_frame_json(os, fr);
  }
  ctx.report["result"] = res;
  return kExitOk;
}

int cmd_cosh_gordon(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Expr bu = parse(c.bu), bv = parse(c.bv);
  const GoursatProblem p = GoursatProblem::from_expressions((*c.domain)[1], (*c.domain)[3],
                                                            (*c.grid)[0], (*c.grid)[1], bu, bv);
  const ScalarGrid w = solve_cosh_gordon(p);
  ctx.timer.mark("solve");
  const MaskedGrid r = cosh_gordon_residual(w);
  ScalarGrid a(w.spec());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < w.data().size(); ++k) {
    a.data()[k] = std::sinh(w.data()[k]);
    lo = std::min(lo, w.data()[k]);
    hi = std::max(hi, w.data()[k]);
  }
  ctx.report["residuals"] = Json{{"cosh_gordon", number(r.max_abs())},
                                 {"constant_k", number(constant_k_residual(a).max_abs())}};
  ctx.report["result"] = Json{{"omega", Json{{"min", lo}, {"max", hi}}}};
  if (!c.csv_path.empty()) {
    auto os = open_out(c.csv_path);
    write_omega_csv(os, w);
  }
  return kExitOk;
}

int cmd_compare(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const auto comma = c.frames.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::InvalidInput, "--frames expects fa.json,fb.json");
  std::vector<MVec3> va, vb;
  {
    auto is = open_in(c.inputs[0]);
    va = read_obj_vertices(is);
  }
  {
    auto is = open_in(c.inputs[1]);
    vb = read_obj_vertices(is);
  }
  if (va.size() != vb.size() || va.empty()) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("meshes have {} and {} vertices", va.size(), vb.size()));
  }
  FrameRecord fa, fb;
  {
    auto is = open_in(c.frames.substr(0, comma));
    fa = read_frame_json(is);
  }
  {
    auto is = open_in(c.frames.substr(comma + 1));
    fb = read_frame_json(is);
  }
  if (fa.base_vertex >= va.size() || fb.base_vertex >= vb.size()) {
    throw Error(ErrorCode::InvalidInput, "frame base vertex outside the mesh");
  }
  const LorentzMotion m = motion_from_frames(fa.frame, va[fa.base_vertex], fb.frame, vb[fb.base_vertex]);
  double sum = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) {
    const double d = euclidean_norm(m(va[k]) - vb[k]);
    sum += d * d;
  }
  const double rms = std::sqrt(sum / static_cast<double>(va.size()));
  ctx.report["rms"] = rms;
  Json A = Json::array();
  for (int r = 0; r < 3; ++r) A.push_back(vec_json(m.A.row(r)));
  ctx.report["result"] = Json{{"motion", Json{{"A", A}, {"b", vec_json(m.b)}}},
                              {"metric_defect", m.metric_defect()},
                              {"vertices", va.size()}};
  return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Context ctx{cfg, err, Json{}, Timer{}, {}};
  ctx.report["config"] = config_json(cfg);
  ctx.report["status"] = "ok";
  ctx.report["residuals"] = Json::object();
  ctx.report["drift"] = nullptr;
  ctx.report["closure"] = nullptr;
  ctx.report["rms"] = nullptr;
  ctx.report["timings"] = nullptr;
  int code = kExitOk;
  try {
    cfg.validate();
    if (cfg.subcommand == "analyze") code = cmd_analyze(ctx);
    else if (cfg.subcommand == "invariants") code = cmd_invariants(ctx);
    else if (cfg.subcommand == "canonical") code = cmd_canonical(ctx);
    else if (cfg.subcommand == "reconstruct") code = cmd_reconstruct(ctx);
    else if (cfg.subcommand == "solve-cosh-gordon") code = cmd_cosh_gordon(ctx);
    else if (cfg.subcommand == "compare") code = cmd_compare(ctx);
    else throw Error(ErrorCode::InvalidInput, fmt::format("unknown subcommand '{}'", cfg.subcommand));
  } catch (const Error& e) {
    code = exit_code(e.code());
    Json detail{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) detail["position"] = pe->position();
    ctx.report["status"] = "error";
    ctx.report["error"] = detail;
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
  } catch (const std::exception& e) {
    code = kExitNumerical;
    ctx.report["status"] = "error";
    ctx.report["error"] = Json{{"code", "Internal"}, {"message", e.what()}};
    err << "error: " << e.what() << '\n';
  }
  ctx.report["exit_code"] = code;
  ctx.report["warnings"] = ctx.warnings;
  for (const auto& w : ctx.warnings) err << "warning: " << w << '\n';
  if (cfg.timings) ctx.report["timings"] = ctx.timer.json();

  const std::string text = ctx.report.dump(2) + "\n";
  if (cfg.report_path.empty()) {
    out << text;
  } else {
    std::ofstream os(cfg.report_path);
    if (!os) {
      err << "error: cannot write '" << cfg.report_path << "'\n";
      return code == kExitOk ? kExitInvalid : code;
    }
    os << text;
  }
  return code;
}

ParsedArgs parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-like surfaces in Minkowski 3-space: invariants, canonical parameters and "
               "reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  std::string domain, grid, base;
  app.add_option("--report", cfg.report_path, "JSON report path (default stdout)");
  app.add_flag("--timings", cfg.timings, "Record stage timings in the report");

  auto surface_opts = [&](CLI::App* sub) {
    sub->add_option("surface", cfg.inputs, "Surface file")->required()->expected(1);
    sub->add_option("--domain", domain, "u_min,u_max,v_min,v_max");
    sub->add_option("--grid", grid, "Nu,Nv");
    sub->add_option("--base", base, "u0,v0");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Forms, curvatures and classification");
  surface_opts(analyze);
  analyze->add_option("--csv", cfg.csv_path, "Forms and curvature CSV");
  analyze->add_option("--kh", cfg.kh_out_path, "K, H CSV");
  analyze->add_option("--obj", cfg.obj_path, "Sampled surface mesh");
  analyze->add_option("--frame-out", cfg.frame_out_path, "Base frame JSON");

  CLI::App* inv = app.add_subcommand("invariants", "Asymptotic invariants and residuals");
  surface_opts(inv);
  inv->add_option("--csv", cfg.csv_path, "Invariant field CSV");

  CLI::App* can = app.add_subcommand("canonical", "Gauge functions and canonical parameters");
  surface_opts(can);
  can->add_flag("--apply", cfg.apply, "Reparametrize to canonical parameters");
  can->add_option("--csv", cfg.csv_path, "Canonical field CSV (with --apply)");
  can->add_option("--map", cfg.map_path, "Parameter map CSV (with --apply)");
  can->add_option("--tol", cfg.canonical_tolerance, "Canonicity tolerance");
  can->add_option("--cross-tol", cfg.cross_variation_tolerance, "Cross-variation tolerance");

  CLI::App* rec = app.add_subcommand("reconstruct", "Surface from invariants or (K, H)");
  rec->add_option("--invariants", cfg.invariants_path, "Invariant field CSV");
  rec->add_option("--kh", cfg.kh_path, "K, H CSV");
  rec->add_option("--base", base, "u0,v0")->required();
  rec->add_option("--branch", cfg.branch, "+ or -");
  rec->add_option("--obj", cfg.obj_path, "Output mesh");
  rec->add_option("--truth", cfg.truth_path, "Surface file to compare against");
  rec->add_option("--frame-out", cfg.frame_out_path, "Base frame JSON");
  rec->add_option("--drift-limit", cfg.drift_limit, "Gram drift limit");
  rec->add_option("--closure-limit", cfg.closure_limit, "Closure limit relative to the diameter");
  rec->add_option("--reorthonormalize", cfg.reorthonormalize_every,
                  "Gram-Schmidt every N steps (0 = off)");

  CLI::App* cg = app.add_subcommand("solve-cosh-gordon", "Goursat problem for omega_uv + cosh omega = 0");
  cg->add_option("--domain", domain, "0,U,0,V")->required();
  cg->add_option("--grid", grid, "Nu,Nv")->required();
  cg->add_option("--bu", cfg.bu, "omega(u, 0) as an expression in u")->required();
  cg->add_option("--bv", cfg.bv, "omega(0, v) as an expression in v")->required();
  cg->add_option("--csv", cfg.csv_path, "omega CSV");

  CLI::App* cmp = app.add_subcommand("compare", "Distance of two meshes up to a Lorentz motion");
  cmp->add_option("meshes", cfg.inputs, "a.obj b.obj")->required()->expected(2);
  cmp->add_option("--frames", cfg.frames, "fa.json,fb.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return {std::nullopt, rc == 0 ? kExitOk : kExitInvalid};
  }
  for (CLI::App* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  try {
    if (!domain.empty()) {
      const auto d = split_numbers(domain, 4, "--domain");
      cfg.domain = std::array<double, 4>{d[0], d[1], d[2], d[3]};
    }
    if (!grid.empty()) {
      const auto n = split_numbers(grid, 2, "--grid");
      for (double x : n) {
        if (!(x >= 2.0) || x != std::floor(x) || x > 1e7) {
          throw Error(ErrorCode::InvalidInput, "--grid sizes must be integers >= 2");
        }
      }
      cfg.grid = std::array<std::size_t, 2>{static_cast<std::size_t>(n[0]),
                                            static_cast<std::size_t>(n[1])};
    }
    if (!base.empty()) {
      const auto b = split_numbers(base, 2, "--base");
      cfg.base = std::make_pair(b[0], b[1]);
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return {std::nullopt, kExitInvalid};
  }
  return {cfg, kExitOk};
}

int main_entry(int argc, const char* const* argv) {
  const ParsedArgs pa = parse_args(argc, argv, std::cout, std::cerr);
  if (!pa.config) return pa.exit;
  return run(*pa.config, std::cout, std::cerr);
}

}  // namespace tlsurf::cli
