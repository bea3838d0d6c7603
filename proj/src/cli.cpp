#include "gnsforge/cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "gnsforge/identities.hpp"

namespace gnsforge::cli {

namespace {

constexpr std::size_t kMinN = std::size_t{1} << 6;
constexpr std::size_t kMaxN = std::size_t{1} << 15;
// Finest identity grid; beyond it fourth derivatives approach rounding.
constexpr std::size_t kFinestVerify = 2048;
constexpr std::size_t kCoarsestVerify = 256;
constexpr Real kMinOrder = 1.8L;
// Threshold on the relative Euler-Lagrange residuals used to flag a closed-form
// profile as critical. The ball branch carries an O(h^2) measure residual of
// about 3e-5 at N = 4096, while non-critical k give residuals of order 0.1.
constexpr Real kCritTol = 1e-3L;
// Closed-form profiles have power-law omega_k tails; only the integral
// multipliers see the truncation.
constexpr Real kExtremalTailTol = 1e-5L;

std::string fmt(Real x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(x));
  return buf;
}

// JSON numbers are doubles; non-finite values become null.
Json num(Real x) {
  if (!std::isfinite(x)) return nullptr;
  return static_cast<double>(x);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* to_string(Format f) { return f == Format::json ? "json" : "csv"; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Flattened key,value lines for single-run reports in CSV form.
std::string flat_csv(const Json& j) {
  std::string out = "key,value\n";
  const Json flat = j.flatten();
  for (const auto& [key, value] : flat.items()) {
    const std::string v = value.is_string() ? value.get<std::string>() : value.dump();
    out += csv_quote(key) + "," + csv_quote(v) + "\n";
  }
  return out;
}

// "# key=value" preamble lines carrying the run metadata in CSV output.
std::string comment_block(const Json& j, const std::string& prefix) {
  std::string out;
  for (const auto& [key, value] : j.items())
    out += "# " + prefix + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  return out;
}

std::string render(const RunConfig& cfg, const Json& j) {
  return cfg.format == Format::json ? dump(j) : flat_csv(j);
}

Json residuals_json(const ResidualReport& r) {
  Json j;
  j["lambda_integral"] = num(r.integral.lambda);
  j["mu_integral"] = num(r.integral.mu);
  j["lambda_tractor"] = num(r.tractor.lambda);
  j["mu_tractor"] = num(r.tractor.mu);
  j["res_conformal"] = num(r.conformal);
  j["res_measure"] = num(r.measure);
  j["res_metric"] = num(r.metric);
  return j;
}

Json exponents_json(const ExponentSet& e) {
  Json j;
  j["p_f"] = num(e.p_f);
  j["q_f"] = num(e.q_f);
  j["p_leb"] = num(e.p_leb);
  j["q_leb"] = num(e.q_leb);
  j["theta"] = num(e.theta);
  j["const_power"] = num(e.const_power);
  return j;
}

Json header(const RunConfig& cfg, const SMMS& s) {
  Json j;
  j["command"] = cfg.command;
  j["config"] = config_json(cfg);
  j["grid"] = grid_json(*s.grid());
  return j;
}

GnsParams params_of(const RunConfig& cfg, Real k) { return {cfg.n, cfg.m, k}; }

}  // namespace

void RunConfig::validate() const {
  if (command != "constant" && command != "extremal" && command != "verify" &&
      command != "sweep")
    fail(ErrorKind::parameter, "unknown command '" + command + "'");
  if (N < kMinN || N > kMaxN || (N & (N - 1)) != 0)
    fail(ErrorKind::parameter, "N must be a power of two between 64 and 32768");
  if (model == Model::custom) fail(ErrorKind::parameter, "custom geometries are library-only");
  if (ks.empty()) fail(ErrorKind::parameter, "at least one k is required");
  if (command != "sweep" && ks.size() != 1)
    fail(ErrorKind::parameter, "a list of k values is only accepted by sweep");
  validate_dimension(n, m);
  // Sweep rows validate k individually.
  if (command != "sweep" && command != "verify") params_of(*this, ks[0]).validate();
  if (scale && !(*scale > 0)) fail(ErrorKind::parameter, "scale must be positive");
  if (!(tail_tol > 0)) fail(ErrorKind::parameter, "tail tolerance must be positive");
  if (max_iters < 1) fail(ErrorKind::parameter, "max-iters must be positive");
}

Domain RunConfig::resolved_domain() const {
  if (domain) return *domain;
  switch (model) {
    case Model::sphere: return Domain::pole_to_pole;
    case Model::hyperbolic: return Domain::unit_ball;
    default: return m < 0 ? Domain::unit_ball : Domain::half_line;
  }
}

Real RunConfig::resolved_scale() const {
  if (scale) return *scale;
  switch (model) {
    case Model::sphere: return kPi;
    case Model::hyperbolic: return 10;
    default: return 1;
  }
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.seed = seed;
  o.tail_tol = tail_tol;
  o.max_iters = max_iters;
  o.warm_start = warm_start;
  return o;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::divergence: return kDivergence;
    case ErrorKind::nonconvergence: return kNonconvergence;
    case ErrorKind::precondition: return kVerification;
    default: return kParameter;
  }
}

SMMS build_smms(const RunConfig& cfg) {
  const GridPtr grid = make_grid(cfg.resolved_domain(), cfg.N, cfg.resolved_scale());
  const WarpedGeometry g = make_geometry(cfg.model, cfg.n, grid);
  return make_smms(g, RadialField::constant(grid, 1), cfg.m);
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["model"] = gnsforge::to_string(cfg.model);
  j["n"] = cfg.n;
  j["m"] = num(cfg.m);
  Json ks = Json::array();
  for (Real k : cfg.ks) ks.push_back(num(k));
  j["k"] = ks;
  j["domain"] = gnsforge::to_string(cfg.resolved_domain());
  j["N"] = cfg.N;
  j["scale"] = num(cfg.resolved_scale());
  j["seed"] = cfg.seed;
  j["tail_tol"] = num(cfg.tail_tol);
  j["max_iters"] = cfg.max_iters;
  j["warm_start"] = cfg.warm_start;
  j["format"] = to_string(cfg.format);
  return j;
}

Json grid_json(const RadialGrid& grid) {
  Json j;
  j["domain"] = gnsforge::to_string(grid.domain());
  j["N"] = grid.size();
  j["scale"] = num(grid.scale());
  j["h"] = num(grid.h());
  j["r_first"] = num(grid.r().front());
  j["r_last"] = num(grid.r().back());
  j["outer_radius"] = num(grid.outer_radius());
  const Window w = default_window(grid);
  j["window"] = {w.lo, w.hi};
  return j;
}

CommandResult cmd_constant(const RunConfig& cfg) {
  cfg.validate();
  const SMMS s = build_smms(cfg);
  const Real k = cfg.ks[0];
  const ExponentSet ex = exponents(params_of(cfg, k));
  const MinimizeResult r = minimize(s, k, cfg.solver_options());

  Json j = header(cfg, s);
  j["exponents"] = exponents_json(ex);
  j["sigma"] = num(r.sigma);
  j["gns_constant"] = num(std::pow(r.sigma, ex.const_power));
  j["initial_q"] = num(r.initial_q);
  j["iterations"] = r.iterations;
  j["grad_norm"] = num(r.grad_norm);
  j["converged"] = r.converged;
  j["message"] = r.message;
  if (r.residuals)
    j["residuals"] = residuals_json(*r.residuals);
  else
    j["residuals"] = nullptr;
  j["residual_error"] = r.residual_error;

  CommandResult out;
  out.body = render(cfg, j);
  if (!r.converged) {
    out.code = kNonconvergence;
    out.warnings.push_back("minimizer did not converge: " + r.message);
  }
  if (!r.residual_error.empty()) out.warnings.push_back("residuals unavailable: " + r.residual_error);
  return out;
}

CommandResult cmd_extremal(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.model != Model::euclidean)
    fail(ErrorKind::parameter, "the closed-form extremal lives on Euclidean space");
  const SMMS s = build_smms(cfg);
  const Real k = cfg.ks[0];
  const GnsParams p = params_of(cfg, k);
  const ClosedFormExtremal dd =
      closed_form_extremal(p, p.ball_branch() ? Branch::ball_like : Branch::sphere_like, s.grid());

  const FunctionalValue q = qk(s, k, dd.w, cfg.tail_tol);
  const ResidualReport rep = residual_report(s, k, dd.w, cfg.tail_tol);
  const MultiplierFields tf = tractor_multipliers(s, k, dd.u);
  const Window win = default_window(*s.grid());
  auto spread = [&](const RadialField& f, Real mean) {
    return sup_norm(f - mean, win) / std::max(std::fabs(mean), Real(1e-300));
  };
  const Real crit = sup_norm(crit_identity_residual(s, k, dd.u, rep.tractor), win);
  const TrichotomyReport tri = qe_trichotomy(s, k, dd.u);

  Json j = header(cfg, s);
  j["exponents"] = exponents_json(exponents(p));
  j["branch"] = p.ball_branch() ? "ball" : "sphere";
  j["qk"] = num(q.qk);
  j["energy"] = num(q.energy);
  j["omega0"] = num(q.omega0);
  j["omegak"] = num(q.omegak);
  j["residuals"] = residuals_json(rep);
  j["tractor_lambda_spread"] = num(spread(tf.lambda, rep.tractor.lambda));
  j["tractor_mu_spread"] = num(spread(tf.mu, rep.tractor.mu));
  j["crit_identity_residual"] = num(crit);
  j["conformal_critical"] = rep.conformal <= kCritTol;
  j["measure_critical"] = rep.measure <= kCritTol;
  Json t;
  t["classification"] = gnsforge::to_string(tri.classification);
  t["matches"] = tri.matches;
  t["a"] = num(tri.a);
  t["b"] = num(tri.b);
  t["c"] = num(tri.c);
  t["quad_residual"] = num(tri.quad_residual);
  t["lambda"] = num(tri.lambda);
  t["lu_sq"] = num(tri.lu_sq);
  t["lu_lv"] = num(tri.lu_lv);
  t["lv_sq"] = num(tri.lv_sq);
  t["norm_spread"] = num(tri.norm_spread);
  t["ratio_variation"] = num(tri.ratio_variation);
  t["note"] = tri.note;
  j["trichotomy"] = t;

  CommandResult out;
  out.body = render(cfg, j);
  if (rep.measure > kCritTol)
    out.warnings.push_back("measure residual " + fmt(rep.measure) +
                           " exceeds the criticality threshold");
  return out;
}

namespace {

using Fn = std::function<Real(Real)>;

struct Check {
  std::string name;
  // Residual on a grid of the given size.
  std::function<Real(std::size_t)> residual;
  // Extra condition evaluated on the finest grid; empty note when satisfied.
  std::function<std::string(std::size_t)> extra;
};

Fn random_rational(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(0.1, 0.6);
  const Real a = d(rng), b = d(rng), c = d(rng);
  return [a, b, c](Real r) {
    const Real x = r * r;
    return (1 + a * x + b * c * x * x) / (1 + c * x);
  };
}

Real einstein_constant(Model m) {
  switch (m) {
    case Model::sphere: return 1;
    case Model::hyperbolic: return -1;
    default: return 0;
  }
}

std::vector<Check> build_checks(const RunConfig& cfg) {
  const Model model = cfg.model;
  const int n = cfg.n;
  const Real m = cfg.m;
  const Domain domain = cfg.resolved_domain();
  const Real scale = cfg.resolved_scale();
  const bool sphere = model == Model::sphere;

  auto geom = [=](std::size_t N) { return make_geometry(model, n, make_grid(domain, N, scale)); };
  // Identity window: away from the far end of the half-line and the
  // hyperbolic wall, where the warp factor grows fastest.
  auto window = [=](const RadialGrid& g, Real rmin) {
    if (sphere) return default_window(g);
    return radial_window(g, rmin, model == Model::hyperbolic ? 5 : 10);
  };
  std::mt19937 rng(cfg.seed);
  const Fn u_rand = sphere ? Fn([](Real r) { return 1 + 0.3L * std::cos(r); }) : random_rational(rng);
  const Fn v_rand = m == 0 ? Fn([](Real) { return Real(1); })
                    : sphere ? Fn([](Real r) { return 1 + 0.2L * std::cos(r); })
                             : random_rational(rng);

  std::vector<Check> checks;
  checks.push_back({"covariance", [=](std::size_t N) {
                      const WarpedGeometry g = geom(N);
                      const SMMS s = make_smms(g, RadialField::from(g.grid(), v_rand), m);
                      const Fn sf = sphere ? Fn([](Real r) { return 0.3L * std::cos(r); })
                                           : Fn([](Real r) { return -std::log(1 + r * r) / 2; });
                      const Fn wf = sphere ? Fn([](Real r) { return 2 + std::cos(r); })
                                           : Fn([](Real r) { return (1 + 0.3L * std::cos(r)) / (1 + r * r); });
                      return covariance_check(s, RadialField::from(g.grid(), sf),
                                              RadialField::from(g.grid(), wf));
                    }, {}});

  static const char* const kParts[] = {"radial", "tangential", "scalar", "measure"};
  for (std::size_t part = 0; part < 4; ++part) {
    checks.push_back({std::string("smms_tractor_") + kParts[part], [=](std::size_t N) {
                        const WarpedGeometry g = geom(N);
                        const SMMS s = make_smms(g, RadialField::from(g.grid(), v_rand), m);
                        const SmmsTractorResiduals r = smms_tractor_check(s, RadialField::from(g.grid(), u_rand));
                        const RadialField* f[] = {&r.res1_rad, &r.res1_tan, &r.res2, &r.res3};
                        return sup_norm(*f[part], window(*g.grid(), 0));
                      }, {}});
  }

  const Fn u_obata = sphere ? Fn([](Real r) { return 1 + 0.3L * std::cos(r) + 0.1L * std::cos(2 * r); })
                     : model == Model::hyperbolic ? Fn([](Real r) { return std::cosh(r) + 0.5L; })
                                                  : Fn([](Real r) { return std::pow(1 + r * r, 2); });
  auto obata = [=](std::size_t N) {
    const WarpedGeometry g = geom(N);
    return obata_identity_residual(g, RadialField::from(g.grid(), u_obata),
                                   RadialField::constant(g.grid(), 1));
  };
  checks.push_back({"obata_identity",
                    [=](std::size_t N) {
                      const ObataResidual o = obata(N);
                      return sup_norm(o.residual, window(*o.residual.grid(), 0.1L));
                    },
                    [=](std::size_t N) {
                      const ObataResidual o = obata(N);
                      return o.rhs.max() <= 0 ? std::string() : "right-hand side changes sign";
                    }});

  const Real lambda_e = einstein_constant(model);
  const Fn u_tens = sphere ? Fn([](Real r) { return 1 + 0.3L * std::cos(r) + 0.1L * std::cos(2 * r); })
                    : model == Model::hyperbolic ? Fn([](Real r) { return std::cosh(r); })
                                                 : Fn([](Real r) { return std::pow(1 + r * r, 2); });
  checks.push_back({"obata_tensorial", [=](std::size_t N) {
                      const WarpedGeometry g = geom(N);
                      const RadialField res =
                          obata_tensorial_residual(g, lambda_e, RadialField::from(g.grid(), u_tens));
                      return sup_norm(res, window(*g.grid(), 0.1L));
                    }, {}});
  return checks;
}

}  // namespace

std::vector<VerifyRow> verify_suite(const RunConfig& cfg) {
  cfg.validate();
  const std::size_t finest = std::min(cfg.N / 2, kFinestVerify);
  const std::vector<std::size_t> levels{finest / 4, finest / 2, finest};
  const bool resolved = cfg.N / 8 >= kCoarsestVerify;

  std::vector<VerifyRow> rows;
  for (const Check& c : build_checks(cfg)) {
    VerifyRow row;
    row.name = c.name;
    row.residual = std::numeric_limits<Real>::quiet_NaN();
    row.order = std::numeric_limits<Real>::quiet_NaN();
    if (!resolved) {
      row.note = "insufficient resolution";
      rows.push_back(row);
      continue;
    }
    try {
      std::vector<Real> res;
      for (std::size_t N : levels) res.push_back(c.residual(N));
      row.residual = res.back();
      // Residuals at rounding level carry no order information.
      if (res.back() < 1e-12L) {
        row.pass = true;
        row.note = "exact to rounding";
      } else {
        row.order = std::log2(res[1] / res[2]);
        row.pass = row.order >= kMinOrder;
        if (!row.pass) row.note = "convergence order below " + fmt(kMinOrder);
      }
      if (c.extra) {
        const std::string extra = c.extra(finest);
        if (!extra.empty()) {
          row.pass = false;
          row.note = row.note.empty() ? extra : row.note + "; " + extra;
        }
      }
    } catch (const Error& e) {
      row.note = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

CommandResult cmd_verify(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<VerifyRow> rows = verify_suite(cfg);
  bool all = true;
  for (const VerifyRow& r : rows) all = all && r.pass;

  CommandResult out;
  out.code = all ? kOk : kVerification;
  for (const VerifyRow& r : rows)
    if (!r.pass) out.warnings.push_back(r.name + " failed: " + r.note);

  if (cfg.format == Format::csv) {
    std::string body = comment_block(config_json(cfg), "");
    body += "identity,residual,order,pass,note\n";
    for (const VerifyRow& r : rows)
      body += csv_quote(r.name) + "," + (std::isnan(r.residual) ? std::string() : fmt(r.residual)) + "," +
              (std::isnan(r.order) ? std::string() : fmt(r.order)) + "," +
              (r.pass ? "true" : "false") + "," + csv_quote(r.note) + "\n";
    out.body = body;
    return out;
  }
  Json j;
  j["command"] = cfg.command;
  j["config"] = config_json(cfg);
  const std::size_t finest = std::min(cfg.N / 2, kFinestVerify);
  j["levels"] = {finest / 4, finest / 2, finest};
  Json arr = Json::array();
  for (const VerifyRow& r : rows) {
    Json e;
    e["identity"] = r.name;
    e["residual"] = num(r.residual);
    e["order"] = num(r.order);
    e["pass"] = r.pass;
    e["note"] = r.note;
    arr.push_back(e);
  }
  j["rows"] = arr;
  j["all_pass"] = all;
  out.body = dump(j);
  return out;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  cfg.validate();
  const SMMS s = build_smms(cfg);
  const std::vector<SweepRow> rows = sweep(s, cfg.ks, cfg.solver_options());

  CommandResult out;
  struct Line {
    Real k;
    std::optional<Real> sigma;
    std::optional<ResidualReport> res;
    std::string error;
  };
  std::vector<Line> lines;
  for (const SweepRow& r : rows) {
    Line l{r.k, {}, {}, r.error};
    if (r.result) {
      l.sigma = r.result->sigma;
      l.res = r.result->residuals;
      if (!r.result->converged) l.error = "not converged: " + r.result->message;
      if (!r.result->residual_error.empty())
        l.error += (l.error.empty() ? "" : "; ") + std::string("residuals: ") + r.result->residual_error;
    } else {
      l.error = std::string(to_string(r.error_kind)) + ": " + r.error;
    }
    if (!l.error.empty()) out.warnings.push_back("k = " + fmt(r.k) + ": " + l.error);
    lines.push_back(l);
  }

  if (cfg.format == Format::json) {
    Json j = header(cfg, s);
    Json arr = Json::array();
    for (const Line& l : lines) {
      Json e;
      e["k"] = num(l.k);
      e["sigma"] = l.sigma ? num(*l.sigma) : Json(nullptr);
      e["residuals"] = l.res ? residuals_json(*l.res) : Json(nullptr);
      e["error"] = l.error;
      arr.push_back(e);
    }
    j["rows"] = arr;
    out.body = dump(j);
    return out;
  }
  std::string body = comment_block(config_json(cfg), "") + comment_block(grid_json(*s.grid()), "grid.");
  body += "k,sigma,res_conformal,res_measure,res_metric,error\n";
  for (const Line& l : lines) {
    body += fmt(l.k) + ",";
    body += (l.sigma ? fmt(*l.sigma) : std::string()) + ",";
    if (l.res)
      body += fmt(l.res->conformal) + "," + fmt(l.res->measure) + "," + fmt(l.res->metric) + ",";
    else
      body += ",,,";
    body += csv_quote(l.error) + "\n";
  }
  out.body = body;
  return out;
}

void write_atomic(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::parameter, "cannot open " + tmp.string() + " for writing");
    f << data;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      fail(ErrorKind::parameter, "write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::parameter, "cannot rename onto " + path + ": " + ec.message());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal GNS constants on radial model geometries", "gns_forge"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string model = "euclidean", domain, format;
  double m = 0, scale = 0, tail_tol = 0;
  std::vector<double> ks{1};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", model, "euclidean, sphere or hyperbolic")->capture_default_str();
    sub->add_option("--n", cfg.n, "dimension")->capture_default_str();
    sub->add_option("--m", m, "dimensional parameter")->capture_default_str();
    sub->add_option("--k", ks, "exponent k (comma list for sweep)")->delimiter(',');
    sub->add_option("--domain", domain, "half_line, unit_ball or pole_to_pole");
    sub->add_option("--N", cfg.N, "grid size, a power of two in [64, 32768]")->capture_default_str();
    sub->add_option("--scale", scale, "grid scale");
    sub->add_option("--seed", cfg.seed, "cold-start seed")->capture_default_str();
    sub->add_option("--output", cfg.output_path, "output file (stdout when omitted)");
    sub->add_option("--format", format, "json or csv");
    sub->add_option("--tail-tol", tail_tol, "tail test tolerance on the half-line (default 1e-9, 1e-5 for extremal)");
    sub->add_option("--max-iters", cfg.max_iters, "iteration cap")->capture_default_str();
    sub->add_flag("--warm-start", cfg.warm_start, "start from the closed-form extremal");
  };
  for (const char* name : {"constant", "extremal", "verify", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  app.get_subcommand("constant")->description("minimize Q_k and report sigma and the GNS constant");
  app.get_subcommand("extremal")->description("check the closed-form extremal against the Euler-Lagrange system");
  app.get_subcommand("verify")->description("run the identity suite with convergence orders");
  app.get_subcommand("sweep")->description("minimize over a list of k values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kParameter;
  }

  CommandResult result;
  try {
    cfg.model = parse_model(model);
    if (!domain.empty()) cfg.domain = parse_domain(domain);
    if (format.empty())
      cfg.format = cfg.command == "sweep" ? Format::csv : Format::json;
    else if (format == "json")
      cfg.format = Format::json;
    else if (format == "csv")
      cfg.format = Format::csv;
    else
      fail(ErrorKind::parameter, "unknown format '" + format + "'");
    cfg.m = m;
    if (scale != 0) cfg.scale = scale;
    if (tail_tol != 0)
      cfg.tail_tol = tail_tol;
    else if (cfg.command == "extremal")
      cfg.tail_tol = kExtremalTailTol;
    cfg.ks.assign(ks.begin(), ks.end());

    if (cfg.command == "constant") result = cmd_constant(cfg);
    else if (cfg.command == "extremal") result = cmd_extremal(cfg);
    else if (cfg.command == "verify") result = cmd_verify(cfg);
    else result = cmd_sweep(cfg);

    if (cfg.output_path.empty())
      out << result.body;
    else
      write_atomic(cfg.output_path, result.body);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kParameter;
  }
  for (const std::string& w : result.warnings) err << "warning: " << w << "\n";
  return result.code;
}

}  // namespace gnsforge::cli
