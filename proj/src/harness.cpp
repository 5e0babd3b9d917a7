#include "pqlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

#include "pqlab/approx.hpp"
#include "pqlab/verify.hpp"

namespace pqlab {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("malformed number '" + text + "' for key '" + key + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("key '" + key + "' expects true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& tok : split_ws(text)) out.push_back(parse_number(key, tok));
  if (out.empty()) throw ConfigError("key '" + key + "' expects a nonempty list");
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.kind.empty()) throw ConfigError("missing key 'model.kind'");
  if (!(cfg.rho < cfg.R))
    throw ConfigError("domain.rho (" + format_double(cfg.rho) +
                      ") must be smaller than domain.R (" + format_double(cfg.R) + ")");
  if (!(cfg.R <= cfg.extent))
    throw ConfigError("domain.R (" + format_double(cfg.R) +
                      ") must not exceed domain.extent (" + format_double(cfg.extent) + ")");
  int prev = 0;
  for (int N : cfg.grid_sizes) {
    if (N < 3 || N % 2 == 0)
      throw ConfigError("grid.sizes entries must be odd and >= 3 (got " +
                        std::to_string(N) + ")");
    if (N <= prev) throw ConfigError("grid.sizes must be strictly increasing");
    prev = N;
  }
  const double dist = cfg.extent - cfg.R;
  for (int h : cfg.h_list) {
    const double need = 12.0 * std::sqrt(static_cast<double>(cfg.n)) / h;
    if (h < 1 || need >= dist)
      throw ConfigError("approx.h = " + std::to_string(h) +
                        " violates the scale rule 12*sqrt(n)/h < dist(B_R, boundary) = " +
                        format_double(dist));
  }
  cfg.solver.validate();
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");

  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) throw ConfigError("empty value for key '" + key + "'");

    if (key == "experiment") cfg.experiment = val;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_number(key, val));
    else if (key == "parallel") cfg.parallel = parse_bool(key, val);
    else if (key == "out") cfg.out = val;
    else if (key == "model.kind") cfg.kind = val;
    else if (key == "model.n") cfg.n = static_cast<int>(parse_number(key, val));
    else if (key == "model.p") cfg.p = parse_number(key, val);
    else if (key == "model.q") cfg.q = parse_number(key, val);
    else if (key == "model.alpha") cfg.alpha = parse_number(key, val);
    else if (key == "model.regularized") cfg.regularized = parse_bool(key, val);
    else if (key == "model.a" || key == "model.a1" || key == "model.a2" ||
             key == "model.pfun")
      cfg.coeffs[key.substr(6)] = Coefficient::parse(val);
    else if (key == "model.pis") cfg.pis = parse_list(key, val);
    else if (key == "domain.extent") cfg.extent = parse_number(key, val);
    else if (key == "domain.R") cfg.R = parse_number(key, val);
    else if (key == "domain.rho") cfg.rho = parse_number(key, val);
    else if (key == "grid.sizes") {
      cfg.grid_sizes.clear();
      for (double v : parse_list(key, val)) cfg.grid_sizes.push_back(static_cast<int>(v));
    } else if (key == "approx.h") {
      cfg.h_list.clear();
      for (double v : parse_list(key, val)) cfg.h_list.push_back(static_cast<int>(v));
    } else if (key == "approx.eps") cfg.eps_list = parse_list(key, val);
    else if (key == "approx.sup_M") cfg.sup_M = parse_number(key, val);
    else if (key == "diag.eps") cfg.diag_eps = parse_list(key, val);
    else if (key == "diag.kmax") cfg.diag_kmax = static_cast<int>(parse_number(key, val));
    else if (key == "diag.hmax") cfg.diag_hmax = static_cast<int>(parse_number(key, val));
    else if (key == "verify.xi_cap") cfg.xi_cap = parse_number(key, val);
    else if (key == "verify.xi_min") cfg.xi_min = parse_number(key, val);
    else if (key == "verify.x_count") cfg.x_count = static_cast<int>(parse_number(key, val));
    else if (key == "verify.xi_count") cfg.xi_count = static_cast<int>(parse_number(key, val));
    else if (key == "verify.ladder") cfg.ladder = static_cast<int>(parse_number(key, val));
    else if (key == "verify.pair_count") cfg.pair_count = static_cast<int>(parse_number(key, val));
    else if (key == "solve.boundary") cfg.boundary = val;
    else if (key == "solver.grad_tol") cfg.solver.grad_tol = parse_number(key, val);
    else if (key == "solver.max_iters") cfg.solver.max_iters = static_cast<int>(parse_number(key, val));
    else if (key == "solver.c1") cfg.solver.c1 = parse_number(key, val);
    else if (key == "solver.backtrack") cfg.solver.backtrack = parse_number(key, val);
    else if (key == "solver.restart_every") cfg.solver.restart_every = static_cast<int>(parse_number(key, val));
    else if (key == "regularize.k") cfg.reg_k = parse_list(key, val);
    else throw ConfigError("unknown key '" + key + "' (line " + std::to_string(lineno) + ")");
  }
  validate(cfg);
  return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write config file '" + path + "'");
  out << "experiment = " << cfg.experiment << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "parallel = " << (cfg.parallel ? "true" : "false") << "\n";
  out << "out = " << cfg.out << "\n";
  out << "model.kind = " << cfg.kind << "\n";
  out << "model.n = " << cfg.n << "\n";
  out << "model.p = " << format_double(cfg.p) << "\n";
  out << "model.q = " << format_double(cfg.q) << "\n";
  out << "model.alpha = " << format_double(cfg.alpha) << "\n";
  out << "model.regularized = " << (cfg.regularized ? "true" : "false") << "\n";
  for (const auto& [name, fn] : cfg.coeffs)
    out << "model." << name << " = " << fn.describe() << "\n";
  if (!cfg.pis.empty()) {
    out << "model.pis =";
    for (double v : cfg.pis) out << " " << format_double(v);
    out << "\n";
  }
  out << "domain.extent = " << format_double(cfg.extent) << "\n";
  out << "domain.R = " << format_double(cfg.R) << "\n";
  out << "domain.rho = " << format_double(cfg.rho) << "\n";
  auto list = [&out](const std::string& key, const auto& values) {
    if (values.empty()) return;
    out << key << " =";
    for (auto v : values) out << " " << format_double(static_cast<double>(v));
    out << "\n";
  };
  list("grid.sizes", cfg.grid_sizes);
  list("approx.h", cfg.h_list);
  list("approx.eps", cfg.eps_list);
  out << "approx.sup_M = " << format_double(cfg.sup_M) << "\n";
  list("diag.eps", cfg.diag_eps);
  out << "diag.kmax = " << cfg.diag_kmax << "\n";
  out << "diag.hmax = " << cfg.diag_hmax << "\n";
  out << "verify.xi_cap = " << format_double(cfg.xi_cap) << "\n";
  out << "verify.xi_min = " << format_double(cfg.xi_min) << "\n";
  out << "verify.x_count = " << cfg.x_count << "\n";
  out << "verify.xi_count = " << cfg.xi_count << "\n";
  out << "verify.ladder = " << cfg.ladder << "\n";
  out << "verify.pair_count = " << cfg.pair_count << "\n";
  out << "solve.boundary = " << cfg.boundary << "\n";
  out << "solver.grad_tol = " << format_double(cfg.solver.grad_tol) << "\n";
  out << "solver.max_iters = " << cfg.solver.max_iters << "\n";
  out << "solver.c1 = " << format_double(cfg.solver.c1) << "\n";
  out << "solver.backtrack = " << format_double(cfg.solver.backtrack) << "\n";
  out << "solver.restart_every = " << cfg.solver.restart_every << "\n";
  list("regularize.k", cfg.reg_k);
}

DensityModel model_from_config(const ExperimentConfig& cfg) {
  Params params;
  params.scalar["n"] = cfg.n;
  params.scalar["p"] = cfg.p;
  params.scalar["q"] = cfg.q;
  params.scalar["alpha"] = cfg.alpha;
  params.scalar["regularized"] = cfg.regularized ? 1.0 : 0.0;
  params.scalar["domain_extent"] = cfg.extent;
  params.coeff = cfg.coeffs;
  params.exponents = cfg.pis;
  if (cfg.kind == "log-power") params.scalar.erase("q");  // declared q is derived
  return instantiate(cfg.kind, params);
}

namespace {

std::function<double(const Vec&)> boundary_fn(const ExperimentConfig& cfg) {
  const auto toks = split_ws(cfg.boundary);
  if (toks.empty()) throw ConfigError("empty solve.boundary");
  if (toks[0] == "sinx1")
    return [](const Vec& x) { return std::sin(M_PI * x[0]); };
  if (toks[0] == "affine") {
    if (static_cast<int>(toks.size()) != cfg.n + 2)
      throw ConfigError("solve.boundary affine expects an offset plus one slope per axis");
    Vec c;
    for (size_t i = 1; i < toks.size(); ++i)
      c.push_back(parse_number("solve.boundary", toks[i]));
    return [c](const Vec& x) {
      double v = c[0];
      for (size_t d = 0; d < x.size(); ++d) v += c[d + 1] * x[d];
      return v;
    };
  }
  throw ConfigError("unknown solve.boundary form '" + toks[0] + "'");
}

struct RowSink {
  const ExperimentConfig& cfg;
  std::vector<ReportRow> rows;

  void add(const std::string& stage, const std::string& key, const std::string& value,
           const std::string& notes = "") {
    rows.push_back({cfg.experiment, stage, key, value, notes});
  }
  void add(const std::string& stage, const std::string& key, double value,
           const std::string& notes = "") {
    add(stage, key, format_double(value), notes);
  }
  void add_flag(const std::string& stage, const std::string& key, bool value,
                const std::string& notes = "") {
    add(stage, key, value ? std::string("true") : std::string("false"), notes);
  }
};

void run_audit_stage(const ExperimentConfig& cfg, const DensityModel& model, RowSink& sink) {
  SampleGridOptions opts;
  opts.x_count = cfg.x_count;
  opts.xi_count = cfg.xi_count;
  opts.ladder_count = cfg.ladder;
  opts.xi_cap = cfg.xi_cap;
  opts.xi_min = model.starred ? std::max(cfg.xi_min, 1.0) : cfg.xi_min;
  opts.seed = cfg.seed;
  const Domain sub = box_domain(cfg.n, 0.85 * cfg.extent);
  const SampleGrid grid = make_sample_grid(sub, cfg.n, opts);

  AuditOptions aopts;
  aopts.pair_count = cfg.pair_count;
  const AssumptionReport rep = audit(model, grid, cfg.eps_list, aopts);

  sink.add("audit", "m.declared", model.envelope.m);
  sink.add("audit", "m.measured", rep.m_measured);
  sink.add("audit", "M.declared", model.envelope.M);
  sink.add("audit", "M.measured", rep.M_measured);
  sink.add("audit", "K.declared", model.envelope.K);
  sink.add("audit", "K.measured", rep.K_measured);
  sink.add("audit", "H.declared", model.envelope.H);
  sink.add("audit", "H.measured", rep.H_measured);
  sink.add_flag("audit", "gap.ok", rep.gap_ok);
  sink.add_flag("audit", "envelope.mismatch", rep.envelope_mismatch);
  sink.add("audit", "coercivity.c", rep.coercivity.c);
  sink.add("audit", "coercivity.c_Omega", rep.coercivity.c_Omega);
  for (const auto& [eps, c] : rep.h5_curve)
    sink.add("audit", "h5.c(eps=" + format_double(eps) + ")", c);
  sink.add_flag("audit", "h5.heuristic", rep.h5_heuristic);
  for (const auto& [key, ok] : rep.passes) sink.add_flag("audit", "pass." + key, ok);
  sink.add("audit", "samples", "-", rep.sample_meta);
}

void run_approx_stage(const ExperimentConfig& cfg, const DensityModel& model, RowSink& sink) {
  const Domain omega = box_domain(cfg.n, cfg.extent);
  const Vec center(cfg.n, 0.0);
  const DensityModel normalized = normalize_at_zero(model);

  // The uniform-convergence bound wants the measured x-Lipschitz constant.
  SampleGridOptions gopts;
  gopts.x_count = 40;
  gopts.xi_count = 48;
  gopts.ladder_count = 0;
  gopts.xi_cap = cfg.sup_M;
  gopts.seed = cfg.seed + 1;
  const SampleGrid hgrid = make_sample_grid(box_domain(cfg.n, 0.9 * cfg.R), cfg.n, gopts);
  const double H_meas = estimate_H(normalized, hgrid, cfg.pair_count);
  sink.add("approx", "H.measured", H_meas);

  double prev_err = 0.0;
  for (size_t i = 0; i < cfg.h_list.size(); ++i) {
    const int h = cfg.h_list[i];
    const Approximant fh = build_approximant(normalized, omega, center, cfg.R, h);
    const std::string tag = ".h=" + std::to_string(h);
    if (i == 0)
      sink.add("approx", "dpsi.sup", fh.psi().dpsi_sup());

    const double quotient = dphi_bound_check(fh, 400, cfg.seed + h);
    sink.add("approx", "dphi.quotient" + tag, quotient);

    const double err = sup_error(fh, center, cfg.R, cfg.sup_M, 48, 32, cfg.seed);
    const double bound = 3.0 * std::sqrt(static_cast<double>(cfg.n)) * H_meas / h *
                         std::pow(1.0 + cfg.sup_M * cfg.sup_M, model.envelope.q / 2.0);
    sink.add("approx", "sup_error" + tag, err);
    sink.add("approx", "sup_error.bound" + tag, bound);
    if (i > 0 && prev_err > 0.0)
      sink.add("approx", "sup_error.ratio" + tag, err / prev_err);
    prev_err = err;
  }

  if (cfg.diag_kmax > 0) {
    const std::vector<double> eps_seq =
        cfg.diag_eps.empty() ? cfg.eps_list : cfg.diag_eps;
    if (static_cast<int>(eps_seq.size()) < cfg.diag_kmax)
      throw Error("diag.kmax exceeds the mollifier radius list");
    std::vector<double> eps(eps_seq.begin(), eps_seq.begin() + cfg.diag_kmax);

    const Grid grid = make_grid(box_domain(cfg.n, cfg.extent), cfg.grid_sizes.back());
    const DiscreteField u = make_field(grid, boundary_fn(cfg));
    const DiagonalResult diag =
        diagonal_select(normalized, omega, center, cfg.R, u, eps, cfg.diag_hmax);
    for (const auto& step : diag.steps) {
      const std::string tag = ".k=" + std::to_string(step.k);
      sink.add("approx", "diag.h" + tag, static_cast<double>(step.h));
      sink.add("approx", "diag.gap" + tag, step.gap);
    }
    sink.add("approx", "diag.energy_u", diag.energy_u);
    sink.add("approx", "diag.final_residual", diag.final_residual);
  }
}

void run_solve_stage(const ExperimentConfig& cfg, const DensityModel& model, RowSink& sink,
                     bool with_regularity) {
  const Vec center(cfg.n, 0.0);
  const auto bfn = boundary_fn(cfg);

  struct Entry {
    std::string tag;
    double energy, supgrad, grad_norm;
    int iters;
    bool converged, minimality;
  };

  auto solve_one = [&](const DensityModel& md, int N, const std::string& tag) {
    const Grid grid = make_grid(box_domain(cfg.n, cfg.extent), N);
    const DiscreteField bc = make_field(grid, bfn);
    const DiscreteField init = harmonic_extension(bc);
    const double init_energy = discrete_energy(md, init);
    const SolveResult r = minimize_from(md, init, cfg.solver);
    Entry e;
    e.tag = tag;
    e.energy = r.energy;
    e.supgrad = interior_sup_gradient(r.field, cfg.rho);
    e.grad_norm = r.grad_norm;
    e.iters = r.iters;
    e.converged = r.converged;
    e.minimality = r.energy <= init_energy + 1e-6 * (1.0 + std::abs(init_energy));
    return e;
  };

  std::vector<std::function<Entry()>> jobs;
  const bool base_solvable = cfg.regularized || cfg.kind == "example-iv";
  if (base_solvable)
    for (int N : cfg.grid_sizes)
      jobs.push_back([&, N] { return solve_one(model, N, ".N=" + std::to_string(N)); });

  const Domain omega = box_domain(cfg.n, cfg.extent);
  for (int h : cfg.h_list) {
    for (int N : cfg.grid_sizes) {
      jobs.push_back([&, h, N] {
        const Approximant fh =
            build_approximant(model, omega, center, cfg.R, h, cfg.extent - cfg.R + 0.1);
        return solve_one(fh.as_model(), N,
                         ".h=" + std::to_string(h) + ".N=" + std::to_string(N));
      });
    }
  }
  if (!cfg.regularized)
    for (double k : cfg.reg_k)
      jobs.push_back([&, k] {
        return solve_one(regularize_infinity(model, k), cfg.grid_sizes.back(),
                         ".k=" + format_double(k));
      });

  std::vector<Entry> entries;
  if (cfg.parallel) {
    std::vector<std::future<Entry>> futures;
    futures.reserve(jobs.size());
    for (auto& job : jobs) futures.push_back(std::async(std::launch::async, job));
    for (auto& f : futures) entries.push_back(f.get());
  } else {
    for (auto& job : jobs) entries.push_back(job());
  }

  std::map<std::string, double> supgrads;
  for (const Entry& e : entries) {
    sink.add("solve", "energy" + e.tag, e.energy);
    sink.add("solve", "iters" + e.tag, static_cast<double>(e.iters));
    sink.add("solve", "grad_norm" + e.tag, e.grad_norm);
    sink.add_flag("solve", "converged" + e.tag, e.converged);
    sink.add_flag("solve", "minimality" + e.tag, e.minimality);
    if (with_regularity) {
      sink.add("regularity", "supgrad" + e.tag, e.supgrad);
      supgrads[e.tag] = e.supgrad;
    }
  }

  if (with_regularity && base_solvable && cfg.grid_sizes.size() >= 2) {
    const auto n1 = cfg.grid_sizes[cfg.grid_sizes.size() - 2];
    const auto n2 = cfg.grid_sizes.back();
    const auto it1 = supgrads.find(".N=" + std::to_string(n1));
    const auto it2 = supgrads.find(".N=" + std::to_string(n2));
    if (it1 != supgrads.end() && it2 != supgrads.end() && it1->second != 0.0) {
      const double rel = std::abs(it2->second - it1->second) / it1->second;
      const bool gap_ok = check_gap(model.envelope.p, model.envelope.q, cfg.n);
      sink.add("regularity", "supgrad.stabilization", rel,
               gap_ok ? "" : "gap condition fails; no stabilization expected");
    }
  }
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg,
                                      const std::set<std::string>& stages) {
  RowSink sink{cfg, {}};
  DensityModel model = model_from_config(cfg);

  auto guarded = [&](const std::string& stage, const std::function<void()>& body) {
    if (!stages.count(stage)) return;
    try {
      body();
    } catch (const std::exception& e) {
      sink.add("error", stage, "-", e.what());
    }
  };

  guarded("audit", [&] { run_audit_stage(cfg, model, sink); });
  guarded("approx", [&] { run_approx_stage(cfg, model, sink); });
  guarded("solve",
          [&] { run_solve_stage(cfg, model, sink, stages.count("regularity") > 0); });

  std::stable_sort(sink.rows.begin(), sink.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     return std::tie(a.stage, a.key) < std::tie(b.stage, b.key);
                   });
  return sink.rows;
}

void emit_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  auto clean = [](std::string s) {
    for (char& c : s)
      if (c == ',' || c == '\n') c = ';';
    return s;
  };
  out << "experiment,stage,key,value,notes\n";
  for (const ReportRow& r : rows)
    out << clean(r.experiment) << ',' << clean(r.stage) << ',' << clean(r.key) << ','
        << clean(r.value) << ',' << clean(r.notes) << '\n';
  if (!out) throw Error("write failure on '" + path + "'");
}

std::vector<ReportRow> parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "experiment,stage,key,value,notes")
    throw Error("unexpected CSV header in '" + path + "'");

  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    for (int i = 0; i < 4; ++i) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) throw Error("malformed CSV row: " + line);
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    fields.push_back(line.substr(start));
    rows.push_back({fields[0], fields[1], fields[2], fields[3], fields[4]});
  }
  return rows;
}

}  // namespace pqlab
