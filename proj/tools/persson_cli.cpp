// persson: essential-spectrum edges from compression ladders.
//
//   persson estimate|verify|info --config job.json [--out dir] [--threads n] [--seed s]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "persson/checks.hpp"
#include "persson/config.hpp"
#include "persson/errors.hpp"
#include "persson/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace persson;

namespace {

constexpr int kOk = 0;
constexpr int kHardFailure = 1;
constexpr int kSchema = 2;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ----------------------------------------------------------------- estimate

int estimate(const JobConfig& cfg, const fs::path& out) {
  const auto problem = make_problem(cfg);
  cfg.schedule.validate(*problem);

  auto opts = cfg.ladder_options();
  std::ofstream trace;
  if (cfg.trace) {
    trace.open(out / "lanczos_trace.csv", std::ios::binary);
    trace << "iter ritz_min ritz_max res_min res_max\n";
    opts.eigen.trace = &trace;
    opts.threads = 1;
  }

  GapReport gap = full_vs_essential_gap(*problem, cfg.schedule, opts);
  EdgeReport& rep = gap.ladder;

  bool oracle_failed = false;
  if (cfg.oracle && cfg.kind == ProblemKind::subshift) {
    const auto& sp = static_cast<const SubshiftProblem&>(*problem);
    OracleOptions oo;
    oo.grid = cfg.symbol_grid;
    oo.fallback_window = cfg.oracle_window;
    oo.eigen = opts.eigen;
    oo.eigen.trace = nullptr;
    rep.oracle = essential_edge_oracle(sp.model(), sp.symbol(), oo);
    if (rep.oracle->certified) {
      const double dl = std::abs(rep.persson_lower.mid() - rep.oracle->lower);
      const double du = std::abs(rep.persson_upper.mid() - rep.oracle->upper);
      if (dl > cfg.oracle_tol || du > cfg.oracle_tol) {
        oracle_failed = true;
        rep.audit_flags.push_back(fmt::format(
            "oracle disagreement: lower {} upper {} (tolerance {})", dl, du, cfg.oracle_tol));
      }
    }
  }

  write_file(out / "report.json", dump(to_json(gap)));
  std::ostringstream csv, lo, hi;
  write_edges_csv(csv, rep);
  write_ladder_dat(lo, rep, Edge::lower);
  write_ladder_dat(hi, rep, Edge::upper);
  write_file(out / "edges.csv", csv.str());
  write_file(out / "ladder_min.dat", lo.str());
  write_file(out / "ladder_max.dat", hi.str());

  fmt::print("persson_lower [{}, {}]{}\n", rep.persson_lower.lo, rep.persson_lower.hi,
             rep.persson_lower.certified ? "" : " (not certified)");
  fmt::print("persson_upper [{}, {}]{}\n", rep.persson_upper.lo, rep.persson_upper.hi,
             rep.persson_upper.certified ? "" : " (not certified)");
  if (rep.oracle) {
    fmt::print("oracle edges {} {}{}\n", rep.oracle->lower, rep.oracle->upper,
               rep.oracle->certified ? "" : " (fallback, not certified)");
  }
  for (const auto& f : rep.audit_flags) fmt::print(stderr, "audit: {}\n", f);
  return oracle_failed ? kHardFailure : kOk;
}

// ------------------------------------------------------------------- verify

json suite_json(const SuiteResult& s) {
  return {{"trials", s.trials},
          {"failures", s.failures},
          {"nontrivial", s.nontrivial},
          {"witnesses", s.witnesses}};
}

// Small schedule: the first two radii and three windows just past the margin.
Schedule small_schedule(const JobConfig& cfg, const Problem& p) {
  Schedule s;
  const auto& radii = cfg.schedule.radii;
  s.radii.assign(radii.begin(), radii.begin() + std::min<std::size_t>(2, radii.size()));
  s.margin = std::max(cfg.schedule.margin, p.margin());
  const auto base = static_cast<std::int64_t>(std::ceil(s.radii.back() + s.margin));
  s.windows = {base + 16, base + 32, base + 64};
  return s;
}

int verify(const JobConfig& cfg, const fs::path& out) {
  json rep;
  bool failed = false;
  auto fail = [&](const std::string& what) {
    failed = true;
    fmt::print(stderr, "FAIL {}\n", what);
  };

  const auto problem = make_problem(cfg);
  const auto small = small_schedule(cfg, *problem);
  const auto window = small.windows.back();

  if (cfg.kind == ProblemKind::subshift) {
    const auto& sp = static_cast<const SubshiftProblem&>(*problem);
    const auto sym = validate_symbol(sp.symbol(), sp.model(), window);
    rep["symbol"] = to_json(sym);
    for (const auto& [pattern, hop] : sym.self_adjoint_witnesses) {
      fail(fmt::format("self-adjointness witness: pattern '{}' hop {}", pattern, hop));
    }
    for (auto m : sym.covariance_witnesses) fail(fmt::format("covariance witness: shift {}", m));

    const auto model = validate_model(sp.model(), 6, window);
    rep["model"] = {{"ok", model.ok}, {"problems", model.problems}};
    for (const auto& p : model.problems) fail("model: " + p);

    json shells = json::array();
    const int max_index = static_cast<int>(small.radii.back()) + 2;
    for (int i = 1; i <= max_index; ++i) {
      const auto mi = sp.shell(i);
      const auto next = sp.shell(i + 1);
      const auto ti = trace_set(sp.model().generator(), mi, window);
      const auto tn = trace_set(sp.model().generator(), next, window);
      // nesting compared on the common index range
      bool nested = true;
      for (Site k : tn) {
        if (k >= -window + i && k <= window - i && !ti.contains(k)) nested = false;
      }
      const bool coherent = main_orbit_operator(sp.symbol(), sp.model(), mi, window) ==
                            subshift_operator(sp.symbol(), sp.model().generator(), mi, window);
      shells.push_back({{"index", i}, {"nested_next", nested}, {"coherent", coherent}});
      if (!nested) fail(fmt::format("shell {} does not contain shell {}", i, i + 1));
      if (!coherent) fail(fmt::format("orbit and index operators differ on shell {}", i));
    }
    rep["shells"] = shells;
  } else {
    const auto k = problem->truncation(window);
    const double sa = self_adjoint_defect(k);
    rep["self_adjoint_defect"] = sa;
    if (sa > cfg.self_adjoint_tol) fail(fmt::format("kernel self-adjoint defect {}", sa));

    const auto sites = problem->window_sites(window);
    const double hahn = hahn_norm(k, sites);
    const double schur = schur_bound(k, sites);
    EigenOptions eo = cfg.ladder_options().eigen;
    const auto e = extreme_eigs(k, sites, eo);
    const double spectral_radius = std::max(std::abs(e.min.lo), std::abs(e.max.hi));
    const bool chain = spectral_radius <= schur + 1e-12 * (1 + hahn) && schur <= hahn + 1e-12 * (1 + hahn);
    rep["norm_chain"] = {{"max_abs_eig", spectral_radius}, {"schur", schur}, {"hahn", hahn}, {"ok", chain}};
    if (!chain) fail("norm chain on the kernel");

    const auto m = problem->compression_sites(small.radii.front(), window);
    const bool same = defect(k, k, m) == defect_middle_sum(k, k, m);
    rep["kernel_defect_identity"] = same;
    if (!same) fail("defect identity on the kernel");
  }

  const auto d = defect_identity_suite(cfg.seed, 200);
  const auto n = norm_chain_suite(cfg.seed + 1, 100);
  const auto i = interlacing_suite(cfg.seed + 2, 100);
  rep["suites"] = {{"defect_identity", suite_json(d)},
                   {"norm_chain", suite_json(n)},
                   {"interlacing", suite_json(i)}};
  for (const auto* s : {&d, &n, &i}) {
    for (const auto& w : s->witnesses) fail(s->name + ": " + w);
  }

  // the ladder needs a self-adjoint operator, so it only runs on clean inputs
  if (!failed) {
    auto lo = cfg.ladder_options();
    lo.audits = AuditMode::warn;
    const auto ladder = compression_ladder(*problem, small, lo);
    rep["small_grid"] = {{"radii", small.radii},
                         {"windows", small.windows},
                         {"audit_flags", ladder.audit_flags}};
    for (const auto& f : ladder.audit_flags) fail("audit: " + f);
  }

  rep["ok"] = !failed;
  write_file(out / "verify_report.json", dump(rep));
  fmt::print("verify: {}\n", failed ? "FAILED" : "ok");
  return failed ? kHardFailure : kOk;
}

// --------------------------------------------------------------------- info

int info(const JobConfig& cfg, const fs::path& out) {
  json rep;
  const auto window = cfg.schedule.windows.back();
  if (cfg.kind == ProblemKind::subshift) {
    const auto model = make_model(cfg);
    const std::int64_t w = std::min<std::int64_t>(window, 512);
    const std::size_t max_len = 8;
    const auto words = dictionary(model, max_len, w);
    std::vector<std::size_t> sizes(max_len + 1, 0);
    for (const auto& word : words) ++sizes[word.size()];
    rep["dictionary_sizes"] = sizes;
    json shells = json::array();
    for (int i = 1; i <= 8; ++i) {
      const auto s = fell_shell(model, i, cfg.shell_scan);
      const auto t = trace_set(model.generator(), s, w);
      shells.push_back({{"index", i},
                        {"members", t.size()},
                        {"inspected", 2 * (w - i) + 1},
                        {"limit_set_empty", s.limit_set_empty()}});
    }
    rep["shell_membership"] = shells;
    rep["inspected_window"] = w;
    rep["admissibility"] = to_json(admissibility_probe(model.generator(), w));
    json fell = json::array();
    for (const auto& f : fell_convergence_probe(model, 8, w)) {
      fell.push_back({{"index", f.index},
                      {"outer_distance", f.outer_distance},
                      {"outer_ok", f.outer_ok},
                      {"inner_ok", f.inner_ok}});
    }
    rep["fell_probe"] = fell;
    fmt::print("dictionary sizes:");
    for (auto s : sizes) fmt::print(" {}", s);
    fmt::print("\n");
  } else {
    const auto problem = make_problem(cfg);
    const auto k = problem->truncation(window);
    const auto sites = problem->window_sites(window);
    rep["sites"] = sites.size();
    rep["nnz"] = k.nnz();
    rep["bandwidth"] = k.bandwidth();
    rep["sup_entry"] = k.sup_bound();
    rep["hahn_norm"] = hahn_norm(k, sites);
    rep["schur_bound"] = schur_bound(k, sites);
    rep["self_adjoint_defect"] = self_adjoint_defect(k);
    fmt::print("sites {} nnz {} bandwidth {}\n", sites.size(), k.nnz(), k.bandwidth());
  }
  write_file(out / "info.json", dump(rep));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified essential-spectrum edges via compression ladders"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::int64_t seed = -1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "job configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for randomized suites")->check(CLI::NonNegativeNumber);
  };
  auto* est = app.add_subcommand("estimate", "compute the Persson ladder and edges");
  auto* ver = app.add_subcommand("verify", "run the invariant suites");
  auto* inf = app.add_subcommand("info", "model statistics");
  for (auto* s : {est, ver, inf}) add_common(s);
  CLI11_PARSE(app, argc, argv);

  try {
    JobConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

    fs::path out(cfg.output_dir);
    if (out.is_relative() && out_dir.empty()) out = cfg.base_dir / out;
    fs::create_directories(out);
    out = fs::canonical(out);
    cfg.output_dir = out.string();
    write_file(out / "effective_config.json", dump(cfg.effective()));

    if (est->parsed()) return estimate(cfg, out);
    if (ver->parsed()) return verify(cfg, out);
    return info(cfg, out);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kSchema;
  } catch (const AuditError& e) {
    fmt::print(stderr, "audit failure: {}\n", e.what());
    return kHardFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kHardFailure;
  }
}
