#include "persson/persson_driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/core.h>

#include "persson/errors.hpp"

namespace persson {

// ------------------------------------------------------------ MetricProblem

MetricProblem::MetricProblem(SpacePtr space, BandKernel kernel, Site center,
                             std::string kind)
    : space_(std::move(space)),
      kernel_(std::move(kernel)),
      center_(center),
      kind_(std::move(kind)) {
  if (kernel_.space()->key() != space_->key()) {
    throw StructuralError("kernel and problem space differ");
  }
  if (!space_->window().contains(center_)) {
    throw PreconditionError("centre " + std::to_string(center_) +
                            " is not in the space window");
  }
}

SiteSet MetricProblem::window_sites(std::int64_t window) const {
  return space_->ball(center_, static_cast<double>(window));
}

BandKernel MetricProblem::truncation(std::int64_t window) const {
  return restrict(kernel_, window_sites(window));
}

SiteSet MetricProblem::compression_sites(double radius, std::int64_t window) const {
  const auto ball = space_->ball(center_, radius);
  return SiteSet::cofinite(window_sites(window),
                           std::vector<Site>(ball.begin(), ball.end()));
}

std::unique_ptr<Problem> MetricProblem::negated() const {
  return std::make_unique<MetricProblem>(space_, scale(kernel_, -1.0), center_, kind_);
}

// ---------------------------------------------------------- SubshiftProblem

SubshiftProblem::SubshiftProblem(SubshiftModel model, HoppingSymbol symbol,
                                 std::int64_t shell_scan)
    : model_(std::move(model)), symbol_(std::move(symbol)), scan_(shell_scan) {}

double SubshiftProblem::margin() const {
  return static_cast<double>(symbol_.max_hop() + symbol_.radius());
}

SiteSet SubshiftProblem::window_sites(std::int64_t window) const {
  return trace_set(model_.generator(), ShellSet::full(), window);
}

BandKernel SubshiftProblem::truncation(std::int64_t window) const {
  return subshift_operator(symbol_, model_.generator(), ShellSet::full(), window);
}

ShellSet SubshiftProblem::shell(int index) const {
  return fell_shell(model_, index, scan_);
}

SiteSet SubshiftProblem::compression_sites(double radius, std::int64_t window) const {
  const auto index = static_cast<int>(std::lround(radius));
  if (index < 1 || static_cast<double>(index) != radius) {
    throw ConfigError("/schedule/radii",
                      "shell indices must be integers >= 1, got " +
                          fmt::format("{}", radius));
  }
  return trace_set(model_.generator(), shell(index), window);
}

std::unique_ptr<Problem> SubshiftProblem::negated() const {
  return std::make_unique<SubshiftProblem>(model_, symbol_.negated(), scan_);
}

// ----------------------------------------------------------------- schedule

void Schedule::validate(const Problem& p) const {
  if (radii.empty()) throw ConfigError("/schedule/radii", "no radii given");
  if (windows.empty()) throw ConfigError("/schedule/windows", "no windows given");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) {
      throw ConfigError("/schedule/radii", "radii must be strictly increasing");
    }
  }
  for (std::size_t i = 1; i < windows.size(); ++i) {
    if (windows[i] <= windows[i - 1]) {
      throw ConfigError("/schedule/windows", "windows must be strictly increasing");
    }
  }
  if (radii.front() < 0.0) throw ConfigError("/schedule/radii", "negative radius");
  if (margin < p.margin()) {
    throw ConfigError("/schedule/margin",
                      fmt::format("margin {} is below bandwidth + dependence "
                                  "radius {}",
                                  margin, p.margin()));
  }
  const double need = radii.back() + margin;
  if (static_cast<double>(windows.front()) < need) {
    throw ConfigError("/schedule/windows",
                      fmt::format("window {} does not clear radius {} by the "
                                  "margin {}",
                                  windows.front(), radii.back(), margin));
  }
}

std::vector<std::int64_t> default_windows(const std::vector<double>& radii,
                                          double bandwidth, std::int64_t cap,
                                          std::int64_t step) {
  const double r = radii.empty() ? 0.0 : radii.back();
  const double first = r + std::max(500.0, 10.0 * bandwidth * std::sqrt(r));
  std::vector<std::int64_t> out;
  for (int q = 0; q < 3; ++q) {
    const auto w = std::min<std::int64_t>(
        cap, static_cast<std::int64_t>(std::ceil(first)) + q * step);
    if (out.empty() || w > out.back()) out.push_back(w);
  }
  return out;
}

// ------------------------------------------------------------------- ladder

namespace {

/// Runs `job(i)` for i in [0, count) on up to `threads` workers; the first
/// exception is rethrown.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// Intervals prove an increase only when they separate beyond rounding.
bool proves_increase(const SpectralInterval& before, const SpectralInterval& after) {
  const double slack = 1e-12 * (1.0 + std::abs(before.hi));
  return after.lo > before.hi + slack;
}

void audit(EdgeReport& rep, AuditMode mode) {
  const auto& s = rep.schedule;
  const std::size_t nr = s.radii.size();
  const std::size_t nl = s.windows.size();
  auto flag = [&](std::string msg) {
    if (mode == AuditMode::strict) throw AuditError(msg);
    rep.audit_flags.push_back(std::move(msg));
  };
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t l = 1; l < nl; ++l) {
      const auto& a = rep.cell(r, l - 1);
      const auto& b = rep.cell(r, l);
      if (proves_increase(a.smin, b.smin)) {
        flag(fmt::format("s- increased with the window at (R={}, L={})", b.radius,
                         b.window));
      }
      if (proves_increase(b.smax, a.smax)) {
        flag(fmt::format("s+ decreased with the window at (R={}, L={})", b.radius,
                         b.window));
      }
    }
  }
  for (std::size_t l = 0; l < nl; ++l) {
    for (std::size_t r = 1; r < nr; ++r) {
      const auto& a = rep.cell(r - 1, l);
      const auto& b = rep.cell(r, l);
      if (proves_increase(b.smin, a.smin)) {
        flag(fmt::format("s- decreased with the radius at (R={}, L={})", b.radius,
                         b.window));
      }
      if (proves_increase(a.smax, b.smax)) {
        flag(fmt::format("s+ increased with the radius at (R={}, L={})", b.radius,
                         b.window));
      }
    }
  }
}

bool stabilized(const std::vector<double>& column, double tol) {
  if (column.size() < 3) return false;
  const auto tail = column.end() - 3;
  const auto [lo, hi] = std::minmax_element(tail, column.end());
  return *hi - *lo <= 10.0 * tol;
}

}  // namespace

EdgeReport compression_ladder(const Problem& problem, const Schedule& schedule,
                              const LadderOptions& opts) {
  schedule.validate(problem);
  EdgeReport rep;
  rep.problem_kind = problem.kind();
  rep.schedule = schedule;
  const std::size_t nr = schedule.radii.size();
  const std::size_t nl = schedule.windows.size();
  rep.cells.resize(nr * nl);

  std::vector<BandKernel> truncations;
  truncations.reserve(nl);
  for (auto w : schedule.windows) truncations.push_back(problem.truncation(w));

  const std::size_t ncell = nr * nl + (opts.with_full ? nl : 0);
  if (opts.with_full) rep.full.resize(nl);
  parallel_for(ncell, opts.threads, [&](std::size_t idx) {
    if (idx >= nr * nl) {
      const std::size_t l = idx - nr * nl;
      const auto sites = problem.window_sites(schedule.windows[l]);
      const auto e = extreme_eigs(truncations[l], sites, opts.eigen);
      rep.full[l] = {schedule.windows[l], e.dimension, e.min, e.max};
      return;
    }
    const std::size_t r = idx / nl;
    const std::size_t l = idx % nl;
    const auto sites = problem.compression_sites(schedule.radii[r], schedule.windows[l]);
    LadderCell& c = rep.cells[idx];
    c.radius = schedule.radii[r];
    c.window = schedule.windows[l];
    c.dimension = sites.size();
    if (sites.empty()) {
      // nothing left: the compression acts on the zero space
      c.smin = {std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), true};
      c.smax = {-std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), true};
      return;
    }
    const BandKernel compressed = restrict(truncations[l], sites);
    const auto e = extreme_eigs(compressed, sites, opts.eigen);
    c.smin = e.min;
    c.smax = e.max;
    c.dense = e.dense;
    c.iterations = e.iterations;
  });

  for (const auto& c : rep.cells) {
    rep.all_certified = rep.all_certified && c.smin.certified && c.smax.certified;
  }

  rep.persson_lower = {-std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity(), true};
  rep.persson_upper = {std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity(), true};
  for (std::size_t r = 0; r < nr; ++r) {
    const auto& last = rep.cell(r, nl - 1);
    rep.persson_lower.lo = std::max(rep.persson_lower.lo, last.smin.lo);
    rep.persson_lower.hi = std::max(rep.persson_lower.hi, last.smin.hi);
    rep.persson_lower.certified = rep.persson_lower.certified && last.smin.certified;
    rep.persson_upper.lo = std::min(rep.persson_upper.lo, last.smax.lo);
    rep.persson_upper.hi = std::min(rep.persson_upper.hi, last.smax.hi);
    rep.persson_upper.certified = rep.persson_upper.certified && last.smax.certified;

    std::vector<double> lower_col;
    std::vector<double> upper_col;
    for (std::size_t l = 0; l < nl; ++l) {
      lower_col.push_back(rep.cell(r, l).smin.mid());
      upper_col.push_back(rep.cell(r, l).smax.mid());
    }
    rep.lower_stabilized.push_back(stabilized(lower_col, opts.stabilization_tol));
    rep.upper_stabilized.push_back(stabilized(upper_col, opts.stabilization_tol));
  }

  audit(rep, opts.audits);
  return rep;
}

GapReport full_vs_essential_gap(const Problem& problem, const Schedule& schedule,
                                const LadderOptions& opts) {
  LadderOptions o = opts;
  o.with_full = true;
  GapReport g;
  g.ladder = compression_ladder(problem, schedule, o);
  const auto& full = g.ladder.full.back();
  const auto& pl = g.ladder.persson_lower;
  const auto& pu = g.ladder.persson_upper;
  g.gap_lower = {pl.lo - full.smin.hi, pl.hi - full.smin.lo,
                 pl.certified && full.smin.certified};
  g.gap_upper = {full.smax.lo - pu.hi, full.smax.hi - pu.lo,
                 pu.certified && full.smax.certified};
  g.consistent = g.gap_lower.hi >= 0.0 && g.gap_upper.hi >= 0.0;
  return g;
}

// ------------------------------------------------------------------ oracle

BandKernel limit_operator(const HoppingSymbol& h, const SeqPoint& x_inf,
                          std::int64_t window) {
  return subshift_operator(h, x_inf, ShellSet::full(), window);
}

OracleEdges essential_edge_oracle(const SubshiftModel& model,
                                  const HoppingSymbol& h,
                                  const OracleOptions& opts) {
  if (model.limit_generators().empty()) {
    throw PreconditionError("the model has no limit generators");
  }
  OracleEdges out;
  out.lower = std::numeric_limits<double>::infinity();
  out.upper = -std::numeric_limits<double>::infinity();
  out.certified = true;
  for (const auto& g : model.limit_generators()) {
    try {
      const auto r = symbol_range(h, g, opts.grid);
      out.lower = std::min(out.lower, r.lo);
      out.upper = std::max(out.upper, r.hi);
      out.notes.push_back(fmt::format("{}: symbol range [{}, {}] (grid error <= {})",
                                      g.describe(), r.lo, r.hi, r.grid_error));
      continue;
    } catch (const PreconditionError&) {
      // not a Laurent operator; fall back to a large truncation
    }
    const BandKernel k = limit_operator(h, g, opts.fallback_window);
    const auto sites = SiteSet::range(-opts.fallback_window, opts.fallback_window);
    const auto e = extreme_eigs(k, sites, opts.eigen);
    out.lower = std::min(out.lower, e.min.mid());
    out.upper = std::max(out.upper, e.max.mid());
    out.certified = false;
    out.notes.push_back(fmt::format("{}: truncation at window {} gives [{}, {}] "
                                    "(not certified)",
                                    g.describe(), opts.fallback_window, e.min.mid(),
                                    e.max.mid()));
  }
  return out;
}

}  // namespace persson
