#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "persson/eigensolve.hpp"
#include "persson/kernel.hpp"
#include "persson/metric_space.hpp"
#include "persson/subshift.hpp"

namespace persson {

/// A self-adjoint operator together with its exhaustion family: for each
/// window L a finite truncation, and for each radius R (ball radius or shell
/// index) the sites that survive removing the R-th finite set.
class Problem {
public:
  virtual ~Problem() = default;

  virtual std::string kind() const = 0;
  /// bandwidth + dependence radius; windows must exceed radii by this much.
  virtual double margin() const = 0;
  virtual double bandwidth() const = 0;
  virtual SiteSet window_sites(std::int64_t window) const = 0;
  /// Operator truncated to window_sites(window).
  virtual BandKernel truncation(std::int64_t window) const = 0;
  /// window_sites(window) minus the finite set indexed by `radius`.
  virtual SiteSet compression_sites(double radius, std::int64_t window) const = 0;
  /// Same problem for the operator -H.
  virtual std::unique_ptr<Problem> negated() const = 0;
};

/// Operator on a metric space window, exhausted by complements of balls
/// around `center`.
class MetricProblem final : public Problem {
public:
  MetricProblem(SpacePtr space, BandKernel kernel, Site center,
                std::string kind = "metric_space");

  std::string kind() const override { return kind_; }
  double margin() const override { return kernel_.bandwidth(); }
  double bandwidth() const override { return kernel_.bandwidth(); }
  SiteSet window_sites(std::int64_t window) const override;
  BandKernel truncation(std::int64_t window) const override;
  SiteSet compression_sites(double radius, std::int64_t window) const override;
  std::unique_ptr<Problem> negated() const override;

  const SpacePtr& space() const { return space_; }
  const BandKernel& kernel() const { return kernel_; }
  Site center() const { return center_; }

private:
  SpacePtr space_;
  BandKernel kernel_;
  Site center_;
  std::string kind_;
};

/// Main-orbit Hamiltonian of a subshift model, exhausted by the Fell shells
/// M_i (radius = shell index i).
class SubshiftProblem final : public Problem {
public:
  SubshiftProblem(SubshiftModel model, HoppingSymbol symbol,
                  std::int64_t shell_scan = 256);

  std::string kind() const override { return "subshift"; }
  double margin() const override;
  double bandwidth() const override {
    return static_cast<double>(symbol_.max_hop());
  }
  SiteSet window_sites(std::int64_t window) const override;
  BandKernel truncation(std::int64_t window) const override;
  SiteSet compression_sites(double radius, std::int64_t window) const override;
  std::unique_ptr<Problem> negated() const override;

  const SubshiftModel& model() const { return model_; }
  const HoppingSymbol& symbol() const { return symbol_; }
  ShellSet shell(int index) const;

private:
  SubshiftModel model_;
  HoppingSymbol symbol_;
  std::int64_t scan_;
};

struct Schedule {
  std::vector<double> radii;
  std::vector<std::int64_t> windows;
  double margin = 0.0;

  /// Throws ConfigError unless both lists are strictly increasing, the
  /// margin covers the problem's margin, and every window clears every
  /// radius by the margin.
  void validate(const Problem& p) const;
};

/// L = R + max(500, 10 * bandwidth * sqrt(R)) for the largest radius, then
/// two more windows spaced by `step`, each capped at `cap`.
std::vector<std::int64_t> default_windows(const std::vector<double>& radii,
                                          double bandwidth, std::int64_t cap,
                                          std::int64_t step = 250);

struct LadderCell {
  double radius = 0.0;
  std::int64_t window = 0;
  std::size_t dimension = 0;
  SpectralInterval smin;
  SpectralInterval smax;
  bool dense = false;
  std::size_t iterations = 0;
};

struct TruncationCell {
  std::int64_t window = 0;
  std::size_t dimension = 0;
  SpectralInterval smin;
  SpectralInterval smax;
};

struct OracleEdges {
  double lower = 0.0;
  double upper = 0.0;
  bool certified = false;
  std::vector<std::string> notes;
};

enum class AuditMode { strict, warn };

struct LadderOptions {
  EigenOptions eigen;
  double stabilization_tol = 1e-6;
  AuditMode audits = AuditMode::strict;
  unsigned threads = 1;
  /// Also solve the uncompressed truncation at every window.
  bool with_full = false;
};

struct EdgeReport {
  std::string problem_kind;
  Schedule schedule;
  std::vector<LadderCell> cells;  // radius-major, window-minor
  std::vector<TruncationCell> full;  // filled when with_full

  /// max over R of the final-window s- intervals (componentwise).
  SpectralInterval persson_lower;
  /// min over R of the final-window s+ intervals (componentwise).
  SpectralInterval persson_upper;
  std::vector<bool> lower_stabilized;  // per radius
  std::vector<bool> upper_stabilized;
  std::optional<OracleEdges> oracle;
  std::vector<std::string> audit_flags;
  bool all_certified = true;

  const LadderCell& cell(std::size_t r, std::size_t l) const {
    return cells[r * schedule.windows.size() + l];
  }
};

/// Builds every (R, L) compression, takes certified extreme eigenvalues and
/// runs the monotonicity audits. In strict mode an audit violation throws
/// AuditError naming the offending (R, L).
EdgeReport compression_ladder(const Problem& problem, const Schedule& schedule,
                              const LadderOptions& opts = {});

/// Ladder plus the uncompressed truncations; the gap between persson_lower
/// and the full lambda_min exposes discrete spectrum below the essential one.
struct GapReport {
  EdgeReport ladder;
  SpectralInterval gap_lower;  // persson_lower - lambda_min(full), final window
  SpectralInterval gap_upper;  // lambda_max(full) - persson_upper
  bool consistent = true;      // both gaps >= -(certification widths)
};
GapReport full_vs_essential_gap(const Problem& problem, const Schedule& schedule,
                                const LadderOptions& opts = {});

/// Full-line kernel K(k, l) = h(tau_l x_inf, k - l) on [-W, W].
BandKernel limit_operator(const HoppingSymbol& h, const SeqPoint& x_inf,
                          std::int64_t window);

struct OracleOptions {
  int grid = 4096;
  std::int64_t fallback_window = 2000;
  EigenOptions eigen;
};

/// Extreme essential-spectrum edges from the limit generators: the symbol
/// range where the limit operator is a Laurent operator, else the extreme
/// eigenvalues of a large limit-operator truncation (flagged non-certified).
OracleEdges essential_edge_oracle(const SubshiftModel& model,
                                  const HoppingSymbol& h,
                                  const OracleOptions& opts = {});

}  // namespace persson
