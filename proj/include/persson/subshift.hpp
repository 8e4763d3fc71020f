#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "persson/kernel.hpp"

namespace persson {

using Letter = char;

/// Finite words over the alphabet; the empty string is the empty word.
using Word = std::string;

class Alphabet {
public:
  explicit Alphabet(std::vector<Letter> letters);

  const std::vector<Letter>& letters() const { return letters_; }
  bool contains(Letter c) const;
  std::size_t size() const { return letters_.size(); }
  /// Throws StructuralError when `w` uses a letter outside the alphabet.
  void check(const Word& w) const;

private:
  std::vector<Letter> letters_;
};

/// A two-sided sequence Z -> alphabet given by a rule that can be evaluated
/// at every index.
class SeqPoint {
public:
  /// One letter everywhere.
  struct Constant {
    Letter letter;
    friend bool operator==(const Constant&, const Constant&) = default;
  };
  /// value(j) = word[(j + phase) mod |word|].
  struct Periodic {
    Word word;
    std::int64_t phase;
    friend bool operator==(const Periodic&, const Periodic&) = default;
  };
  /// `left` for j < at, `right` for j >= at.
  struct Step {
    Letter left;
    Letter right;
    std::int64_t at;
    friend bool operator==(const Step&, const Step&) = default;
  };
  /// `mark` iff |j| is a power of two (2^0 = 1 included when
  /// `include_one`), `base` elsewhere.
  struct PowersOfTwo {
    Letter base;
    Letter mark;
    bool include_one;
    friend bool operator==(const PowersOfTwo&, const PowersOfTwo&) = default;
  };
  /// Listed values on finitely many indices, `fill` elsewhere.
  struct Explicit {
    std::map<std::int64_t, Letter> values;
    Letter fill;
    friend bool operator==(const Explicit&, const Explicit&) = default;
  };
  /// The shifted sequence tau_k(base): value(j) = base(j - k).
  struct Shifted {
    std::shared_ptr<const SeqPoint> base;
    std::int64_t k;
    friend bool operator==(const Shifted& a, const Shifted& b) {
      return a.k == b.k && *a.base == *b.base;
    }
  };

  using Rule = std::variant<Constant, Periodic, Step, PowersOfTwo, Explicit, Shifted>;

  explicit SeqPoint(Rule rule);

  static SeqPoint constant(Letter c) { return SeqPoint(Constant{c}); }
  static SeqPoint periodic(Word w, std::int64_t phase = 0);
  static SeqPoint step(Letter left, Letter right, std::int64_t at = 0) {
    return SeqPoint(Step{left, right, at});
  }
  static SeqPoint powers_of_two(Letter base, Letter mark, bool include_one = true) {
    return SeqPoint(PowersOfTwo{base, mark, include_one});
  }
  static SeqPoint explicit_window(std::map<std::int64_t, Letter> values, Letter fill) {
    return SeqPoint(Explicit{std::move(values), fill});
  }

  Letter at(std::int64_t j) const;
  /// tau_k(this), evaluated as (tau_k x)(j) = x(j - k).
  SeqPoint shifted(std::int64_t k) const;

  const Rule& rule() const { return rule_; }
  std::string describe() const;

  /// Structural equality of the rules (not sequence equality).
  friend bool operator==(const SeqPoint& a, const SeqPoint& b) {
    return a.rule_ == b.rule_;
  }

private:
  Rule rule_;
};

/// x|_[i, j].
Word evaluate(const SeqPoint& x, std::int64_t i, std::int64_t j);

/// All words of length <= max_len occurring in x|_[-window, window],
/// the empty word included.
std::set<Word> dictionary(const SeqPoint& x, std::size_t max_len,
                          std::int64_t window);

/// Distance (1 + min{|k| : x_k != y_k})^-1 inspected on |k| <= window. When
/// no disagreement is found the value is the bound 1/(window + 2) and
/// `exact` is false, unless the two rules are syntactically equal.
struct MetricValue {
  double value;
  bool exact;
};
MetricValue subshift_metric(const SeqPoint& x, const SeqPoint& y,
                            std::int64_t window);

/// Orbit closure of an admissible generator z, with X_inf given by a finite
/// list of orbit representatives.
class SubshiftModel {
public:
  SubshiftModel(Alphabet alphabet, SeqPoint generator,
                std::vector<SeqPoint> limit_generators);

  const Alphabet& alphabet() const { return alphabet_; }
  const SeqPoint& generator() const { return generator_; }
  const std::vector<SeqPoint>& limit_generators() const { return limits_; }

private:
  Alphabet alphabet_;
  SeqPoint generator_;
  std::vector<SeqPoint> limits_;
};

/// Dictionary of the model, i.e. of its generator z.
std::set<Word> dictionary(const SubshiftModel& model, std::size_t max_len,
                          std::int64_t window);

struct ModelCheck {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Letters belong to the alphabet, the generator passes the admissibility
/// probe, and every limit generator's words (up to `max_len`) occur in z.
ModelCheck validate_model(const SubshiftModel& model, std::size_t max_len,
                          std::int64_t window);

/// Clopen set of X described by its membership rule. `index == 0` stands for
/// the whole subshift X; otherwise it is the shell
///   M_i = { y : y agrees with some point of X_inf on |k| < i }.
/// Points of X_inf are searched as shifts of the limit generators within
/// `scan` of the origin.
class ShellSet {
public:
  static ShellSet full();
  static ShellSet shell(const SubshiftModel& model, int index,
                        std::int64_t scan = 256);

  bool is_full() const { return index_ == 0; }
  int index() const { return index_; }
  /// Number of sites on each side of 0 inspected by the membership rule.
  int radius() const { return index_ == 0 ? 0 : index_ - 1; }

  /// Decided from y|_(-i, i).
  bool contains(const SeqPoint& y) const;
  bool contains_pattern(const Word& central) const;
  bool limit_set_empty() const { return !is_full() && patterns_.empty(); }

private:
  ShellSet() = default;

  int index_ = 0;
  std::unordered_set<Word> patterns_;
};

ShellSet fell_shell(const SubshiftModel& model, int i, std::int64_t scan = 256);

/// Z_x(N) = { k in [-W + r, W - r] : tau_k(x) in N } with r the shell
/// index (0 for the full subshift).
SiteSet trace_set(const SeqPoint& x, const ShellSet& shell, std::int64_t window);

/// Locally constant symbol h(x, k): finitely many hops, and the value only
/// depends on x|_[-p, p]. Rows are additive; a pattern letter '*' matches any
/// letter.
class HoppingSymbol {
public:
  struct Row {
    Word pattern;
    std::int64_t hop;
    Complex value;
  };

  HoppingSymbol(int radius, std::vector<Row> rows);

  int radius() const { return radius_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::vector<std::int64_t> hop_support() const;
  std::int64_t max_hop() const;

  /// Value at the central pattern x|_[-p, p].
  Complex value(const Word& central, std::int64_t hop) const;
  Complex operator()(const SeqPoint& x, std::int64_t hop) const;

  HoppingSymbol negated() const;

private:
  int radius_;
  std::vector<Row> rows_;
};

/// Space of shift indices Z; every subshift kernel lives here.
SpacePtr shift_index_space();

/// K(k, l) = h(tau_l x, k - l) on Z_x(N).
BandKernel subshift_operator(const HoppingSymbol& h, const SeqPoint& x,
                             const ShellSet& shell, std::int64_t window);

/// Compression of the main-orbit Hamiltonian to M_0 = M minus X_inf, built
/// on orbit points tau_k(z): row x = tau_k(z) collects h(tau_{-l} x, l) for
/// the orbit points tau_{-l} x that stay in M, site labels being shift indices.
BandKernel main_orbit_operator(const HoppingSymbol& h, const SubshiftModel& model,
                               const ShellSet& shell, std::int64_t window);

struct SymbolReport {
  bool self_adjoint = true;
  bool covariant = true;
  /// (pattern, hop) pairs that break h(tau_k x, -k) = conj h(x, k).
  std::vector<std::pair<Word, std::int64_t>> self_adjoint_witnesses;
  /// Shifts m whose kernel disagrees with the index-shifted one.
  std::vector<std::int64_t> covariance_witnesses;
  bool ok() const { return self_adjoint && covariant; }
};

SymbolReport validate_symbol(const HoppingSymbol& h, const SubshiftModel& model,
                             std::int64_t window);

/// Kernel K_x attached to each point x of the subshift.
using KernelFamily = std::function<BandKernel(const SeqPoint&)>;

/// Shifts m with |m| <= max(1, window / 4) for which
/// K_{tau_m z}(k, l) != K_z(k + m, l + m) somewhere inside the window.
std::vector<std::int64_t> covariance_witnesses(const KernelFamily& family, const SeqPoint& z,
                                               std::int64_t window, std::int64_t max_hop);

struct AdmissibilityReport {
  /// Smallest period <= window, if z looks periodic on the window.
  std::optional<std::int64_t> period;
  /// Smallest q with z|_[-q, q-1] occurring only at 0 inside the window.
  std::optional<std::int64_t> isolating_radius;
  bool admissible_evidence() const { return !period && isolating_radius; }
};

AdmissibilityReport admissibility_probe(const SeqPoint& z, std::int64_t window);

struct SymbolRange {
  double lo;
  double hi;
  /// Bound on how far the grid extremes can sit from the true extremes.
  double grid_error;
};

/// Range of t -> sum_k h(x, k) e^{ikt} over a uniform torus grid, for an x
/// along whose orbit h is constant (the operator is then a Laurent operator).
/// Throws PreconditionError otherwise.
SymbolRange symbol_range(const HoppingSymbol& h, const SeqPoint& x_const,
                         int grid = 4096, std::int64_t check_window = 64);

/// Finite-resolution view of M_i -> X_inf: the largest distance from an orbit
/// point of M_i to the nearest sampled limit point, and whether every sampled
/// limit point stays inside M_i.
struct FellProbe {
  int index;
  double outer_distance;
  bool outer_ok;
  bool inner_ok;
};
std::vector<FellProbe> fell_convergence_probe(const SubshiftModel& model,
                                              int max_index, std::int64_t window);

}  // namespace persson
