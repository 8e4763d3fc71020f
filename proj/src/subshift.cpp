#include "persson/subshift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "persson/errors.hpp"
#include "persson/metric_space.hpp"

namespace persson {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool pattern_matches(const Word& pattern, const Word& central) {
  if (pattern.size() != central.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '*' && pattern[i] != central[i]) return false;
  }
  return true;
}

}  // namespace

// --------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<Letter> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw StructuralError("empty alphabet");
  auto sorted = letters_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw StructuralError("duplicate letters in alphabet");
  }
  if (contains('*')) throw StructuralError("'*' is reserved as a wildcard");
}

bool Alphabet::contains(Letter c) const {
  return std::find(letters_.begin(), letters_.end(), c) != letters_.end();
}

void Alphabet::check(const Word& w) const {
  for (Letter c : w) {
    if (!contains(c)) {
      throw StructuralError(std::string("letter '") + c + "' not in alphabet");
    }
  }
}

// --------------------------------------------------------------- SeqPoint

SeqPoint::SeqPoint(Rule rule) : rule_(std::move(rule)) {
  if (const auto* p = std::get_if<Periodic>(&rule_); p && p->word.empty()) {
    throw StructuralError("periodic rule with an empty word");
  }
  if (const auto* s = std::get_if<Shifted>(&rule_); s && !s->base) {
    throw StructuralError("shifted rule without a base sequence");
  }
}

SeqPoint SeqPoint::periodic(Word w, std::int64_t phase) {
  return SeqPoint(Periodic{std::move(w), phase});
}

Letter SeqPoint::at(std::int64_t j) const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return c.letter; },
          [j](const Periodic& p) {
            const auto n = static_cast<std::int64_t>(p.word.size());
            return p.word[static_cast<std::size_t>(floor_mod(j + p.phase, n))];
          },
          [j](const Step& s) { return j < s.at ? s.left : s.right; },
          [j](const PowersOfTwo& p) {
            const auto a = static_cast<std::uint64_t>(j < 0 ? -j : j);
            const bool mark = is_power_of_two(a) && (p.include_one || a != 1);
            return mark ? p.mark : p.base;
          },
          [j](const Explicit& e) {
            auto it = e.values.find(j);
            return it == e.values.end() ? e.fill : it->second;
          },
          [j](const Shifted& s) { return s.base->at(j - s.k); },
      },
      rule_);
}

SeqPoint SeqPoint::shifted(std::int64_t k) const {
  if (const auto* s = std::get_if<Shifted>(&rule_)) {
    return SeqPoint(Shifted{s->base, s->k + k});
  }
  return SeqPoint(Shifted{std::make_shared<const SeqPoint>(*this), k});
}

std::string SeqPoint::describe() const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return std::string("constant(") + c.letter + ")"; },
          [](const Periodic& p) {
            return "periodic(" + p.word + ", " + std::to_string(p.phase) + ")";
          },
          [](const Step& s) {
            return std::string("step(") + s.left + ", " + s.right + ", " +
                   std::to_string(s.at) + ")";
          },
          [](const PowersOfTwo& p) {
            return std::string("powers_of_two(") + p.base + ", " + p.mark +
                   (p.include_one ? ", m>=0)" : ", m>=1)");
          },
          [](const Explicit& e) {
            return "explicit(" + std::to_string(e.values.size()) + " sites, fill " +
                   std::string(1, e.fill) + ")";
          },
          [](const Shifted& s) {
            return "shift(" + s.base->describe() + ", " + std::to_string(s.k) + ")";
          },
      },
      rule_);
}

Word evaluate(const SeqPoint& x, std::int64_t i, std::int64_t j) {
  if (i > j) throw PreconditionError("evaluate needs i <= j");
  Word w;
  w.reserve(static_cast<std::size_t>(j - i + 1));
  for (std::int64_t k = i; k <= j; ++k) w.push_back(x.at(k));
  return w;
}

std::set<Word> dictionary(const SeqPoint& x, std::size_t max_len,
                          std::int64_t window) {
  if (window < 0) throw PreconditionError("negative window");
  if (max_len > static_cast<std::size_t>(2 * window + 1)) {
    throw PreconditionError("max_len does not fit in the inspected window");
  }
  const Word seg = evaluate(x, -window, window);
  std::set<Word> out{Word{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (std::size_t s = 0; s + len <= seg.size(); ++s) out.insert(seg.substr(s, len));
  }
  return out;
}

MetricValue subshift_metric(const SeqPoint& x, const SeqPoint& y,
                            std::int64_t window) {
  if (window < 1) throw PreconditionError("metric window must be >= 1");
  if (x == y) return {0.0, true};
  for (std::int64_t r = 0; r <= window; ++r) {
    if (x.at(r) != y.at(r) || x.at(-r) != y.at(-r)) {
      return {1.0 / (1.0 + static_cast<double>(r)), true};
    }
  }
  return {1.0 / (static_cast<double>(window) + 2.0), false};
}

// ---------------------------------------------------------- SubshiftModel

SubshiftModel::SubshiftModel(Alphabet alphabet, SeqPoint generator,
                             std::vector<SeqPoint> limit_generators)
    : alphabet_(std::move(alphabet)),
      generator_(std::move(generator)),
      limits_(std::move(limit_generators)) {}

std::set<Word> dictionary(const SubshiftModel& model, std::size_t max_len,
                          std::int64_t window) {
  return dictionary(model.generator(), max_len, window);
}

ModelCheck validate_model(const SubshiftModel& model, std::size_t max_len,
                          std::int64_t window) {
  ModelCheck out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.problems.push_back(std::move(msg));
  };
  auto letters_ok = [&](const SeqPoint& p, const std::string& name) {
    try {
      model.alphabet().check(evaluate(p, -window, window));
    } catch (const StructuralError& e) {
      fail(name + ": " + e.what());
    }
  };
  letters_ok(model.generator(), "generator");
  for (std::size_t g = 0; g < model.limit_generators().size(); ++g) {
    letters_ok(model.limit_generators()[g], "limit generator " + std::to_string(g));
  }

  const auto probe = admissibility_probe(model.generator(), window);
  if (probe.period) {
    fail("generator is periodic with period " + std::to_string(*probe.period));
  }
  if (!probe.isolating_radius) fail("no isolating cylinder found for the generator");

  const auto dz = dictionary(model, max_len, window);
  const std::int64_t inner = std::max<std::int64_t>(
      static_cast<std::int64_t>(max_len), window / 4);
  for (std::size_t g = 0; g < model.limit_generators().size(); ++g) {
    for (const auto& w : dictionary(model.limit_generators()[g], max_len, inner)) {
      if (!dz.contains(w)) {
        fail("word '" + w + "' of limit generator " + std::to_string(g) +
             " does not occur in the generator");
        break;
      }
    }
  }
  return out;
}

// --------------------------------------------------------------- ShellSet

ShellSet ShellSet::full() { return ShellSet(); }

ShellSet ShellSet::shell(const SubshiftModel& model, int index,
                         std::int64_t scan) {
  if (index < 1) throw PreconditionError("shell index must be >= 1");
  ShellSet s;
  s.index_ = index;
  const std::int64_t r = index - 1;
  const std::int64_t reach = std::max<std::int64_t>(scan, 2 * r + 1);
  for (const auto& g : model.limit_generators()) {
    const Word seg = evaluate(g, -reach - r, reach + r);
    const auto len = static_cast<std::size_t>(2 * r + 1);
    for (std::size_t p = 0; p + len <= seg.size(); ++p) s.patterns_.insert(seg.substr(p, len));
  }
  return s;
}

bool ShellSet::contains_pattern(const Word& central) const {
  return is_full() || patterns_.contains(central);
}

bool ShellSet::contains(const SeqPoint& y) const {
  if (is_full()) return true;
  return patterns_.contains(evaluate(y, -radius(), radius()));
}

ShellSet fell_shell(const SubshiftModel& model, int i, std::int64_t scan) {
  return ShellSet::shell(model, i, scan);
}

SiteSet trace_set(const SeqPoint& x, const ShellSet& shell, std::int64_t window) {
  const std::int64_t i = shell.index();
  if (window < i) {
    throw RangeError("window " + std::to_string(window) +
                     " is smaller than the shell index " + std::to_string(i));
  }
  if (shell.is_full()) return SiteSet::range(-window, window);
  const std::int64_t r = shell.radius();
  // (tau_k x)|_[-r, r] = x|_[-r-k, r-k]
  const Word seg = evaluate(x, -window - r, window + r);
  const auto len = static_cast<std::size_t>(2 * r + 1);
  std::vector<Site> ks;
  for (std::int64_t k = -window + i; k <= window - i; ++k) {
    const auto start = static_cast<std::size_t>(-r - k - (-window - r));
    if (shell.contains_pattern(seg.substr(start, len))) ks.push_back(k);
  }
  return SiteSet(std::move(ks));
}

// ---------------------------------------------------------- HoppingSymbol

HoppingSymbol::HoppingSymbol(int radius, std::vector<Row> rows)
    : radius_(radius), rows_(std::move(rows)) {
  if (radius_ < 0) throw StructuralError("negative dependence radius");
  const auto len = static_cast<std::size_t>(2 * radius_ + 1);
  for (const auto& r : rows_) {
    if (r.pattern.size() != len) {
      throw StructuralError("symbol pattern '" + r.pattern + "' must have length " +
                            std::to_string(len));
    }
  }
}

std::vector<std::int64_t> HoppingSymbol::hop_support() const {
  std::vector<std::int64_t> hops;
  for (const auto& r : rows_)
    if (r.value != 0.0) hops.push_back(r.hop);
  std::sort(hops.begin(), hops.end());
  hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
  return hops;
}

std::int64_t HoppingSymbol::max_hop() const {
  std::int64_t m = 0;
  for (auto k : hop_support()) m = std::max(m, k < 0 ? -k : k);
  return m;
}

Complex HoppingSymbol::value(const Word& central, std::int64_t hop) const {
  Complex v = 0.0;
  for (const auto& r : rows_) {
    if (r.hop == hop && pattern_matches(r.pattern, central)) v += r.value;
  }
  return v;
}

Complex HoppingSymbol::operator()(const SeqPoint& x, std::int64_t hop) const {
  return value(evaluate(x, -radius_, radius_), hop);
}

HoppingSymbol HoppingSymbol::negated() const {
  auto rows = rows_;
  for (auto& r : rows) r.value = -r.value;
  return HoppingSymbol(radius_, std::move(rows));
}

SpacePtr shift_index_space() {
  static const SpacePtr space = std::make_shared<const SiteSpace>(
      "Z", [](Site x, Site y) { return static_cast<double>(x > y ? x - y : y - x); },
      SiteSet(std::vector<Site>{0}), 1.0, std::map<double, std::size_t>{});
  return space;
}

BandKernel subshift_operator(const HoppingSymbol& h, const SeqPoint& x,
                             const ShellSet& shell, std::int64_t window) {
  if (window < 1) throw RangeError("operator window must be >= 1");
  const SiteSet sites = trace_set(x, shell, window);
  const auto hops = h.hop_support();
  const std::int64_t p = h.radius();
  std::vector<KernelEntry> entries;
  for (Site l : sites) {
    // central pattern of tau_l x is x|_[-p-l, p-l]
    const Word central = evaluate(x, -p - l, p - l);
    for (auto hop : hops) {
      const Site k = l + hop;
      if (!sites.contains(k)) continue;
      entries.push_back({k, l, h.value(central, hop)});
    }
  }
  return BandKernel(shift_index_space(), std::move(entries),
                    static_cast<double>(h.max_hop()));
}

BandKernel main_orbit_operator(const HoppingSymbol& h, const SubshiftModel& model,
                               const ShellSet& shell, std::int64_t window) {
  if (window < 1) throw RangeError("operator window must be >= 1");
  const SeqPoint& z = model.generator();
  const SiteSet orbit = trace_set(z, shell, window);
  const std::int64_t lo = orbit.empty() ? 0 : orbit[0];
  const std::int64_t hi = orbit.empty() ? -1 : orbit[orbit.size() - 1];
  const std::int64_t edge = shell.is_full() ? window : window - shell.index();
  const auto hops = h.hop_support();
  std::vector<KernelEntry> entries;
  for (Site k : orbit) {
    const SeqPoint x = z.shifted(k);
    for (auto l : hops) {
      // neighbour y = tau_{-l}(x) = tau_{k-l}(z); it must stay in M and in
      // the inspected part of the orbit
      const SeqPoint y = x.shifted(-l);
      const Site m = k - l;
      if (m < -edge || m > edge || !shell.contains(y)) continue;
      if (m < lo || m > hi) continue;
      entries.push_back({k, m, h(y, l)});
    }
  }
  return BandKernel(shift_index_space(), std::move(entries),
                    static_cast<double>(h.max_hop()));
}

// -------------------------------------------------------------- validators

SymbolReport validate_symbol(const HoppingSymbol& h, const SubshiftModel& model,
                             std::int64_t window) {
  SymbolReport rep;
  std::set<std::pair<Word, std::int64_t>> seen;
  auto hops = h.hop_support();
  for (auto k : h.hop_support()) hops.push_back(-k);
  std::sort(hops.begin(), hops.end());
  hops.erase(std::unique(hops.begin(), hops.end()), hops.end());

  std::vector<SeqPoint> sources{model.generator()};
  for (const auto& g : model.limit_generators()) sources.push_back(g);
  for (const auto& src : sources) {
    for (std::int64_t l = -window; l <= window; ++l) {
      const SeqPoint y = src.shifted(l);
      for (auto k : hops) {
        const Complex forward = h(y, k);
        const Complex backward = h(y.shifted(k), -k);
        if (backward != std::conj(forward)) {
          rep.self_adjoint = false;
          const Word central = evaluate(y, -h.radius(), h.radius());
          if (seen.emplace(central, k).second && rep.self_adjoint_witnesses.size() < 16) {
            rep.self_adjoint_witnesses.emplace_back(central, k);
          }
        }
      }
    }
  }

  const SeqPoint& z = model.generator();
  rep.covariance_witnesses = covariance_witnesses(
      [&](const SeqPoint& x) { return subshift_operator(h, x, ShellSet::full(), window); },
      z, window, h.max_hop());
  rep.covariant = rep.covariance_witnesses.empty();
  return rep;
}

std::vector<std::int64_t> covariance_witnesses(const KernelFamily& family, const SeqPoint& z,
                                               std::int64_t window, std::int64_t max_hop) {
  std::vector<std::int64_t> out;
  const std::int64_t margin = std::max<std::int64_t>(1, window / 4);
  const BandKernel base = family(z);
  for (std::int64_t m = -margin; m <= margin; ++m) {
    const BandKernel moved = family(z.shifted(m));
    bool ok = true;
    for (std::int64_t k = -window + margin; k <= window - margin && ok; ++k) {
      for (std::int64_t d = -max_hop; d <= max_hop; ++d) {
        const std::int64_t l = k - d;
        if (l < -window + margin || l > window - margin) continue;
        if (moved(k, l) != base(k + m, l + m)) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) out.push_back(m);
  }
  return out;
}

AdmissibilityReport admissibility_probe(const SeqPoint& z, std::int64_t window) {
  AdmissibilityReport rep;
  if (window < 1) return rep;
  const Word seg = evaluate(z, -window, window);
  const auto n = static_cast<std::int64_t>(seg.size());
  auto at = [&](std::int64_t j) { return seg[static_cast<std::size_t>(j + window)]; };

  for (std::int64_t period = 1; period <= window; ++period) {
    bool periodic = true;
    for (std::int64_t j = -window; j + period <= window; ++j) {
      if (at(j) != at(j + period)) {
        periodic = false;
        break;
      }
    }
    if (periodic) {
      rep.period = period;
      break;
    }
  }

  for (std::int64_t q = 1; 2 * q <= n; ++q) {
    const Word pattern = evaluate(z, -q, q - 1);
    int hits = 0;
    bool only_origin = true;
    for (std::int64_t s = -window + q; s + q - 1 <= window; ++s) {
      bool match = true;
      for (std::int64_t t = 0; t < 2 * q; ++t) {
        if (at(s - q + t) != pattern[static_cast<std::size_t>(t)]) {
          match = false;
          break;
        }
      }
      if (match) {
        ++hits;
        if (s != 0) {
          only_origin = false;
          break;
        }
      }
    }
    if (hits == 1 && only_origin) {
      rep.isolating_radius = q;
      break;
    }
  }
  return rep;
}

SymbolRange symbol_range(const HoppingSymbol& h, const SeqPoint& x_const,
                         int grid, std::int64_t check_window) {
  if (grid < 2) throw PreconditionError("symbol grid needs at least 2 points");
  const auto hops = h.hop_support();
  std::vector<Complex> coeff;
  for (auto k : hops) coeff.push_back(h(x_const, k));
  for (std::int64_t l = -check_window; l <= check_window; ++l) {
    const SeqPoint y = x_const.shifted(l);
    for (std::size_t i = 0; i < hops.size(); ++i) {
      if (h(y, hops[i]) != coeff[i]) {
        throw PreconditionError("symbol varies along the orbit of " +
                                x_const.describe() + "; not a Laurent operator");
      }
    }
  }
  double lip = 0.0;
  for (std::size_t i = 0; i < hops.size(); ++i) {
    lip += std::abs(static_cast<double>(hops[i])) * std::abs(coeff[i]);
  }
  SymbolRange out{std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  lip * std::numbers::pi / grid};
  for (int j = 0; j < grid; ++j) {
    const double t = 2.0 * std::numbers::pi * j / grid;
    Complex s = 0.0;
    for (std::size_t i = 0; i < hops.size(); ++i) {
      s += coeff[i] * std::polar(1.0, static_cast<double>(hops[i]) * t);
    }
    if (std::abs(s.imag()) > 1e-9 * (1.0 + std::abs(s.real()))) {
      throw PreconditionError("symbol is not real; h is not self-adjoint");
    }
    out.lo = std::min(out.lo, s.real());
    out.hi = std::max(out.hi, s.real());
  }
  if (hops.empty()) out.lo = out.hi = 0.0;
  return out;
}

std::vector<FellProbe> fell_convergence_probe(const SubshiftModel& model,
                                              int max_index, std::int64_t window) {
  std::vector<FellProbe> out;
  std::vector<SeqPoint> limit_points;
  for (const auto& g : model.limit_generators())
    for (std::int64_t m = -window; m <= window; ++m) limit_points.push_back(g.shifted(m));

  for (int i = 1; i <= max_index; ++i) {
    const ShellSet shell = fell_shell(model, i, 2 * window + i);
    FellProbe p{i, 0.0, true, true};
    for (Site k : trace_set(model.generator(), shell, window)) {
      const SeqPoint y = model.generator().shifted(k);
      double best = 1.0;
      for (const auto& lp : limit_points) {
        best = std::min(best, subshift_metric(y, lp, window).value);
        if (best <= 1.0 / (i + 1)) break;
      }
      p.outer_distance = std::max(p.outer_distance, best);
    }
    p.outer_ok = p.outer_distance <= 1.0 / (i + 1);
    for (const auto& lp : limit_points) {
      if (!shell.contains(lp)) {
        p.inner_ok = false;
        break;
      }
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace persson
