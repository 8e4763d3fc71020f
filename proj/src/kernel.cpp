#include "persson/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "persson/errors.hpp"
#include "persson/metric_space.hpp"

namespace persson {

namespace {

bool entry_less(const KernelEntry& a, const KernelEntry& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

void require_same_space(const BandKernel& a, const BandKernel& b) {
  if (a.space()->key() != b.space()->key()) {
    throw StructuralError("kernels belong to different spaces: '" +
                          a.space()->key() + "' vs '" + b.space()->key() + "'");
  }
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---------------------------------------------------------------- SiteSet

SiteSet::SiteSet(std::vector<Site> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

SiteSet SiteSet::range(Site first, Site last) {
  SiteSet s;
  if (last >= first) {
    s.ids_.reserve(static_cast<std::size_t>(last - first + 1));
    for (Site k = first; k <= last; ++k) s.ids_.push_back(k);
  }
  return s;
}

SiteSet SiteSet::cofinite(const SiteSet& window, std::vector<Site> removed) {
  SiteSet cut(std::move(removed));
  SiteSet s;
  s.ids_.reserve(window.size());
  std::set_difference(window.ids_.begin(), window.ids_.end(), cut.ids_.begin(),
                      cut.ids_.end(), std::back_inserter(s.ids_));
  // only the part of the cut that actually lay in the window is recorded
  std::set_intersection(window.ids_.begin(), window.ids_.end(),
                        cut.ids_.begin(), cut.ids_.end(),
                        std::back_inserter(s.removed_));
  s.cofinite_ = true;
  return s;
}

bool SiteSet::contains(Site s) const {
  return std::binary_search(ids_.begin(), ids_.end(), s);
}

std::ptrdiff_t SiteSet::index_of(Site s) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), s);
  if (it == ids_.end() || *it != s) return -1;
  return it - ids_.begin();
}

bool SiteSet::is_subset_of(const SiteSet& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(),
                       ids_.end());
}

// ------------------------------------------------------------- BandKernel

BandKernel::BandKernel(SpacePtr space, double bandwidth)
    : space_(std::move(space)), bandwidth_(bandwidth) {
  if (!space_) throw StructuralError("kernel without a space");
  if (!(bandwidth_ >= 0.0)) throw StructuralError("negative bandwidth");
}

BandKernel::BandKernel(SpacePtr space, std::vector<KernelEntry> entries,
                       double bandwidth)
    : BandKernel(std::move(space), bandwidth) {
  std::sort(entries.begin(), entries.end(), entry_less);
  entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (!entries_.empty() && entries_.back().row == e.row &&
        entries_.back().col == e.col) {
      entries_.back().value += e.value;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const KernelEntry& e) { return e.value == 0.0; });
  for (const auto& e : entries_) {
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
      throw StructuralError("non-finite kernel entry at (" +
                            std::to_string(e.row) + ", " +
                            std::to_string(e.col) + ")");
    }
    const double d = space_->dist(e.row, e.col);
    if (d > bandwidth_) {
      throw StructuralError("entry (" + std::to_string(e.row) + ", " +
                            std::to_string(e.col) + ") at distance " +
                            shortest(d) + " exceeds bandwidth " +
                            shortest(bandwidth_));
    }
    sup_bound_ = std::max(sup_bound_, std::abs(e.value));
  }
}

BandKernel BandKernel::zero(SpacePtr space) {
  return BandKernel(std::move(space), 0.0);
}

BandKernel BandKernel::identity(SpacePtr space, const SiteSet& sites) {
  std::vector<KernelEntry> e;
  e.reserve(sites.size());
  for (Site s : sites) e.push_back({s, s, 1.0});
  return BandKernel(std::move(space), std::move(e), 0.0);
}

bool BandKernel::is_real() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const KernelEntry& e) { return e.value.imag() == 0.0; });
}

Complex BandKernel::operator()(Site x, Site y) const {
  KernelEntry probe{x, y, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, entry_less);
  if (it == entries_.end() || it->row != x || it->col != y) return 0.0;
  return it->value;
}

std::span<const KernelEntry> BandKernel::row(Site x) const {
  auto lo = std::lower_bound(
      entries_.begin(), entries_.end(), x,
      [](const KernelEntry& e, Site r) { return e.row < r; });
  auto hi = std::upper_bound(
      lo, entries_.end(), x,
      [](Site r, const KernelEntry& e) { return r < e.row; });
  return {lo, hi};
}

bool operator==(const BandKernel& a, const BandKernel& b) {
  return a.space_->key() == b.space_->key() && a.entries_ == b.entries_;
}

// ----------------------------------------------------------- FiniteVector

FiniteVector::FiniteVector(SiteSet s, std::vector<Complex> v)
    : sites(std::move(s)), values(std::move(v)) {
  if (values.size() != sites.size()) {
    throw StructuralError("vector length " + std::to_string(values.size()) +
                          " does not match site count " +
                          std::to_string(sites.size()));
  }
}

FiniteVector FiniteVector::zeros(SiteSet s) {
  std::vector<Complex> v(s.size(), 0.0);
  return FiniteVector(std::move(s), std::move(v));
}

double FiniteVector::norm() const {
  double acc = 0.0;
  for (const auto& z : values) acc += std::norm(z);
  return std::sqrt(acc);
}

// ------------------------------------------------------------- operations

FiniteVector apply(const BandKernel& k, const FiniteVector& u,
                   const SiteSet& window) {
  if (!(u.sites == window)) {
    throw StructuralError("vector is not indexed by the given window");
  }
  if (u.values.size() != window.size()) {
    throw StructuralError("vector length does not match window");
  }
  std::vector<Complex> out(window.size(), 0.0);
  for (std::size_t i = 0; i < window.size(); ++i) {
    for (const auto& e : k.row(window[i])) {
      const auto j = window.index_of(e.col);
      if (j >= 0) out[i] += e.value * u.values[static_cast<std::size_t>(j)];
    }
  }
  return FiniteVector(window, std::move(out));
}

BandKernel compose(const BandKernel& k1, const BandKernel& k2) {
  require_same_space(k1, k2);
  std::map<std::pair<Site, Site>, Complex> acc;
  for (const auto& a : k1.entries()) {
    for (const auto& b : k2.row(a.col)) acc[{a.row, b.col}] += a.value * b.value;
  }
  std::vector<KernelEntry> out;
  out.reserve(acc.size());
  for (const auto& [rc, v] : acc) out.push_back({rc.first, rc.second, v});
  return BandKernel(k1.space(), std::move(out),
                    k1.bandwidth() + k2.bandwidth());
}

BandKernel adjoint(const BandKernel& k) {
  std::vector<KernelEntry> out;
  out.reserve(k.nnz());
  for (const auto& e : k.entries()) out.push_back({e.col, e.row, std::conj(e.value)});
  return BandKernel(k.space(), std::move(out), k.bandwidth());
}

BandKernel scale(const BandKernel& k, Complex factor) {
  std::vector<KernelEntry> out(k.entries().begin(), k.entries().end());
  for (auto& e : out) e.value *= factor;
  return BandKernel(k.space(), std::move(out), k.bandwidth());
}

BandKernel add(const BandKernel& k1, const BandKernel& k2) {
  require_same_space(k1, k2);
  std::vector<KernelEntry> out(k1.entries().begin(), k1.entries().end());
  out.insert(out.end(), k2.entries().begin(), k2.entries().end());
  return BandKernel(k1.space(), std::move(out),
                    std::max(k1.bandwidth(), k2.bandwidth()));
}

BandKernel subtract(const BandKernel& k1, const BandKernel& k2) {
  return add(k1, scale(k2, -1.0));
}

BandKernel restrict(const BandKernel& k, const SiteSet& m) {
  std::vector<KernelEntry> out;
  for (const auto& e : k.entries()) {
    if (m.contains(e.row) && m.contains(e.col)) out.push_back(e);
  }
  return BandKernel(k.space(), std::move(out), k.bandwidth());
}

BandKernel defect(const BandKernel& k1, const BandKernel& k2, const SiteSet& m) {
  return subtract(restrict(compose(k1, k2), m),
                  compose(restrict(k1, m), restrict(k2, m)));
}

BandKernel defect_middle_sum(const BandKernel& k1, const BandKernel& k2,
                             const SiteSet& m) {
  require_same_space(k1, k2);
  std::map<std::pair<Site, Site>, Complex> acc;
  for (const auto& a : k1.entries()) {
    if (!m.contains(a.row) || m.contains(a.col)) continue;
    for (const auto& b : k2.row(a.col)) {
      if (m.contains(b.col)) acc[{a.row, b.col}] += a.value * b.value;
    }
  }
  std::vector<KernelEntry> out;
  for (const auto& [rc, v] : acc) out.push_back({rc.first, rc.second, v});
  return BandKernel(k1.space(), std::move(out),
                    k1.bandwidth() + k2.bandwidth());
}

RowColumnSums row_column_sums(const BandKernel& k, const SiteSet& window) {
  std::map<Site, double> rows;
  std::map<Site, double> cols;
  for (const auto& e : k.entries()) {
    if (!window.contains(e.row) || !window.contains(e.col)) continue;
    rows[e.row] += std::abs(e.value);
    cols[e.col] += std::abs(e.value);
  }
  RowColumnSums s;
  for (const auto& [_, v] : rows) s.max_row = std::max(s.max_row, v);
  for (const auto& [_, v] : cols) s.max_col = std::max(s.max_col, v);
  return s;
}

double hahn_norm(const BandKernel& k, const SiteSet& window) {
  const auto s = row_column_sums(k, window);
  return std::max(s.max_row, s.max_col);
}

double schur_bound(const BandKernel& k, const SiteSet& window) {
  const auto s = row_column_sums(k, window);
  return std::sqrt(s.max_row) * std::sqrt(s.max_col);
}

double self_adjoint_defect(const BandKernel& k) {
  double worst = 0.0;
  for (const auto& e : k.entries()) {
    worst = std::max(worst, std::abs(e.value - std::conj(k(e.col, e.row))));
  }
  return worst;
}

bool validate_self_adjoint(const BandKernel& k, double tol) {
  if (tol < 0.0) throw PreconditionError("negative self-adjointness tolerance");
  return self_adjoint_defect(k) <= tol;
}

// ------------------------------------------------------------ text format

void write_kernel(std::ostream& os, const BandKernel& k) {
  os << "bandwidth " << shortest(k.bandwidth()) << '\n';
  for (const auto& e : k.entries()) {
    os << e.row << ' ' << e.col << ' ' << shortest(e.value.real()) << ' '
       << shortest(e.value.imag()) << '\n';
  }
}

namespace {

double parse_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw StructuralError("kernel line " + std::to_string(line) +
                          ": bad number '" + tok + "'");
  }
  return v;
}

Site parse_site(const std::string& tok, std::size_t line) {
  Site v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw StructuralError("kernel line " + std::to_string(line) +
                          ": bad site '" + tok + "'");
  }
  return v;
}

}  // namespace

BandKernel read_kernel(std::istream& is, SpacePtr space) {
  std::string line;
  std::size_t lineno = 0;
  double bandwidth = -1.0;
  std::vector<KernelEntry> entries;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "bandwidth") {
      if (tok.size() != 2) throw StructuralError("malformed bandwidth header");
      bandwidth = parse_double(tok[1], lineno);
      continue;
    }
    if (tok.size() != 4) {
      throw StructuralError("kernel line " + std::to_string(lineno) +
                            ": expected 'x y re im'");
    }
    entries.push_back({parse_site(tok[0], lineno), parse_site(tok[1], lineno),
                       Complex(parse_double(tok[2], lineno),
                               parse_double(tok[3], lineno))});
  }
  if (bandwidth < 0.0) throw StructuralError("missing 'bandwidth r' header");
  return BandKernel(std::move(space), std::move(entries), bandwidth);
}

}  // namespace persson
