#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace persson {

class SiteSpace;
using SpacePtr = std::shared_ptr<const SiteSpace>;

using Complex = std::complex<double>;

/// Integer label of a point of the underlying discrete space. For subshift
/// problems the label is the shift index k of the orbit point.
using Site = std::int64_t;

/// Sorted, duplicate-free set of sites. A set built as "window minus a finite
/// part" remembers the removed part so reports can show what was cut out.
class SiteSet {
public:
  SiteSet() = default;
  explicit SiteSet(std::vector<Site> ids);

  static SiteSet range(Site first, Site last);
  static SiteSet cofinite(const SiteSet& window, std::vector<Site> removed);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(Site s) const;
  /// Position of `s` in the sorted list, or -1.
  std::ptrdiff_t index_of(Site s) const;

  std::span<const Site> ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  Site operator[](std::size_t i) const { return ids_[i]; }

  bool is_cofinite() const { return cofinite_; }
  std::span<const Site> removed() const { return removed_; }

  bool is_subset_of(const SiteSet& other) const;

  friend bool operator==(const SiteSet& a, const SiteSet& b) {
    return a.ids_ == b.ids_;
  }

private:
  std::vector<Site> ids_;
  std::vector<Site> removed_;
  bool cofinite_ = false;
};

struct KernelEntry {
  Site row;
  Site col;
  Complex value;

  friend bool operator==(const KernelEntry&, const KernelEntry&) = default;
};

/// Finitely supported two-site kernel K(x, y) of a band operator. Entries are
/// stored as a coordinate list sorted by (row, col); absent entries are zero.
/// Every kernel belongs to one SiteSpace and its entries respect the declared
/// bandwidth in that space's metric.
class BandKernel {
public:
  /// Builds a kernel, summing duplicate coordinates and dropping exact zeros.
  /// Throws StructuralError if an entry sits farther apart than `bandwidth`.
  BandKernel(SpacePtr space, std::vector<KernelEntry> entries, double bandwidth);

  static BandKernel zero(SpacePtr space);
  static BandKernel identity(SpacePtr space, const SiteSet& sites);

  const SpacePtr& space() const { return space_; }
  std::span<const KernelEntry> entries() const { return entries_; }
  double bandwidth() const { return bandwidth_; }
  double sup_bound() const { return sup_bound_; }
  std::size_t nnz() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }
  bool is_real() const;

  Complex operator()(Site x, Site y) const;

  /// Entries of row `x` as a contiguous slice.
  std::span<const KernelEntry> row(Site x) const;

  friend bool operator==(const BandKernel& a, const BandKernel& b);

private:
  BandKernel(SpacePtr space, double bandwidth);

  SpacePtr space_;
  std::vector<KernelEntry> entries_;
  double bandwidth_ = 0.0;
  double sup_bound_ = 0.0;
};

/// Dense vector indexed by a SiteSet.
struct FiniteVector {
  SiteSet sites;
  std::vector<Complex> values;

  FiniteVector() = default;
  FiniteVector(SiteSet s, std::vector<Complex> v);
  static FiniteVector zeros(SiteSet s);

  double norm() const;
};

FiniteVector apply(const BandKernel& k, const FiniteVector& u,
                   const SiteSet& window);

BandKernel compose(const BandKernel& k1, const BandKernel& k2);
BandKernel adjoint(const BandKernel& k);
BandKernel scale(const BandKernel& k, Complex factor);
BandKernel add(const BandKernel& k1, const BandKernel& k2);
BandKernel subtract(const BandKernel& k1, const BandKernel& k2);

/// Keeps the entries with both sites in `m`.
BandKernel restrict(const BandKernel& k, const SiteSet& m);

/// Restriction defect restrict(k1 k2, m) - restrict(k1, m) restrict(k2, m),
/// computed by that subtraction.
BandKernel defect(const BandKernel& k1, const BandKernel& k2, const SiteSet& m);

/// Same quantity summed directly over middle sites z outside `m`:
/// result(x, y) = sum_{z not in m} k1(x, z) k2(z, y) for x, y in m.
BandKernel defect_middle_sum(const BandKernel& k1, const BandKernel& k2,
                             const SiteSet& m);

/// Largest absolute row sum and column sum over the window.
struct RowColumnSums {
  double max_row = 0.0;
  double max_col = 0.0;
};
RowColumnSums row_column_sums(const BandKernel& k, const SiteSet& window);

double hahn_norm(const BandKernel& k, const SiteSet& window);
double schur_bound(const BandKernel& k, const SiteSet& window);

inline constexpr double kDefaultSelfAdjointTol = 1e-12;

/// max |K(x,y) - conj(K(y,x))| over all stored pairs.
double self_adjoint_defect(const BandKernel& k);
bool validate_self_adjoint(const BandKernel& k,
                           double tol = kDefaultSelfAdjointTol);

/// Text interchange: a `bandwidth r` header followed by `x y re im` lines.
/// Doubles are written in shortest round-trip form.
void write_kernel(std::ostream& os, const BandKernel& k);
BandKernel read_kernel(std::istream& is, SpacePtr space);

}  // namespace persson
