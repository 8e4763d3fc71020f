#include "persson/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <ostream>

#include <Eigen/Dense>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "persson/errors.hpp"

namespace persson {

namespace {

template <class Scalar>
Scalar cast_scalar(Complex v) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return v.real();
  } else {
    return v;
  }
}

/// Compression of a kernel to a window, in compressed-row form over window
/// positions.
template <class Scalar>
struct Csr {
  std::size_t n = 0;
  std::vector<std::size_t> start;
  std::vector<std::size_t> col;
  std::vector<Scalar> val;
  std::size_t index_bandwidth = 0;

  Csr(const BandKernel& k, const SiteSet& window) : n(window.size()) {
    start.reserve(n + 1);
    start.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& e : k.row(window[i])) {
        const auto j = window.index_of(e.col);
        if (j < 0) continue;
        const auto uj = static_cast<std::size_t>(j);
        col.push_back(uj);
        val.push_back(cast_scalar<Scalar>(e.value));
        index_bandwidth = std::max(index_bandwidth, i > uj ? i - uj : uj - i);
      }
      start.push_back(col.size());
    }
  }

  template <class In, class Out>
  void multiply(const In& x, Out& y) const {
    for (std::size_t i = 0; i < n; ++i) {
      Scalar acc{0};
      for (std::size_t p = start[i]; p < start[i + 1]; ++p) acc += val[p] * x[col[p]];
      y[i] = acc;
    }
  }

  double abs_row_max() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t p = start[i]; p < start[i + 1]; ++p) s += std::abs(val[p]);
      m = std::max(m, s);
    }
    return m;
  }
};

template <class Scalar>
std::vector<double> dense_eigenvalues(const Csr<Scalar>& a) {
  const auto n = a.n;
  std::vector<double> w(n);
  const std::size_t kd = a.index_bandwidth;
  if (kd == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      Scalar d{0};
      for (std::size_t p = a.start[i]; p < a.start[i + 1]; ++p) d += a.val[p];
      w[i] = std::real(d);
    }
    std::sort(w.begin(), w.end());
    return w;
  }
  if (kd * 8 <= n) {
    // band storage, upper triangle, column major: ab[kd + i - j + j * ldab]
    const std::size_t ldab = kd + 1;
    std::vector<Scalar> ab(ldab * n, Scalar{0});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = a.start[i]; p < a.start[i + 1]; ++p) {
        const std::size_t j = a.col[p];
        if (i <= j) ab[kd + i - j + j * ldab] = a.val[p];
      }
    }
    lapack_int info = 0;
    Scalar dummy{0};
    const auto ln = static_cast<lapack_int>(n);
    const auto lkd = static_cast<lapack_int>(kd);
    const auto lld = static_cast<lapack_int>(ldab);
    if constexpr (std::is_same_v<Scalar, double>) {
      info = LAPACKE_dsbevd(LAPACK_COL_MAJOR, 'N', 'U', ln, lkd, ab.data(), lld,
                            w.data(), &dummy, 1);
    } else {
      info = LAPACKE_zhbevd(LAPACK_COL_MAJOR, 'N', 'U', ln, lkd, ab.data(), lld,
                            w.data(), &dummy, 1);
    }
    if (info != 0) {
      throw Error("band eigensolver failed with info " + std::to_string(info));
    }
    return w;
  }
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = a.start[i]; p < a.start[i + 1]; ++p)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.col[p])) = a.val[p];
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  for (std::size_t i = 0; i < n; ++i) w[i] = ev(static_cast<Eigen::Index>(i));
  return w;
}

/// Deterministic start vector: alternating signs with amplitudes hashed from
/// the site ids, so no symmetry of the window can hide an eigenvector.
std::vector<double> start_vector(const SiteSet& window) {
  std::vector<double> v(window.size());
  double norm2 = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    auto h = static_cast<std::uint64_t>(window[i]) * 0x9E3779B97F4A7C15ull;
    h ^= h >> 29;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 32;
    const double amp = 0.5 + static_cast<double>(h % 1024) / 1024.0;
    v[i] = (window[i] % 2 == 0 ? 1.0 : -1.0) * amp;
    norm2 += v[i] * v[i];
  }
  for (auto& x : v) x /= std::sqrt(norm2);
  return v;
}

/// Thick-restart Lanczos: the basis keeps the current Ritz vectors from both
/// ends of the spectrum plus the residual direction, so the projected matrix
/// stays exact (H = V^* A V) across restarts.
template <class Scalar>
class Lanczos {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

public:
  Lanczos(const Csr<Scalar>& a, const EigenOptions& opts) : a_(a), opts_(opts) {}

  ExtremeEigs run(const SiteSet& window) {
    const auto n = static_cast<Eigen::Index>(a_.n);
    const double scale = 1.0 + a_.abs_row_max();
    const double target = opts_.tol * scale;
    const auto budget = static_cast<std::size_t>(std::max(
        opts_.budget_factor * std::sqrt(static_cast<double>(n)),
        std::min<double>(static_cast<double>(n), 200.0)));
    const Eigen::Index cap = std::min<Eigen::Index>(
        n, static_cast<Eigen::Index>(std::max<std::size_t>(opts_.max_basis, 8)));
    const Eigen::Index keep = std::max<Eigen::Index>(1, cap / 6);

    Mat v(n, cap);
    Mat h = Mat::Zero(cap, cap);
    {
      const auto sv = start_vector(window);
      for (Eigen::Index i = 0; i < n; ++i) v(i, 0) = sv[static_cast<std::size_t>(i)];
    }
    Eigen::Index j = 1;  // basis size; column j-1 is expanded next
    Vec w(n);
    double beta = 0.0;
    std::size_t steps = 0;
    bool invariant = false;
    double prev_min = std::numeric_limits<double>::quiet_NaN();
    double prev_max = prev_min;

    Eigen::SelfAdjointEigenSolver<Mat> es;
    auto ritz = [&]() {
      es.compute(h.topLeftCorner(j, j), Eigen::ComputeEigenvectors);
      const auto& y = es.eigenvectors();
      return std::make_pair(beta * std::abs(y(j - 1, 0)),
                            beta * std::abs(y(j - 1, j - 1)));
    };

    std::size_t next_check = 8;
    bool stagnated = false;
    while (true) {
      a_.multiply(v.col(j - 1), w);
      Vec coef = v.leftCols(j).adjoint() * w;
      w.noalias() -= v.leftCols(j) * coef;
      const Vec again = v.leftCols(j).adjoint() * w;
      w.noalias() -= v.leftCols(j) * again;
      coef += again;
      for (Eigen::Index i = 0; i < j; ++i) {
        h(i, j - 1) = coef(i);
        h(j - 1, i) = Eigen::numext::conj(coef(i));
      }
      h(j - 1, j - 1) = std::real(coef(j - 1));
      beta = w.norm();
      ++steps;

      invariant = beta <= 1e-13 * scale;
      const bool full = j == cap;
      const bool out_of_budget = steps >= budget;
      if (!(invariant || full || out_of_budget || steps >= next_check)) {
        v.col(j) = w / beta;
        ++j;
        continue;
      }

      auto [est_min, est_max] = ritz();
      const double t_min = es.eigenvalues()(0);
      const double t_max = es.eigenvalues()(j - 1);
      if (opts_.trace) {
        *opts_.trace << steps << ' ' << t_min << ' ' << t_max << ' ' << est_min
                     << ' ' << est_max << '\n';
      }
      const bool small = est_min <= 0.1 * target && est_max <= 0.1 * target;
      if (invariant || small || out_of_budget || stagnated) break;
      next_check = steps + std::max<std::size_t>(8, steps / 8);

      if (!full) {
        v.col(j) = w / beta;
        ++j;
        continue;
      }
      // restart: stagnation is judged on consecutive restarts
      stagnated = std::abs(t_min - prev_min) <= target &&
                  std::abs(t_max - prev_max) <= target;
      prev_min = t_min;
      prev_max = t_max;
      const auto& y = es.eigenvectors();
      Mat sel(j, 2 * keep);
      Eigen::VectorXd theta(2 * keep);
      for (Eigen::Index i = 0; i < keep; ++i) {
        sel.col(i) = y.col(i);
        theta(i) = es.eigenvalues()(i);
        sel.col(keep + i) = y.col(j - 1 - i);
        theta(keep + i) = es.eigenvalues()(j - 1 - i);
      }
      const Mat u = v.leftCols(j) * sel;
      v.leftCols(2 * keep) = u;
      h.setZero();
      for (Eigen::Index i = 0; i < 2 * keep; ++i) h(i, i) = theta(i);
      v.col(2 * keep) = w / beta;
      j = 2 * keep + 1;
    }

    if (invariant) beta = 0.0;
    es.compute(h.topLeftCorner(j, j), Eigen::ComputeEigenvectors);
    const auto& y = es.eigenvectors();
    Vec u_min = v.leftCols(j) * y.col(0);
    Vec u_max = v.leftCols(j) * y.col(j - 1);
    u_min.normalize();
    u_max.normalize();
    const double t_min = std::real(rayleigh(u_min));
    const double t_max = std::real(rayleigh(u_max));
    const double r_min = residual(u_min, t_min);
    const double r_max = residual(u_max, t_max);

    ExtremeEigs out;
    out.dimension = a_.n;
    out.iterations = steps;
    // residual bounds hold in exact arithmetic; pad by the rounding in theta
    const double fp = 0.5e-12 * scale;
    out.min = {t_min - r_min - fp, t_min + r_min + fp, r_min <= target};
    out.max = {t_max - r_max - fp, t_max + r_max + fp, r_max <= target};
    return out;
  }

private:
  Scalar rayleigh(const Vec& u) const {
    Vec au(u.size());
    a_.multiply(u, au);
    return u.dot(au);
  }

  double residual(const Vec& u, double theta) const {
    Vec au(u.size());
    a_.multiply(u, au);
    return (au - theta * u).norm();
  }

  const Csr<Scalar>& a_;
  const EigenOptions& opts_;
};

template <class Scalar>
ExtremeEigs solve(const BandKernel& k, const SiteSet& window,
                  const EigenOptions& opts) {
  const Csr<Scalar> a(k, window);
  const bool dense =
      opts.mode == SolveMode::dense || a.index_bandwidth == 0 ||
      (opts.mode == SolveMode::automatic && a.n <= opts.dense_threshold);
  if (dense) {
    const auto w = dense_eigenvalues(a);
    // a diagonal compression is solved exactly
    const double half = a.index_bandwidth == 0 ? 0.0 : 0.5e-12 * (1.0 + a.abs_row_max());
    ExtremeEigs out;
    out.dimension = a.n;
    out.dense = true;
    out.min = {w.front() - half, w.front() + half, true};
    out.max = {w.back() - half, w.back() + half, true};
    return out;
  }
  return Lanczos<Scalar>(a, opts).run(window);
}

void check_input(const BandKernel& k, const SiteSet& window) {
  if (window.empty()) throw PreconditionError("empty window");
  const BandKernel c = restrict(k, window);
  const double d = self_adjoint_defect(c);
  if (d > kDefaultSelfAdjointTol) {
    throw PreconditionError("kernel is not self-adjoint on the window (defect " +
                            std::to_string(d) + ")");
  }
}

}  // namespace

ExtremeEigs extreme_eigs(const BandKernel& k, const SiteSet& window,
                         const EigenOptions& opts) {
  check_input(k, window);
  if (k.is_real()) return solve<double>(k, window, opts);
  return solve<Complex>(k, window, opts);
}

std::vector<double> all_eigenvalues(const BandKernel& k, const SiteSet& window) {
  check_input(k, window);
  if (k.is_real()) return dense_eigenvalues(Csr<double>(k, window));
  return dense_eigenvalues(Csr<Complex>(k, window));
}

double residual_certify(const BandKernel& k, const SiteSet& window,
                        const FiniteVector& v, double lam) {
  const double nrm = v.norm();
  if (nrm == 0.0) throw PreconditionError("zero vector");
  if (std::abs(nrm - 1.0) > 1e-12) throw PreconditionError("vector is not normalised");
  const FiniteVector kv = apply(k, v, window);
  double acc = 0.0;
  for (std::size_t i = 0; i < kv.values.size(); ++i) {
    acc += std::norm(kv.values[i] - lam * v.values[i]);
  }
  return std::sqrt(acc);
}

}  // namespace persson
