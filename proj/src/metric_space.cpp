#include "persson/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <random>
#include <sstream>

#include "persson/errors.hpp"

namespace persson {

namespace {

std::string pair_str(Site x, Site y) {
  return "(" + std::to_string(x) + ", " + std::to_string(y) + ")";
}

constexpr std::int64_t kZ2Offset = std::int64_t{1} << 30;
constexpr std::int64_t kZ2Stride = std::int64_t{1} << 31;

}  // namespace

SiteSpace::SiteSpace(std::string key, Metric dist, SiteSet window,
                     double ud_alpha, std::map<double, std::size_t> bg_profile)
    : key_(std::move(key)),
      dist_(std::move(dist)),
      window_(std::move(window)),
      ud_alpha_(ud_alpha),
      bg_profile_(std::move(bg_profile)) {}

SiteSet SiteSpace::ball(Site center, double r) const {
  std::vector<Site> in;
  for (Site s : window_) {
    if (dist_(center, s) <= r) in.push_back(s);
  }
  return SiteSet(std::move(in));
}

SpacePtr build_space(std::string key, std::vector<Site> points, Metric dist,
                     double ud_alpha, const std::vector<double>& bg_check_radii,
                     const BuildOptions& opts) {
  if (points.empty()) throw ValidationError("space has no points");
  if (!(ud_alpha > 0.0)) throw ValidationError("ud_alpha must be positive");
  const std::size_t n_raw = points.size();
  SiteSet window(std::move(points));
  if (window.size() != n_raw) throw ValidationError("duplicate site ids");
  const std::size_t n = window.size();

  auto check_pair = [&](Site x, Site y) {
    const double dxy = dist(x, y);
    if (!std::isfinite(dxy) || dxy < 0.0) {
      throw ValidationError("metric value at " + pair_str(x, y) +
                            " is negative or not finite");
    }
    if (x == y) {
      if (dxy != 0.0) {
        throw ValidationError("dist(x, x) != 0 at " + pair_str(x, y));
      }
      return;
    }
    if (dxy != dist(y, x)) {
      throw ValidationError("metric is not symmetric at " + pair_str(x, y));
    }
    if (dxy < ud_alpha) {
      throw ValidationError("uniform discreteness violated at " +
                            pair_str(x, y) + ": distance " +
                            std::to_string(dxy) + " < " +
                            std::to_string(ud_alpha));
    }
  };
  auto check_triple = [&](Site x, Site y, Site z) {
    const double slack = 1e-12 * (1.0 + dist(x, y) + dist(y, z));
    if (dist(x, z) > dist(x, y) + dist(y, z) + slack) {
      throw ValidationError("triangle inequality violated at (" +
                            std::to_string(x) + ", " + std::to_string(y) +
                            ", " + std::to_string(z) + ")");
    }
  };

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  if (n <= opts.full_check_limit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) check_pair(window[i], window[j]);
  } else {
    for (std::size_t t = 0; t < opts.sampled_pairs; ++t)
      check_pair(window[pick(rng)], window[pick(rng)]);
  }
  if (n <= 40) {
    for (Site x : window)
      for (Site y : window)
        for (Site z : window) check_triple(x, y, z);
  } else {
    for (std::size_t t = 0; t < opts.sampled_triples; ++t)
      check_triple(window[pick(rng)], window[pick(rng)], window[pick(rng)]);
  }

  std::map<double, std::size_t> profile;
  const bool exhaustive = n <= opts.full_check_limit;
  const std::size_t centres = exhaustive ? n : std::min<std::size_t>(n, 256);
  for (double r : bg_check_radii) {
    std::size_t worst = 0;
    for (std::size_t c = 0; c < centres; ++c) {
      const Site x = exhaustive ? window[c] : window[pick(rng)];
      std::size_t count = 0;
      for (Site y : window) count += dist(x, y) <= r ? 1 : 0;
      worst = std::max(worst, count);
    }
    profile[r] = worst;
  }
  return std::make_shared<const SiteSpace>(std::move(key), std::move(dist),
                                           std::move(window), ud_alpha,
                                           std::move(profile));
}

SpacePtr integer_line(std::int64_t half_width,
                      const std::vector<double>& bg_check_radii) {
  if (half_width < 0) throw RangeError("negative half width");
  Metric d = [](Site x, Site y) { return static_cast<double>(x > y ? x - y : y - x); };
  std::vector<Site> pts;
  for (Site k = -half_width; k <= half_width; ++k) pts.push_back(k);
  return build_space("Z", std::move(pts), std::move(d), 1.0, bg_check_radii);
}

Site encode_z2(std::int64_t i, std::int64_t j) {
  return (i + kZ2Offset) * kZ2Stride + (j + kZ2Offset);
}

std::pair<std::int64_t, std::int64_t> decode_z2(Site s) {
  return {s / kZ2Stride - kZ2Offset, s % kZ2Stride - kZ2Offset};
}

SpacePtr integer_plane(std::int64_t half_width,
                       const std::vector<double>& bg_check_radii) {
  if (half_width < 0) throw RangeError("negative half width");
  Metric d = [](Site x, Site y) {
    auto [xi, xj] = decode_z2(x);
    auto [yi, yj] = decode_z2(y);
    return static_cast<double>(std::llabs(xi - yi) + std::llabs(xj - yj));
  };
  std::vector<Site> pts;
  for (std::int64_t i = -half_width; i <= half_width; ++i)
    for (std::int64_t j = -half_width; j <= half_width; ++j)
      pts.push_back(encode_z2(i, j));
  return build_space("Z2", std::move(pts), std::move(d), 1.0, bg_check_radii);
}

SiteSet ball_complement(const SiteSpace& space, Site center, double r) {
  if (!space.window().contains(center)) {
    throw PreconditionError("ball centre " + std::to_string(center) +
                            " is not in the window");
  }
  const auto b = space.ball(center, r);
  return SiteSet::cofinite(space.window(),
                           std::vector<Site>(b.begin(), b.end()));
}

// ----------------------------------------------------------------- graphs

GraphModel::GraphModel(std::vector<Site> vertices,
                       const std::vector<Edge>& edges)
    : vertices_(std::move(vertices)) {
  for (Site v : vertices_) adj_[v];
  for (const auto& e : edges) {
    if (!vertices_.contains(e.u) || !vertices_.contains(e.v)) {
      throw StructuralError("edge " + pair_str(e.u, e.v) +
                            " touches an unknown vertex");
    }
    if (e.u == e.v) throw StructuralError("loop at vertex " + std::to_string(e.u));
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw StructuralError("invalid weight on edge " + pair_str(e.u, e.v));
    }
    auto& fwd = adj_[e.u];
    auto& bwd = adj_[e.v];
    auto f = fwd.find(e.v);
    auto b = bwd.find(e.u);
    if (f != fwd.end() || b != bwd.end()) {
      const double prev = f != fwd.end() ? f->second : b->second;
      if (prev != e.weight) {
        throw StructuralError("asymmetric weight on edge " + pair_str(e.u, e.v));
      }
      continue;
    }
    if (e.weight == 0.0) continue;
    fwd[e.v] = e.weight;
    bwd[e.u] = e.weight;
  }
}

double GraphModel::weight(Site u, Site v) const {
  auto it = adj_.find(u);
  if (it == adj_.end()) return 0.0;
  auto jt = it->second.find(v);
  return jt == it->second.end() ? 0.0 : jt->second;
}

double GraphModel::degree(Site u) const {
  double d = 0.0;
  for (const auto& [_, w] : neighbours(u)) d += w;
  return d;
}

const std::map<Site, double>& GraphModel::neighbours(Site u) const {
  static const std::map<Site, double> none;
  auto it = adj_.find(u);
  return it == adj_.end() ? none : it->second;
}

GraphModel GraphModel::induced(const SiteSet& keep) const {
  GraphModel g;
  std::vector<Site> vs;
  for (Site v : vertices_)
    if (keep.contains(v)) vs.push_back(v);
  g.vertices_ = SiteSet(std::move(vs));
  for (Site v : g.vertices_) {
    auto& row = g.adj_[v];
    for (const auto& [u, w] : neighbours(v))
      if (keep.contains(u)) row[u] = w;
  }
  return g;
}

SpacePtr GraphModel::hop_space(std::string key) const {
  constexpr double kFar = 1e9;
  const std::size_t n = vertices_.size();
  // all-pairs BFS; windows handled here are at most a few thousand vertices
  auto table = std::make_shared<std::vector<double>>(n * n, kFar);
  for (std::size_t s = 0; s < n; ++s) {
    auto* row = table->data() + s * n;
    row[s] = 0.0;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      for (const auto& [nb, w] : neighbours(vertices_[cur])) {
        const auto j = static_cast<std::size_t>(vertices_.index_of(nb));
        if (row[j] == kFar) {
          row[j] = row[cur] + 1.0;
          queue.push_back(j);
        }
      }
    }
  }
  Metric d = [table, verts = vertices_, n](Site x, Site y) {
    const auto i = verts.index_of(x);
    const auto j = verts.index_of(y);
    if (i < 0 || j < 0) return x == y ? 0.0 : kFar;
    return (*table)[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
  };
  return build_space(std::move(key),
                     std::vector<Site>(vertices_.begin(), vertices_.end()),
                     std::move(d), 1.0, {1.0});
}

BandKernel graph_kernel(const GraphModel& g, GraphKernelKind kind,
                        SpacePtr space) {
  std::vector<KernelEntry> e;
  for (Site v : g.vertices()) {
    double deg = 0.0;
    for (const auto& [u, w] : g.neighbours(v)) {
      if (g.weight(u, v) != w) {
        throw StructuralError("asymmetric weight on edge " + pair_str(v, u));
      }
      deg += w;
      e.push_back({v, u, kind == GraphKernelKind::adjacency ? w : -w});
    }
    if (kind == GraphKernelKind::laplacian) e.push_back({v, v, deg});
  }
  return BandKernel(std::move(space), std::move(e), 1.0);
}

std::vector<GraphModel::Edge> read_edge_list(std::istream& is) {
  std::vector<GraphModel::Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    GraphModel::Edge e{};
    if (!(ls >> e.u)) continue;
    if (!(ls >> e.v >> e.weight)) {
      throw StructuralError("edge list line " + std::to_string(lineno) +
                            ": expected 'x y weight'");
    }
    edges.push_back(e);
  }
  return edges;
}

}  // namespace persson
