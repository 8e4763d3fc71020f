#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "persson/kernel.hpp"

namespace persson {

using Metric = std::function<double(Site, Site)>;

/// Finite computational window of a uniformly discrete metric space with
/// bounded geometry. Two spaces with the same key share one metric, so
/// kernels built over either can be combined.
class SiteSpace {
public:
  SiteSpace(std::string key, Metric dist, SiteSet window, double ud_alpha,
            std::map<double, std::size_t> bg_profile);

  const std::string& key() const { return key_; }
  double dist(Site x, Site y) const { return dist_(x, y); }
  const Metric& metric() const { return dist_; }
  const SiteSet& window() const { return window_; }
  double ud_alpha() const { return ud_alpha_; }
  /// Measured sup_x |B(x, r)| at the radii requested at build time.
  const std::map<double, std::size_t>& bg_profile() const { return bg_profile_; }

  /// Sites of the window within distance r of `center`.
  SiteSet ball(Site center, double r) const;

private:
  std::string key_;
  Metric dist_;
  SiteSet window_;
  double ud_alpha_;
  std::map<double, std::size_t> bg_profile_;
};

struct BuildOptions {
  /// Windows up to this size get an all-pairs check; larger ones are sampled.
  std::size_t full_check_limit = 2000;
  std::size_t sampled_pairs = 200000;
  std::size_t sampled_triples = 20000;
  std::uint64_t seed = 12345;
};

/// Validates the metric axioms, uniform discreteness at `ud_alpha`, and
/// records the bounded-geometry profile at `bg_check_radii`.
SpacePtr build_space(std::string key, std::vector<Site> points, Metric dist,
                     double ud_alpha, const std::vector<double>& bg_check_radii,
                     const BuildOptions& opts = {});

/// Z restricted to [-half_width, half_width] with |x - y|.
SpacePtr integer_line(std::int64_t half_width,
                      const std::vector<double>& bg_check_radii = {});

/// Z^2 window [-half_width, half_width]^2 with the l1 metric. Sites are
/// encoded by `encode_z2`.
SpacePtr integer_plane(std::int64_t half_width,
                       const std::vector<double>& bg_check_radii = {});

Site encode_z2(std::int64_t i, std::int64_t j);
std::pair<std::int64_t, std::int64_t> decode_z2(Site s);

/// window minus the closed ball B(center, r). The result is cofinite-tagged.
SiteSet ball_complement(const SiteSpace& space, Site center, double r);

/// Undirected weighted graph; weights are symmetric and non-negative.
class GraphModel {
public:
  struct Edge {
    Site u;
    Site v;
    double weight;
  };

  /// Throws StructuralError on an asymmetric weight listing, a negative
  /// weight, or a loop.
  GraphModel(std::vector<Site> vertices, const std::vector<Edge>& edges);

  const SiteSet& vertices() const { return vertices_; }
  double weight(Site u, Site v) const;
  double degree(Site u) const;
  const std::map<Site, double>& neighbours(Site u) const;

  /// Subgraph spanned by `keep`: both the removed vertices and every edge
  /// touching them are gone.
  GraphModel induced(const SiteSet& keep) const;

  /// Shortest-path hop metric over the vertex window (unreachable pairs get a
  /// large finite distance).
  SpacePtr hop_space(std::string key) const;

private:
  GraphModel() = default;

  SiteSet vertices_;
  std::map<Site, std::map<Site, double>> adj_;
};

enum class GraphKernelKind { adjacency, laplacian };

BandKernel graph_kernel(const GraphModel& g, GraphKernelKind kind,
                        SpacePtr space);

/// Reads `x y weight` lines. Each undirected edge is listed once.
std::vector<GraphModel::Edge> read_edge_list(std::istream& is);

}  // namespace persson
