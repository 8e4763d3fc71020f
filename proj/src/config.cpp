#include "persson/config.hpp"

#include <fstream>
#include <set>

#include <fmt/core.h>

#include "persson/errors.hpp"

namespace persson {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& ptr) {
  if (!j.is_object()) throw ConfigError(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(ptr + "/" + key, "missing required field");
  return *it;
}

template <class T>
T as(const json& j, const std::string& ptr);

template <>
double as<double>(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ConfigError(ptr, "expected a number");
  return j.get<double>();
}

template <>
std::int64_t as<std::int64_t>(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  return j.get<std::int64_t>();
}

template <>
bool as<bool>(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) throw ConfigError(ptr, "expected true or false");
  return j.get<bool>();
}

template <>
std::string as<std::string>(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw ConfigError(ptr, "expected a string");
  return j.get<std::string>();
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& ptr, T fallback) {
  if (!j.is_object()) throw ConfigError(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return as<T>(*it, ptr + "/" + key);
}

void only_keys(const json& j, const std::string& ptr, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(ptr, "expected an object");
  for (const auto& [k, _] : j.items()) {
    if (!allowed.contains(k)) throw ConfigError(ptr + "/" + k, "unknown field");
  }
}

Letter as_letter(const json& j, const std::string& ptr) {
  const auto s = as<std::string>(j, ptr);
  if (s.size() != 1) throw ConfigError(ptr, "expected a single-letter string");
  return s[0];
}

double positive(double v, const std::string& ptr) {
  if (!(v > 0.0)) throw ConfigError(ptr, "must be > 0");
  return v;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : fs::absolute(base / path).lexically_normal();
}

std::ifstream open_input(const fs::path& p, const std::string& ptr) {
  std::ifstream in(p);
  if (!in) throw ConfigError(ptr, "cannot open file " + p.string());
  return in;
}

Complex complex_from(const json& row, std::size_t first, const std::string& ptr) {
  const double re = as<double>(row.at(first), ptr + "/" + std::to_string(first));
  double im = 0.0;
  if (row.size() > first + 1) {
    im = as<double>(row.at(first + 1), ptr + "/" + std::to_string(first + 1));
  }
  return {re, im};
}

std::int64_t max_window(const JobConfig& cfg) {
  return cfg.schedule.windows.empty() ? 0 : cfg.schedule.windows.back();
}

// --------------------------------------------------------- metric problems

BandKernel z_kernel(const JobConfig& cfg, const SpacePtr& space) {
  const std::string ptr = "/kernel";
  std::vector<KernelEntry> entries;
  double bandwidth = 0.0;
  const auto& taps = cfg.kernel.value("taps", json::array());
  std::vector<std::pair<std::int64_t, Complex>> offsets;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const std::string rp = ptr + "/taps/" + std::to_string(i);
    const auto& row = taps[i];
    if (!row.is_array() || row.size() < 2 || row.size() > 3) {
      throw ConfigError(rp, "expected [offset, re] or [offset, re, im]");
    }
    const auto off = as<std::int64_t>(row[0], rp + "/0");
    offsets.emplace_back(off, complex_from(row, 1, rp));
    bandwidth = std::max(bandwidth, static_cast<double>(off < 0 ? -off : off));
  }
  for (Site x : space->window()) {
    for (const auto& [off, v] : offsets) {
      if (space->window().contains(x + off)) entries.push_back({x + off, x, v});
    }
  }
  const auto& pot = cfg.kernel.value("potential", json::array());
  for (std::size_t i = 0; i < pot.size(); ++i) {
    const std::string rp = ptr + "/potential/" + std::to_string(i);
    const auto& row = pot[i];
    if (!row.is_array() || row.size() != 2) throw ConfigError(rp, "expected [site, value]");
    const auto s = as<std::int64_t>(row[0], rp + "/0");
    if (space->window().contains(s)) entries.push_back({s, s, as<double>(row[1], rp + "/1")});
  }
  return BandKernel(space, std::move(entries), bandwidth);
}

BandKernel z2_kernel(const JobConfig& cfg, const SpacePtr& space) {
  const std::string ptr = "/kernel";
  std::vector<KernelEntry> entries;
  double bandwidth = 0.0;
  std::vector<std::tuple<std::int64_t, std::int64_t, Complex>> offsets;
  const auto& taps = cfg.kernel.value("taps", json::array());
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const std::string rp = ptr + "/taps/" + std::to_string(i);
    const auto& row = taps[i];
    if (!row.is_array() || row.size() < 3 || row.size() > 4) {
      throw ConfigError(rp, "expected [di, dj, re] or [di, dj, re, im]");
    }
    const auto di = as<std::int64_t>(row[0], rp + "/0");
    const auto dj = as<std::int64_t>(row[1], rp + "/1");
    offsets.emplace_back(di, dj, complex_from(row, 2, rp));
    bandwidth = std::max(bandwidth, static_cast<double>(std::llabs(di) + std::llabs(dj)));
  }
  for (Site x : space->window()) {
    const auto [i, j] = decode_z2(x);
    for (const auto& [di, dj, v] : offsets) {
      const Site y = encode_z2(i + di, j + dj);
      if (space->window().contains(y)) entries.push_back({y, x, v});
    }
  }
  const auto& pot = cfg.kernel.value("potential", json::array());
  for (std::size_t n = 0; n < pot.size(); ++n) {
    const std::string rp = ptr + "/potential/" + std::to_string(n);
    const auto& row = pot[n];
    if (!row.is_array() || row.size() != 3) throw ConfigError(rp, "expected [i, j, value]");
    const Site s = encode_z2(as<std::int64_t>(row[0], rp + "/0"),
                             as<std::int64_t>(row[1], rp + "/1"));
    if (space->window().contains(s)) entries.push_back({s, s, as<double>(row[2], rp + "/2")});
  }
  return BandKernel(space, std::move(entries), bandwidth);
}

Metric named_metric(const std::string& name, std::size_t dims,
                    std::shared_ptr<std::map<Site, std::vector<double>>> coords,
                    const std::string& ptr) {
  if (name != "l1" && name != "l2" && name != "linf") {
    throw ConfigError(ptr, "metric must be one of l1, l2, linf");
  }
  return [name, dims, coords](Site x, Site y) {
    const auto& a = coords->at(x);
    const auto& b = coords->at(y);
    double acc = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double t = std::abs(a[d] - b[d]);
      if (name == "l1") acc += t;
      else if (name == "l2") acc += t * t;
      else acc = std::max(acc, t);
    }
    return name == "l2" ? std::sqrt(acc) : acc;
  };
}

std::unique_ptr<Problem> metric_problem(const JobConfig& cfg) {
  const std::string space_kind = as<std::string>(require(cfg.model, "space", "/model"), "/model/space");
  const std::string ktype = as<std::string>(require(cfg.kernel, "type", "/kernel"), "/kernel/type");
  const std::int64_t half = max_window(cfg);
  if (space_kind == "Z") {
    if (ktype != "convolution") throw ConfigError("/kernel/type", "Z supports 'convolution'");
    auto space = integer_line(half);
    const Site center = get_or<std::int64_t>(cfg.model, "center", "/model", 0);
    return std::make_unique<MetricProblem>(space, z_kernel(cfg, space), center);
  }
  if (space_kind == "Z2") {
    if (ktype != "convolution") throw ConfigError("/kernel/type", "Z2 supports 'convolution'");
    auto space = integer_plane(half);
    std::int64_t ci = 0, cj = 0;
    if (cfg.model.contains("center")) {
      const auto& c = cfg.model["center"];
      if (!c.is_array() || c.size() != 2) throw ConfigError("/model/center", "expected [i, j]");
      ci = as<std::int64_t>(c[0], "/model/center/0");
      cj = as<std::int64_t>(c[1], "/model/center/1");
    }
    return std::make_unique<MetricProblem>(space, z2_kernel(cfg, space), encode_z2(ci, cj));
  }
  if (space_kind == "explicit") {
    const auto file = resolve(cfg.base_dir, as<std::string>(require(cfg.model, "points_file", "/model"), "/model/points_file"));
    auto in = open_input(file, "/model/points_file");
    auto coords = std::make_shared<std::map<Site, std::vector<double>>>();
    std::vector<Site> ids;
    std::size_t dims = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      std::istringstream ls(line);
      Site id = 0;
      if (!(ls >> id)) continue;
      std::vector<double> c;
      for (double v; ls >> v;) c.push_back(v);
      if (dims == 0) dims = c.size();
      if (c.size() != dims || dims == 0) {
        throw ConfigError("/model/points_file", "inconsistent coordinates for site " + std::to_string(id));
      }
      ids.push_back(id);
      (*coords)[id] = std::move(c);
    }
    const auto metric = named_metric(get_or<std::string>(cfg.model, "metric", "/model", "l2"), dims, coords, "/model/metric");
    const double ud = positive(get_or<double>(cfg.model, "ud_alpha", "/model", 1.0), "/model/ud_alpha");
    SpacePtr space;
    try {
      space = build_space("explicit:" + file.string(), ids, metric, ud, {1.0});
    } catch (const ValidationError& e) {
      throw ConfigError("/model/points_file", e.what());
    }
    if (ktype != "file") throw ConfigError("/kernel/type", "explicit spaces need kernel type 'file'");
    auto kin = open_input(resolve(cfg.base_dir, as<std::string>(require(cfg.kernel, "file", "/kernel"), "/kernel/file")), "/kernel/file");
    auto kernel = read_kernel(kin, space);
    const Site center = as<std::int64_t>(require(cfg.model, "center", "/model"), "/model/center");
    return std::make_unique<MetricProblem>(space, std::move(kernel), center);
  }
  throw ConfigError("/model/space", "expected Z, Z2 or explicit");
}

std::unique_ptr<Problem> graph_problem(const JobConfig& cfg) {
  const auto file = resolve(cfg.base_dir, as<std::string>(require(cfg.model, "edges_file", "/model"), "/model/edges_file"));
  auto in = open_input(file, "/model/edges_file");
  std::vector<GraphModel::Edge> edges;
  try {
    edges = read_edge_list(in);
  } catch (const StructuralError& e) {
    throw ConfigError("/model/edges_file", e.what());
  }
  std::set<Site> verts;
  for (const auto& e : edges) {
    verts.insert(e.u);
    verts.insert(e.v);
  }
  if (cfg.model.contains("vertices")) {
    const auto& vs = cfg.model["vertices"];
    if (!vs.is_array()) throw ConfigError("/model/vertices", "expected an array of ids");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      verts.insert(as<std::int64_t>(vs[i], "/model/vertices/" + std::to_string(i)));
    }
  }
  const GraphModel g(std::vector<Site>(verts.begin(), verts.end()), edges);
  auto space = g.hop_space("graph:" + file.string());
  const std::string ktype = as<std::string>(require(cfg.kernel, "type", "/kernel"), "/kernel/type");
  GraphKernelKind kind;
  if (ktype == "adjacency") kind = GraphKernelKind::adjacency;
  else if (ktype == "laplacian") kind = GraphKernelKind::laplacian;
  else throw ConfigError("/kernel/type", "graphs support 'adjacency' or 'laplacian'");
  BandKernel k = graph_kernel(g, kind, space);
  const auto& pot = cfg.kernel.value("potential", json::array());
  std::vector<KernelEntry> extra;
  for (std::size_t n = 0; n < pot.size(); ++n) {
    const std::string rp = "/kernel/potential/" + std::to_string(n);
    const auto& row = pot[n];
    if (!row.is_array() || row.size() != 2) throw ConfigError(rp, "expected [vertex, value]");
    const auto s = as<std::int64_t>(row[0], rp + "/0");
    extra.push_back({s, s, as<double>(row[1], rp + "/1")});
  }
  if (!extra.empty()) k = add(k, BandKernel(space, std::move(extra), 0.0));
  const Site center = as<std::int64_t>(require(cfg.model, "center", "/model"), "/model/center");
  return std::make_unique<MetricProblem>(space, std::move(k), center, "graph");
}

}  // namespace

// ----------------------------------------------------------------- subshift

SeqPoint parse_seq_point(const json& j, const std::string& ptr, bool m_includes_zero) {
  const auto kind = as<std::string>(require(j, "kind", ptr), ptr + "/kind");
  if (kind == "constant") {
    return SeqPoint::constant(as_letter(require(j, "letter", ptr), ptr + "/letter"));
  }
  if (kind == "periodic") {
    const auto w = as<std::string>(require(j, "word", ptr), ptr + "/word");
    if (w.empty()) throw ConfigError(ptr + "/word", "empty period word");
    return SeqPoint::periodic(w, get_or<std::int64_t>(j, "phase", ptr, 0));
  }
  if (kind == "step") {
    return SeqPoint::step(as_letter(require(j, "left", ptr), ptr + "/left"),
                          as_letter(require(j, "right", ptr), ptr + "/right"),
                          get_or<std::int64_t>(j, "at", ptr, 0));
  }
  if (kind == "powers_of_two") {
    return SeqPoint::powers_of_two(as_letter(require(j, "base", ptr), ptr + "/base"),
                                   as_letter(require(j, "mark", ptr), ptr + "/mark"),
                                   get_or<bool>(j, "include_one", ptr, m_includes_zero));
  }
  if (kind == "explicit") {
    std::map<std::int64_t, Letter> values;
    const auto& vals = require(j, "values", ptr);
    if (!vals.is_array()) throw ConfigError(ptr + "/values", "expected [[index, letter], ...]");
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const std::string rp = ptr + "/values/" + std::to_string(i);
      if (!vals[i].is_array() || vals[i].size() != 2) throw ConfigError(rp, "expected [index, letter]");
      values[as<std::int64_t>(vals[i][0], rp + "/0")] = as_letter(vals[i][1], rp + "/1");
    }
    return SeqPoint::explicit_window(std::move(values),
                                     as_letter(require(j, "fill", ptr), ptr + "/fill"));
  }
  if (kind == "shift") {
    const auto base = parse_seq_point(require(j, "base", ptr), ptr + "/base", m_includes_zero);
    return base.shifted(as<std::int64_t>(require(j, "k", ptr), ptr + "/k"));
  }
  throw ConfigError(ptr + "/kind", "unknown sequence kind '" + kind + "'");
}

SubshiftModel make_model(const JobConfig& cfg) {
  const auto letters = as<std::string>(require(cfg.model, "alphabet", "/model"), "/model/alphabet");
  std::vector<Letter> alpha(letters.begin(), letters.end());
  Alphabet alphabet = [&] {
    try {
      return Alphabet(alpha);
    } catch (const StructuralError& e) {
      throw ConfigError("/model/alphabet", e.what());
    }
  }();
  auto z = parse_seq_point(require(cfg.model, "generator", "/model"), "/model/generator",
                           cfg.m_includes_zero);
  std::vector<SeqPoint> limits;
  const auto& lg = require(cfg.model, "limit_generators", "/model");
  if (!lg.is_array() || lg.empty()) {
    throw ConfigError("/model/limit_generators", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < lg.size(); ++i) {
    limits.push_back(parse_seq_point(lg[i], "/model/limit_generators/" + std::to_string(i),
                                     cfg.m_includes_zero));
  }
  return SubshiftModel(std::move(alphabet), std::move(z), std::move(limits));
}

HoppingSymbol make_symbol(const JobConfig& cfg) {
  const std::string ptr = "/symbol";
  const auto radius = get_or<std::int64_t>(cfg.symbol, "radius", ptr, 0);
  if (radius < 0) throw ConfigError(ptr + "/radius", "must be >= 0");
  const auto& rows = require(cfg.symbol, "rows", ptr);
  if (!rows.is_array()) throw ConfigError(ptr + "/rows", "expected an array");
  std::vector<HoppingSymbol::Row> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string rp = ptr + "/rows/" + std::to_string(i);
    const auto& r = rows[i];
    if (!r.is_array() || r.size() < 3 || r.size() > 4) {
      throw ConfigError(rp, "expected [pattern, k, re] or [pattern, k, re, im]");
    }
    const auto pattern = as<std::string>(r[0], rp + "/0");
    if (pattern.size() != static_cast<std::size_t>(2 * radius + 1)) {
      throw ConfigError(rp + "/0", fmt::format("pattern must have length {}", 2 * radius + 1));
    }
    out.push_back({pattern, as<std::int64_t>(r[1], rp + "/1"), complex_from(r, 2, rp)});
  }
  return HoppingSymbol(static_cast<int>(radius), std::move(out));
}

std::unique_ptr<Problem> make_problem(const JobConfig& cfg) {
  switch (cfg.kind) {
    case ProblemKind::metric_space:
      return metric_problem(cfg);
    case ProblemKind::graph:
      return graph_problem(cfg);
    case ProblemKind::subshift:
      return std::make_unique<SubshiftProblem>(make_model(cfg), make_symbol(cfg), cfg.shell_scan);
  }
  throw ConfigError("/problem", "unknown problem kind");
}

// ------------------------------------------------------------------ parsing

JobConfig parse_config(const json& j, const fs::path& base_dir) {
  only_keys(j, "", {"problem", "model", "kernel", "symbol", "schedule", "tolerances",
                    "solver", "flags", "output", "seed", "threads"});
  JobConfig cfg;
  cfg.base_dir = base_dir;
  const auto kind = as<std::string>(require(j, "problem", ""), "/problem");
  if (kind == "metric_space") cfg.kind = ProblemKind::metric_space;
  else if (kind == "graph") cfg.kind = ProblemKind::graph;
  else if (kind == "subshift") cfg.kind = ProblemKind::subshift;
  else throw ConfigError("/problem", "expected metric_space, graph or subshift");

  cfg.model = require(j, "model", "");
  if (!cfg.model.is_object()) throw ConfigError("/model", "expected an object");
  if (cfg.kind == ProblemKind::subshift) {
    cfg.symbol = require(j, "symbol", "");
    if (!cfg.symbol.is_object()) throw ConfigError("/symbol", "expected an object");
    only_keys(cfg.symbol, "/symbol", {"radius", "rows"});
    only_keys(cfg.model, "/model", {"alphabet", "generator", "limit_generators", "shell_scan"});
  } else {
    cfg.kernel = require(j, "kernel", "");
    if (!cfg.kernel.is_object()) throw ConfigError("/kernel", "expected an object");
    only_keys(cfg.kernel, "/kernel", {"type", "taps", "potential", "file"});
  }
  cfg.shell_scan = get_or<std::int64_t>(cfg.model, "shell_scan", "/model", 256);

  const json flags = j.value("flags", json::object());
  only_keys(flags, "/flags", {"oracle", "audits", "trace", "m_convention"});
  cfg.oracle = get_or<bool>(flags, "oracle", "/flags", true);
  cfg.trace = get_or<bool>(flags, "trace", "/flags", false);
  const auto audits = get_or<std::string>(flags, "audits", "/flags", "strict");
  if (audits == "strict") cfg.audits = AuditMode::strict;
  else if (audits == "warn") cfg.audits = AuditMode::warn;
  else throw ConfigError("/flags/audits", "expected strict or warn");
  const auto mconv = get_or<std::string>(flags, "m_convention", "/flags", "m>=0");
  if (mconv == "m>=0") cfg.m_includes_zero = true;
  else if (mconv == "m>=1") cfg.m_includes_zero = false;
  else throw ConfigError("/flags/m_convention", "expected \"m>=0\" or \"m>=1\"");

  const json tol = j.value("tolerances", json::object());
  only_keys(tol, "/tolerances", {"eigen", "stabilization", "self_adjoint", "oracle"});
  cfg.eigen_tol = positive(get_or<double>(tol, "eigen", "/tolerances", cfg.eigen_tol), "/tolerances/eigen");
  cfg.stabilization_tol = positive(get_or<double>(tol, "stabilization", "/tolerances", cfg.stabilization_tol), "/tolerances/stabilization");
  cfg.self_adjoint_tol = positive(get_or<double>(tol, "self_adjoint", "/tolerances", cfg.self_adjoint_tol), "/tolerances/self_adjoint");
  cfg.oracle_tol = positive(get_or<double>(tol, "oracle", "/tolerances", cfg.oracle_tol), "/tolerances/oracle");

  const json solver = j.value("solver", json::object());
  only_keys(solver, "/solver", {"mode", "dense_threshold", "oracle_window", "symbol_grid"});
  const auto mode = get_or<std::string>(solver, "mode", "/solver", "auto");
  if (mode == "auto") cfg.solve_mode = SolveMode::automatic;
  else if (mode == "dense") cfg.solve_mode = SolveMode::dense;
  else if (mode == "iterative") cfg.solve_mode = SolveMode::iterative;
  else throw ConfigError("/solver/mode", "expected auto, dense or iterative");
  const auto thr = get_or<std::int64_t>(solver, "dense_threshold", "/solver", 2000);
  if (thr < 1) throw ConfigError("/solver/dense_threshold", "must be >= 1");
  cfg.dense_threshold = static_cast<std::size_t>(thr);
  cfg.oracle_window = get_or<std::int64_t>(solver, "oracle_window", "/solver", 2000);
  if (cfg.oracle_window < 1) throw ConfigError("/solver/oracle_window", "must be >= 1");
  cfg.symbol_grid = static_cast<int>(get_or<std::int64_t>(solver, "symbol_grid", "/solver", 4096));
  if (cfg.symbol_grid < 2) throw ConfigError("/solver/symbol_grid", "must be >= 2");

  const json& sched = require(j, "schedule", "");
  only_keys(sched, "/schedule", {"radii", "windows", "margin", "window_cap"});
  const json& radii = require(sched, "radii", "/schedule");
  if (!radii.is_array() || radii.empty()) throw ConfigError("/schedule/radii", "expected a non-empty array");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    cfg.schedule.radii.push_back(as<double>(radii[i], "/schedule/radii/" + std::to_string(i)));
  }
  cfg.window_cap = get_or<std::int64_t>(sched, "window_cap", "/schedule", cfg.window_cap);
  if (sched.contains("windows")) {
    const json& w = sched["windows"];
    if (!w.is_array() || w.empty()) throw ConfigError("/schedule/windows", "expected a non-empty array");
    for (std::size_t i = 0; i < w.size(); ++i) {
      cfg.schedule.windows.push_back(as<std::int64_t>(w[i], "/schedule/windows/" + std::to_string(i)));
    }
  } else {
    cfg.windows_defaulted = true;
  }

  cfg.output_dir = get_or<std::string>(j, "output", "", "out");
  cfg.seed = static_cast<std::uint64_t>(get_or<std::int64_t>(j, "seed", "", 1));
  const auto threads = get_or<std::int64_t>(j, "threads", "", 1);
  if (threads < 1) throw ConfigError("/threads", "must be >= 1");
  cfg.threads = static_cast<unsigned>(threads);

  // margin and default windows need the problem's bandwidth; a subshift
  // symbol or kernel section is enough to know it
  double bandwidth = 0.0;
  double dep = 0.0;
  if (cfg.kind == ProblemKind::subshift) {
    const auto h = make_symbol(cfg);
    bandwidth = static_cast<double>(h.max_hop());
    dep = h.radius();
  } else if (cfg.kind == ProblemKind::graph) {
    bandwidth = 1.0;
  } else {
    for (const auto& t : cfg.kernel.value("taps", json::array())) {
      if (t.is_array() && !t.empty() && t[0].is_number_integer()) {
        double b = std::abs(t[0].get<double>());
        if (t.size() >= 4 || (t.size() == 3 && cfg.model.value("space", "") == "Z2")) {
          b += std::abs(t[1].get<double>());
        }
        bandwidth = std::max(bandwidth, b);
      }
    }
  }
  if (cfg.windows_defaulted) {
    cfg.schedule.windows = default_windows(cfg.schedule.radii, bandwidth, cfg.window_cap);
  }
  cfg.schedule.margin = get_or<double>(sched, "margin", "/schedule", bandwidth + dep);
  return cfg;
}

JobConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j, fs::absolute(path).parent_path());
}

LadderOptions JobConfig::ladder_options() const {
  LadderOptions o;
  o.eigen.mode = solve_mode;
  o.eigen.dense_threshold = dense_threshold;
  o.eigen.tol = eigen_tol;
  o.stabilization_tol = stabilization_tol;
  o.audits = audits;
  o.threads = threads;
  return o;
}

json JobConfig::effective() const {
  auto abs_paths = [&](json section, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (section.contains(k) && section[k].is_string()) {
        section[k] = resolve(base_dir, section[k].get<std::string>()).string();
      }
    }
    return section;
  };
  json out;
  switch (kind) {
    case ProblemKind::metric_space: out["problem"] = "metric_space"; break;
    case ProblemKind::graph: out["problem"] = "graph"; break;
    case ProblemKind::subshift: out["problem"] = "subshift"; break;
  }
  json m = abs_paths(model, {"points_file", "edges_file"});
  if (kind == ProblemKind::subshift) m["shell_scan"] = shell_scan;
  out["model"] = m;
  if (kind == ProblemKind::subshift) {
    json s = symbol;
    s["radius"] = symbol.value("radius", 0);
    out["symbol"] = s;
  } else {
    out["kernel"] = abs_paths(kernel, {"file"});
  }
  out["schedule"] = {{"radii", schedule.radii},
                     {"windows", schedule.windows},
                     {"margin", schedule.margin},
                     {"window_cap", window_cap}};
  out["tolerances"] = {{"eigen", eigen_tol},
                       {"stabilization", stabilization_tol},
                       {"self_adjoint", self_adjoint_tol},
                       {"oracle", oracle_tol}};
  const char* mode = solve_mode == SolveMode::automatic ? "auto"
                     : solve_mode == SolveMode::dense   ? "dense"
                                                        : "iterative";
  out["solver"] = {{"mode", mode},
                   {"dense_threshold", dense_threshold},
                   {"oracle_window", oracle_window},
                   {"symbol_grid", symbol_grid}};
  out["flags"] = {{"oracle", oracle},
                  {"audits", audits == AuditMode::strict ? "strict" : "warn"},
                  {"trace", trace},
                  {"m_convention", m_includes_zero ? "m>=0" : "m>=1"}};
  out["output"] = output_dir;
  out["seed"] = seed;
  out["threads"] = threads;
  return out;
}

}  // namespace persson
