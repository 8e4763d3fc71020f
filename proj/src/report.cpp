#include "persson/report.hpp"

#include <ostream>

#include <fmt/core.h>

namespace persson {

nlohmann::json to_json(const SpectralInterval& s) {
  return {{"lo", s.lo}, {"hi", s.hi}, {"certified", s.certified}};
}

nlohmann::json to_json(const EdgeReport& rep) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : rep.cells) {
    cells.push_back({{"R", c.radius},
                     {"L", c.window},
                     {"dimension", c.dimension},
                     {"smin", to_json(c.smin)},
                     {"smax", to_json(c.smax)},
                     {"solver", c.dense ? "dense" : "lanczos"},
                     {"iterations", c.iterations}});
  }
  nlohmann::json full = nlohmann::json::array();
  for (const auto& f : rep.full) {
    full.push_back({{"L", f.window},
                    {"dimension", f.dimension},
                    {"lambda_min", to_json(f.smin)},
                    {"lambda_max", to_json(f.smax)}});
  }
  nlohmann::json out = {
      {"problem", rep.problem_kind},
      {"schedule",
       {{"radii", rep.schedule.radii},
        {"windows", rep.schedule.windows},
        {"margin", rep.schedule.margin},
        {"pairing", "empirical: windows clear every radius by the margin"}}},
      {"cells", cells},
      {"persson_lower", to_json(rep.persson_lower)},
      {"persson_upper", to_json(rep.persson_upper)},
      {"lower_stabilized", rep.lower_stabilized},
      {"upper_stabilized", rep.upper_stabilized},
      {"audit_flags", rep.audit_flags},
      {"all_certified", rep.all_certified},
  };
  if (!full.empty()) out["full_truncation"] = full;
  if (rep.oracle) {
    out["oracle"] = {{"lower", rep.oracle->lower},
                     {"upper", rep.oracle->upper},
                     {"certified", rep.oracle->certified},
                     {"notes", rep.oracle->notes},
                     {"lower_difference", rep.persson_lower.mid() - rep.oracle->lower},
                     {"upper_difference", rep.persson_upper.mid() - rep.oracle->upper}};
  }
  return out;
}

nlohmann::json to_json(const GapReport& rep) {
  auto out = to_json(rep.ladder);
  out["gap_lower"] = to_json(rep.gap_lower);
  out["gap_upper"] = to_json(rep.gap_upper);
  out["gap_consistent"] = rep.consistent;
  return out;
}

nlohmann::json to_json(const SymbolReport& rep) {
  nlohmann::json sa = nlohmann::json::array();
  for (const auto& [pattern, hop] : rep.self_adjoint_witnesses) {
    sa.push_back({{"pattern", pattern}, {"hop", hop}});
  }
  return {{"self_adjoint", rep.self_adjoint},
          {"covariant", rep.covariant},
          {"self_adjoint_witnesses", sa},
          {"covariance_witnesses", rep.covariance_witnesses}};
}

nlohmann::json to_json(const AdmissibilityReport& rep) {
  nlohmann::json out = {{"admissible_evidence", rep.admissible_evidence()}};
  out["period"] = rep.period ? nlohmann::json(*rep.period) : nlohmann::json(nullptr);
  out["isolating_radius"] =
      rep.isolating_radius ? nlohmann::json(*rep.isolating_radius) : nlohmann::json(nullptr);
  return out;
}

void write_edges_csv(std::ostream& os, const EdgeReport& rep) {
  os << "R L smin_lo smin_hi smax_lo smax_hi certified\n";
  for (const auto& c : rep.cells) {
    os << fmt::format("{} {} {} {} {} {} {}\n", c.radius, c.window, c.smin.lo,
                      c.smin.hi, c.smax.lo, c.smax.hi,
                      (c.smin.certified && c.smax.certified) ? 1 : 0);
  }
}

void write_ladder_dat(std::ostream& os, const EdgeReport& rep, Edge edge) {
  const std::size_t nl = rep.schedule.windows.size();
  os << (edge == Edge::lower ? "# s- ladder: L smin\n" : "# s+ ladder: L smax\n");
  for (std::size_t r = 0; r < rep.schedule.radii.size(); ++r) {
    if (r > 0) os << "\n\n";
    os << fmt::format("# R = {}\n", rep.schedule.radii[r]);
    for (std::size_t l = 0; l < nl; ++l) {
      const auto& c = rep.cell(r, l);
      os << fmt::format("{} {}\n", c.window,
                        edge == Edge::lower ? c.smin.mid() : c.smax.mid());
    }
  }
}

}  // namespace persson
