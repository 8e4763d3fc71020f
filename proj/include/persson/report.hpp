#pragma once

#include <iosfwd>

#include "json.hpp"

#include "persson/persson_driver.hpp"

namespace persson {

nlohmann::json to_json(const SpectralInterval& s);
nlohmann::json to_json(const EdgeReport& rep);
nlohmann::json to_json(const GapReport& rep);
nlohmann::json to_json(const SymbolReport& rep);
nlohmann::json to_json(const AdmissibilityReport& rep);

/// `R L smin_lo smin_hi smax_lo smax_hi certified`, one row per cell.
void write_edges_csv(std::ostream& os, const EdgeReport& rep);

/// gnuplot data: one block per radius, columns `L value` where value is the
/// midpoint of s- (lower) or s+ (upper).
enum class Edge { lower, upper };
void write_ladder_dat(std::ostream& os, const EdgeReport& rep, Edge edge);

}  // namespace persson
