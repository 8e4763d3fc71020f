#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"

#include "persson/persson_driver.hpp"

namespace persson {

enum class ProblemKind { metric_space, graph, subshift };

/// Parsed job description. Raw model/kernel/symbol sections are kept as
/// JSON (already validated) and turned into objects on demand.
struct JobConfig {
  ProblemKind kind = ProblemKind::metric_space;
  nlohmann::json model;
  nlohmann::json kernel;
  nlohmann::json symbol;

  Schedule schedule;
  bool windows_defaulted = false;
  std::int64_t window_cap = 4000;

  double eigen_tol = 1e-10;
  double stabilization_tol = 1e-6;
  double self_adjoint_tol = 1e-12;
  double oracle_tol = 1e-3;

  SolveMode solve_mode = SolveMode::automatic;
  std::size_t dense_threshold = 2000;

  bool oracle = true;
  AuditMode audits = AuditMode::strict;
  bool trace = false;
  /// Powers-of-two generators: whether 2^0 = 1 counts.
  bool m_includes_zero = true;
  std::int64_t oracle_window = 2000;
  int symbol_grid = 4096;
  std::int64_t shell_scan = 256;

  std::string output_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 1;

  /// Directory relative paths in the config are resolved against.
  std::filesystem::path base_dir;

  /// Config with every default spelled out and paths made absolute.
  nlohmann::json effective() const;

  LadderOptions ladder_options() const;
};

/// Throws ConfigError with a JSON pointer on schema violations.
JobConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
JobConfig load_config(const std::filesystem::path& path);

std::unique_ptr<Problem> make_problem(const JobConfig& cfg);
SubshiftModel make_model(const JobConfig& cfg);
HoppingSymbol make_symbol(const JobConfig& cfg);
SeqPoint parse_seq_point(const nlohmann::json& j, const std::string& pointer,
                         bool m_includes_zero);

}  // namespace persson
