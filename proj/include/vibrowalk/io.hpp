#pragma once

// CSV and text file helpers plus the writers/readers for every tabular
// artifact. Numbers are written in shortest round-trip form, so a file read
// back reproduces the written doubles exactly.

#include "vibrowalk/analysis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vibrowalk {

/// Shortest decimal form that parses back to the same double.
std::string fmt(double v);

struct CsvTable {
  std::string source;  // file name for diagnostics
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index; throws SchemaError naming the column when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  /// Parses a numeric field. Row is 0-based here and reported 1-based
  /// (counting data rows) in errors.
  double number(std::size_t row, std::size_t col) const;
  const std::string& text(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(const std::string& content, const std::string& source = "<memory>");
CsvTable read_csv(const std::string& path);
/// Checks that every name is a column.
void require_columns(const CsvTable& t, const std::vector<std::string>& names);

std::string read_text(const std::string& path);
/// Writes atomically enough for our purposes (truncate + write). Creates
/// parent directories.
void write_text(const std::string& path, const std::string& content);

/// Joins fields with commas and appends a newline.
std::string csv_row(const std::vector<std::string>& fields);

// ---------------------------------------------------------------------------
// Artifact formats

extern const std::vector<std::string> kTrajectoryColumns;
extern const std::vector<std::string> kSweepColumns;
extern const std::vector<std::string> kIndexColumns;
extern const std::vector<std::string> kEventColumns;
extern const std::vector<std::string> kEnvelopeColumns;

std::string trajectory_csv(const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

/// Sweep grid with mode labels from `th`.
std::string sweep_csv(const SweepGrid& grid, const ModeThresholds& th = {});
SweepGrid read_sweep_csv(const std::string& path);

std::string index_csv(const IndexGrid& grid);
/// Reads an index file. Reference velocities are not part of the format, so
/// the returned grid has an empty `reference`.
IndexGrid read_index_csv(const std::string& path);

struct Event {
  double t = 0.0;
  std::string type;
  std::string payload;
};
std::string events_csv(const std::vector<Event>& events);

/// Selection report as aligned text and as CSV (mode,rank,f_hz,theta_deg,score,P,vx,vy,w).
std::string selection_text(const std::vector<ModeSelection>& sel);
std::string selection_csv(const std::vector<ModeSelection>& sel);

// ---------------------------------------------------------------------------

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace vibrowalk
