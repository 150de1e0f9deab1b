#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plgame/solver.hpp"

namespace plgame::io {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// Parses a full field as a double; throws ParseError naming `line`.
double parse_double(std::string_view field, std::size_t line);
std::int64_t parse_int(std::string_view field, std::size_t line);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Header of trace.csv for the given block dimensions.
std::vector<std::string> trace_columns(std::size_t dim_theta, std::size_t dim_alpha);

/// Writes trace.csv; absent optionals are written as empty fields.
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace,
                     std::size_t dim_theta, std::size_t dim_alpha);

struct TraceRow {
  std::int64_t t = 0;
  std::vector<double> theta;
  std::vector<double> alpha;
  double grad_theta_norm = 0.0;
  double grad_alpha_norm = 0.0;
  std::int64_t inner_iters_used = 0;
  double f_value = 0.0;
  std::optional<double> g_gap;
  std::optional<double> danskin_gap;
};

/// Parses trace.csv. Throws ParseError (with line number) on a malformed
/// header or row, or when the file holds no rows.
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace plgame::io
