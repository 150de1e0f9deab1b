#include "plgame/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace plgame::io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("expected a number, got '" + std::string(field) + "'", line);
  }
  return v;
}

std::int64_t parse_int(std::string_view field, std::size_t line) {
  std::int64_t v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("expected an integer, got '" + std::string(field) + "'", line);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> trace_columns(std::size_t dim_theta, std::size_t dim_alpha) {
  std::vector<std::string> cols{"t"};
  for (std::size_t i = 0; i < dim_theta; ++i) cols.push_back("theta_" + std::to_string(i));
  for (std::size_t i = 0; i < dim_alpha; ++i) cols.push_back("alpha_" + std::to_string(i));
  for (const char* c : {"grad_theta_norm", "grad_alpha_norm", "inner_iters_used", "f_value",
                        "g_gap", "danskin_gap"}) {
    cols.emplace_back(c);
  }
  return cols;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace,
                     std::size_t dim_theta, std::size_t dim_alpha) {
  const auto cols = trace_columns(dim_theta, dim_alpha);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const TraceRecord& r : trace) {
    os << r.t;
    for (double x : r.theta) os << ',' << format_double(x);
    for (double x : r.alpha) os << ',' << format_double(x);
    os << ',' << format_double(r.grad_theta_norm) << ',' << format_double(r.grad_alpha_norm)
       << ',' << r.inner_iters_used << ',' << format_double(r.f_value) << ','
       << (r.g_gap ? format_double(*r.g_gap) : "") << ','
       << (r.danskin_gap ? format_double(*r.danskin_gap) : "") << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw ParseError("empty trace file", 1);

  const auto header = split(line);
  std::size_t dim_theta = 0, dim_alpha = 0;
  for (auto h : header) {
    if (h.starts_with("theta_")) ++dim_theta;
    if (h.starts_with("alpha_")) ++dim_alpha;
  }
  const auto expected = trace_columns(dim_theta, dim_alpha);
  if (dim_theta == 0 || dim_alpha == 0 || header.size() != expected.size() ||
      !std::equal(header.begin(), header.end(), expected.begin())) {
    throw ParseError("trace header does not match the trace.csv schema", 1);
  }

  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != expected.size()) {
      throw ParseError("expected " + std::to_string(expected.size()) + " fields, got " +
                           std::to_string(f.size()),
                       lineno);
    }
    TraceRow r;
    std::size_t k = 0;
    r.t = parse_int(f[k++], lineno);
    for (std::size_t i = 0; i < dim_theta; ++i) r.theta.push_back(parse_double(f[k++], lineno));
    for (std::size_t i = 0; i < dim_alpha; ++i) r.alpha.push_back(parse_double(f[k++], lineno));
    r.grad_theta_norm = parse_double(f[k++], lineno);
    r.grad_alpha_norm = parse_double(f[k++], lineno);
    r.inner_iters_used = parse_int(f[k++], lineno);
    r.f_value = parse_double(f[k++], lineno);
    if (!f[k].empty()) r.g_gap = parse_double(f[k], lineno);
    ++k;
    if (!f[k].empty()) r.danskin_gap = parse_double(f[k], lineno);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError("trace has a header but no rows", lineno);
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace plgame::io
