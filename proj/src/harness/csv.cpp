#include "optlab/harness/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "optlab/error.hpp"

namespace optlab::harness {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), ptr);
}

std::string csv_header(std::size_t n) {
  std::string h = "k,f,grad_norm,step_min,step_max,step_mean,delta_norm,adaptive_fraction";
  for (std::size_t i = 0; i < n; ++i) h += ",x_" + std::to_string(i);
  return h;
}

void write_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records, std::size_t n) {
  out << csv_header(n) << '\n';
  for (const auto& r : records) {
    out << r.k;
    for (double v : {r.f, r.grad_norm, r.step_min, r.step_max, r.step_mean, r.delta_norm,
                     r.adaptive_fraction}) {
      out << ',' << format_double(v);
    }
    for (double v : r.x) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<TrajectoryRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty trajectory file");
  const auto header = split(line);
  constexpr std::size_t fixed = 8;
  if (header.size() < fixed + 1) throw InputError("trajectory header has no x columns");
  const std::size_t n = header.size() - fixed;
  if (line != csv_header(n)) throw InputError("unexpected trajectory header: " + line);

  std::vector<TrajectoryRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    TrajectoryRecord r;
    std::int64_t k = 0;
    auto [ptr, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), k);
    if (ec != std::errc() || ptr != cells[0].data() + cells[0].size()) {
      throw InputError("line " + std::to_string(line_no) + ": bad step index");
    }
    r.k = k;
    r.f = parse_double(cells[1], line_no);
    r.grad_norm = parse_double(cells[2], line_no);
    r.step_min = parse_double(cells[3], line_no);
    r.step_max = parse_double(cells[4], line_no);
    r.step_mean = parse_double(cells[5], line_no);
    r.delta_norm = parse_double(cells[6], line_no);
    r.adaptive_fraction = parse_double(cells[7], line_no);
    for (std::size_t i = 0; i < n; ++i) r.x.push_back(parse_double(cells[fixed + i], line_no));
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace optlab::harness
