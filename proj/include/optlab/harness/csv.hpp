#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "optlab/trajectory.hpp"

namespace optlab::harness {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

std::string csv_header(std::size_t n);
void write_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records, std::size_t n);

/// Parses a trajectory file written by write_csv. Throws InputError.
std::vector<TrajectoryRecord> read_csv(std::istream& in);

}  // namespace optlab::harness
