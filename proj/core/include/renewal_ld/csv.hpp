#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "renewal_ld/asymptotics.hpp"
#include "renewal_ld/mc_engine.hpp"
#include "renewal_ld/occupation.hpp"

namespace renewal_ld {

/// "%.17g".
std::string format_double(double v);

/// Header `<abscissa>,value[,stderr]`; the stderr column appears when any
/// point carries one (missing entries are written empty).
void write_csv(std::ostream& os, const CurveSeries& series);
/// `t,k,prob`, row-major in t then k.
void write_csv(std::ostream& os, const OccupationTable& table);
/// `t,k,count`, nonzero cells only.
void write_csv(std::ostream& os, const CountHistogram& hist);

/// Writes via write_csv; throws IoError when the file cannot be written.
template <class T>
void write_csv_file(const std::filesystem::path& path, const T& data);

/// Reads a CurveSeries CSV as written above (abscissa name from the header).
CurveSeries read_curve_csv(std::istream& is, const std::string& name = "curve");
CurveSeries read_curve_csv_file(const std::filesystem::path& path);

}  // namespace renewal_ld
