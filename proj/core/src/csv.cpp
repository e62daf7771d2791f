#include "renewal_ld/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "renewal_ld/errors.hpp"

namespace renewal_ld {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const CurveSeries& series) {
  bool with_err = false;
  for (const auto& p : series.points) with_err = with_err || p.std_error.has_value();
  os << series.abscissa << ",value" << (with_err ? ",stderr" : "") << '\n';
  for (const auto& p : series.points) {
    os << format_double(p.x) << ',' << format_double(p.value);
    if (with_err) {
      os << ',';
      if (p.std_error) os << format_double(*p.std_error);
    }
    os << '\n';
  }
}

void write_csv(std::ostream& os, const OccupationTable& table) {
  os << "t,k,prob\n";
  const auto& grid = table.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::string t = format_double(grid[i]);
    for (std::size_t k = 0; k <= table.k_max(); ++k) {
      os << t << ',' << k << ',' << format_double(table.prob(k, i)) << '\n';
    }
  }
}

void write_csv(std::ostream& os, const CountHistogram& hist) {
  os << "t,k,count\n";
  const auto& grid = hist.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::string t = format_double(grid[i]);
    const auto counts = hist.counts(i);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] != 0) os << t << ',' << k << ',' << counts[k] << '\n';
    }
  }
}

template <class T>
void write_csv_file(const std::filesystem::path& path, const T& data) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(os, data);
  os.flush();
  if (!os) throw IoError("write failed: " + path.string());
}

template void write_csv_file(const std::filesystem::path&, const CurveSeries&);
template void write_csv_file(const std::filesystem::path&, const OccupationTable&);
template void write_csv_file(const std::filesystem::path&, const CountHistogram&);

CurveSeries read_curve_csv(std::istream& is, const std::string& name) {
  CurveSeries out{name, "t", {}, nlohmann::json::object()};
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("curve csv: empty input");
  out.abscissa = line.substr(0, line.find(','));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string a;
    std::string b;
    std::string c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    try {
      CurvePoint p{std::stod(a), std::stod(b), std::nullopt};
      if (!c.empty()) p.std_error = std::stod(c);
      out.points.push_back(p);
    } catch (const std::exception&) {
      throw ConfigError("curve csv: malformed row " + std::to_string(lineno));
    }
  }
  return out;
}

CurveSeries read_curve_csv_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_curve_csv(is, path.stem().string());
}

}  // namespace renewal_ld
