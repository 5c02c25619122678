#ifndef CHAOSSUP_SERIES_IO_HPP
#define CHAOSSUP_SERIES_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "chaossup/orbits.hpp"

namespace chaossup {

/// Emits `step,t,x,y,z`, one row per stored state, every number in the
/// shortest decimal form that parses back to the identical binary64.
void write_orbit_csv(std::ostream& os, const PseudoOrbit& orbit);

/// Emits the coupled schema
/// `step,t,x_lo,y_lo,z_lo,x_hi,y_hi,z_hi,x_avg,y_avg,z_avg,delta`.
void write_pair_csv(std::ostream& os, const CoupledOrbitPair& pair);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const; // throws
    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

/// A scalar series from a file: either a CSV with a named column, or a
/// bare one-number-per-line list when `column` is empty.
std::vector<double> read_series(const std::string& path,
                                const std::string& column);

} // namespace chaossup

#endif
