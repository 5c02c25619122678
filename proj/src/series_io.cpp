#include "chaossup/series_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "chaossup/config.hpp"

namespace chaossup {

namespace {

// shared nearest-mode time grid for emitted rows
double row_time(std::size_t k, double h) {
    return dir_mul(static_cast<double>(k), h, RoundingMode::ToNearestEven);
}

double parse_field(const std::string& text) {
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::runtime_error("csv: bad number '" + text + "'");
    return v;
}

} // namespace

void write_orbit_csv(std::ostream& os, const PseudoOrbit& orbit) {
    os << "step,t,x,y,z\n";
    for (std::size_t k = 0; k < orbit.states.size(); ++k) {
        const auto s = orbit.states.state(k);
        os << k << ',' << format_double(row_time(k, orbit.h));
        for (double v : s) os << ',' << format_double(v);
        os << '\n';
    }
}

void write_pair_csv(std::ostream& os, const CoupledOrbitPair& pair) {
    const DivergenceSeries div = divergence(pair);
    os << "step,t,x_lo,y_lo,z_lo,x_hi,y_hi,z_hi,x_avg,y_avg,z_avg,delta\n";
    for (std::size_t k = 0; k < pair.lower.states.size(); ++k) {
        os << k << ',' << format_double(row_time(k, pair.lower.h));
        for (const PseudoOrbit* o : {&pair.lower, &pair.upper, &pair.averaged})
            for (double v : o->states.state(k)) os << ',' << format_double(v);
        os << ',' << format_double(div.delta[k]) << '\n';
    }
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::runtime_error("csv: no column named '" + name + "'");
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const std::size_t idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(idx));
    return out;
}

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(parse_field(cell));
        if (values.size() != table.columns.size())
            throw std::runtime_error("csv: ragged row '" + line + "'");
        table.rows.push_back(std::move(values));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return read_csv(in);
}

std::vector<double> read_series(const std::string& path,
                                const std::string& column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    if (!column.empty()) return read_csv(in).column(column);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(parse_field(line));
    }
    return out;
}

} // namespace chaossup
