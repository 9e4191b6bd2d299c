#include "smckit/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace smckit {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

[[noreturn]] void fail_at(const std::string& source, std::size_t line, const std::string& what) {
    throw InvalidInputError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t line,
                  std::size_t col) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail_at(source, line,
                "column " + std::to_string(col + 1) + ": cannot parse '" + cell + "' as a number");
    return value;
}

void check_name(const std::string& name) {
    if (name.find(',') != std::string::npos || name.find('\n') != std::string::npos)
        throw InvalidInputError("column name '" + name + "' contains a separator");
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

MaskedMatrixCsv read_matrix_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInputError(source_name + ": empty file");
    const std::vector<std::string> names = split_line(line);
    const std::size_t ncols = names.size();
    if (ncols == 0 || (ncols == 1 && names[0].empty()))
        fail_at(source_name, 1, "header row has no column names");

    std::vector<std::vector<double>> rows;
    std::vector<std::vector<bool>> observed;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != ncols)
            fail_at(source_name, line_no,
                    "expected " + std::to_string(ncols) + " cells, found " +
                        std::to_string(cells.size()));
        std::vector<double> row(ncols, 0.0);
        std::vector<bool> obs(ncols, true);
        for (std::size_t j = 0; j < ncols; ++j) {
            if (cells[j] == "NA") {
                obs[j] = false;
            } else {
                row[j] = parse_cell(cells[j], source_name, line_no, j);
            }
        }
        rows.push_back(std::move(row));
        observed.push_back(std::move(obs));
    }
    if (rows.empty()) throw InvalidInputError(source_name + ": no data rows (header only)");

    const Index n = static_cast<Index>(rows.size());
    const Index p = static_cast<Index>(ncols);
    Matrix values(n, p);
    BoolGrid grid(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) {
            values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            grid(i, j) = observed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    return MaskedMatrixCsv{DenseMatrix(std::move(values), names),
                           ObservationMask(std::move(grid))};
}

MaskedMatrixCsv read_matrix_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open '" + path + "'");
    return read_matrix_csv(in, path);
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& m, const ObservationMask* mask) {
    if (mask && (mask->rows() != m.rows() || mask->cols() != m.cols()))
        throw InvalidInputError("write_matrix_csv: mask shape does not match matrix");
    for (Index j = 0; j < m.cols(); ++j) {
        const std::string name =
            m.has_col_names() ? m.col_names()[static_cast<std::size_t>(j)]
                              : "c" + std::to_string(j + 1);
        check_name(name);
        out << (j ? "," : "") << name;
    }
    out << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            if (mask && !mask->is_observed(i, j))
                out << "NA";
            else
                out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_csv_file(const std::string& path, const DenseMatrix& m,
                           const ObservationMask* mask) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
    write_matrix_csv(out, m, mask);
}

Coordinates read_coordinates_csv(std::istream& in, const std::string& source_name) {
    const MaskedMatrixCsv parsed = read_matrix_csv(in, source_name);
    const auto& names = parsed.values.col_names();
    if (names.size() != 2 || names[0] != "s1" || names[1] != "s2")
        throw InvalidInputError(source_name + ": coordinate files need exactly columns s1,s2");
    if (!parsed.fully_observed())
        throw InvalidInputError(source_name + ": coordinates cannot contain NA");
    return Coordinates(Eigen::MatrixX2d(parsed.values.values()));
}

Coordinates read_coordinates_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open '" + path + "'");
    return read_coordinates_csv(in, path);
}

void write_coordinates_csv(std::ostream& out, const Coordinates& coords) {
    out << "s1,s2\n";
    for (Index i = 0; i < coords.size(); ++i) {
        const Point2 pt = coords.point(i);
        out << format_double(pt.s1) << ',' << format_double(pt.s2) << '\n';
    }
}

void write_coordinates_csv_file(const std::string& path, const Coordinates& coords) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
    write_coordinates_csv(out, coords);
}

} // namespace smckit
