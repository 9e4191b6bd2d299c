#ifndef SMCKIT_CSV_HPP
#define SMCKIT_CSV_HPP

#include <iosfwd>
#include <string>

#include "smckit/design.hpp"
#include "smckit/mask.hpp"
#include "smckit/matrix.hpp"

namespace smckit {

// Matrix CSV format: one header row of column names, numeric cells, missing
// entries as the literal token NA. Unobserved values are stored as zero in
// the returned matrix; the mask records which entries were present.
struct MaskedMatrixCsv {
    DenseMatrix values;
    ObservationMask mask;

    bool fully_observed() const { return mask.observed_count() == mask.grid().size(); }
};

MaskedMatrixCsv read_matrix_csv(std::istream& in, const std::string& source_name = "<stream>");
MaskedMatrixCsv read_matrix_csv_file(const std::string& path);

// Doubles are rendered with the shortest representation that round-trips.
void write_matrix_csv(std::ostream& out, const DenseMatrix& m,
                      const ObservationMask* mask = nullptr);
void write_matrix_csv_file(const std::string& path, const DenseMatrix& m,
                           const ObservationMask* mask = nullptr);

// Coordinate files carry columns s1,s2 (extra columns are rejected).
Coordinates read_coordinates_csv(std::istream& in, const std::string& source_name = "<stream>");
Coordinates read_coordinates_csv_file(const std::string& path);
void write_coordinates_csv(std::ostream& out, const Coordinates& coords);
void write_coordinates_csv_file(const std::string& path, const Coordinates& coords);

std::string format_double(double value);

} // namespace smckit

#endif
