#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rset/grid.hpp"

namespace rset {

struct SampleStack;

// Binary PGM (magic "P5", maxval <= 255). A pixel value >= 128 reads as true;
// masks are written with 255/0. Raster row k holds grid row j = k, so images
// appear y-flipped relative to the usual mathematical orientation. PGM carries
// no grid geometry, so reading requires the domain (dims are checked).
BinaryMask read_mask_pgm(const std::string& path, const GridDomain& domain);
std::pair<int, int> read_pgm_dims(const std::string& path);
void write_mask_pgm(const BinaryMask& mask, const std::string& path);

// Scalar fields as CSV: a header line "# nx ny x0 y0 h" followed by ny lines
// of nx comma-separated values (grid row j on data line j). Values are written
// with 17 significant digits so a write/read round trip is exact.
ScalarField read_field_csv(const std::string& path);
void write_field_csv(const ScalarField& field, const std::string& path);

// A stack on disk is a directory of field CSVs plus manifest.json listing the
// filenames in sample order.
void write_stack(const SampleStack& stack, const std::string& dir);
SampleStack read_stack(const std::string& dir);

}  // namespace rset
