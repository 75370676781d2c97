#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ectstat/transform.hpp"

namespace ectstat::io {

/// Grayscale image with intensities normalised to [0, 1], row 0 at the top.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> intensity;

    double at(std::size_t col, std::size_t row) const { return intensity[row * width + col]; }
};

/// PGM (P2/P5, 8 or 16 bit) or PNG, chosen by magic bytes.
GrayImage read_image(const std::filesystem::path& path);
GrayImage parse_pgm(std::string_view bytes, const std::string& name = "<memory>");

/// Default pitch placing a width x height image, centred on the origin,
/// well inside B(0, R): the half-diagonal of the bounding square is 0.99 R.
double auto_pitch(std::size_t width, std::size_t height, double radius);

/// Foreground iff intensity >= threshold. Image row r maps to grid row
/// height - 1 - r so +y points up; the image is centred on the origin.
GridShape threshold_image(const GrayImage& image, double threshold, double radius, double pitch);

/// Matrix CSV: header "angle,t_1,...,t_D", then one row per direction with
/// its angle in radians followed by D values. Reals use 17 significant digits.
std::string format_matrix_csv(const ECTMatrix& m);
std::string format_matrix_csv(const SECTMatrix& m);

struct MatrixCsv {
    std::vector<double> angles;
    std::vector<double> levels;
    /// Row-major, one cell per value, kept as text for exact integer parsing.
    std::vector<std::string> cells;
};

MatrixCsv parse_matrix_csv(std::string_view text, const std::string& name = "<memory>");
ECTMatrix to_ect(const MatrixCsv& csv, const std::string& name = "<memory>");
SECTMatrix to_sect(const MatrixCsv& csv);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

std::string format_real(double v);

} // namespace ectstat::io
