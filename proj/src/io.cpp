#include "ectstat/io.hpp"

#include <png.h>

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "ectstat/errors.hpp"

namespace ectstat::io {

namespace {

[[noreturn]] void parse_fail(const std::string& name, std::size_t line, const std::string& what) {
    throw ParseError(name + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    // from_chars for double is fine on libstdc++ 11.
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

GrayImage read_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw ParseError(path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw ParseError(path.string() + ": " + msg);
    }
    GrayImage out{image.width, image.height, {}};
    out.intensity.reserve(buffer.size());
    for (png_byte b : buffer) out.intensity.push_back(static_cast<double>(b) / 255.0);
    return out;
}

} // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error(tmp.string() + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

GrayImage parse_pgm(std::string_view bytes, const std::string& name) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto next_uint = [&](const char* what) {
        skip_space();
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), v);
        if (ec != std::errc{}) throw ParseError(name + ": malformed PGM " + what);
        pos = static_cast<std::size_t>(ptr - bytes.data());
        return v;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw ParseError(name + ": not a P2/P5 PGM file");
    }
    const bool binary = bytes[1] == '5';
    pos = 2;
    const std::size_t w = next_uint("width");
    const std::size_t h = next_uint("height");
    const std::size_t maxval = next_uint("maxval");
    if (w == 0 || h == 0) throw ParseError(name + ": PGM dimensions must be positive");
    if (maxval == 0 || maxval > 65535) throw ParseError(name + ": PGM maxval must be in [1, 65535]");

    GrayImage img{w, h, std::vector<double>(w * h)};
    if (binary) {
        ++pos; // single whitespace after maxval
        const std::size_t bpp = maxval < 256 ? 1 : 2;
        if (bytes.size() < pos + w * h * bpp) throw ParseError(name + ": truncated PGM raster");
        for (std::size_t k = 0; k < w * h; ++k) {
            std::size_t v = static_cast<unsigned char>(bytes[pos + k * bpp]);
            if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos + k * bpp + 1]);
            if (v > maxval) throw ParseError(name + ": PGM sample exceeds maxval");
            img.intensity[k] = static_cast<double>(v) / static_cast<double>(maxval);
        }
    } else {
        for (std::size_t k = 0; k < w * h; ++k) {
            const std::size_t v = next_uint("sample");
            if (v > maxval) throw ParseError(name + ": PGM sample exceeds maxval");
            img.intensity[k] = static_cast<double>(v) / static_cast<double>(maxval);
        }
    }
    return img;
}

GrayImage read_image(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 8 && static_cast<unsigned char>(bytes[0]) == 0x89 && bytes.compare(1, 3, "PNG") == 0) {
        return read_png(path);
    }
    return parse_pgm(bytes, path.string());
}

double auto_pitch(std::size_t width, std::size_t height, double radius) {
    return 0.99 * std::sqrt(2.0) * radius / static_cast<double>(std::max(width, height));
}

GridShape threshold_image(const GrayImage& image, double threshold, double radius, double pitch) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidArgument("threshold must lie in [0, 1]");
    std::vector<std::uint8_t> mask(image.width * image.height, 0);
    for (std::size_t r = 0; r < image.height; ++r) {
        const std::size_t j = image.height - 1 - r;
        for (std::size_t c = 0; c < image.width; ++c) {
            mask[j * image.width + c] = image.at(c, r) >= threshold ? 1 : 0;
        }
    }
    const Point2 origin{-0.5 * static_cast<double>(image.width) * pitch, -0.5 * static_cast<double>(image.height) * pitch};
    return GridShape(image.width, image.height, std::move(mask), Frame(radius, pitch, origin));
}

std::string format_real(double v) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

template <typename T, typename Fmt>
std::string format_matrix(const TransformMatrix<T>& m, Fmt fmt) {
    std::string out = "angle";
    for (double t : m.level_grid().levels()) out += "," + format_real(t);
    out += '\n';
    for (std::size_t p = 0; p < m.rows(); ++p) {
        out += format_real(m.direction_grid()[p].angle());
        for (const T& v : m.row(p)) out += "," + fmt(v);
        out += '\n';
    }
    return out;
}

} // namespace

std::string format_matrix_csv(const ECTMatrix& m) {
    return format_matrix(m, [](std::int64_t v) { return std::to_string(v); });
}

std::string format_matrix_csv(const SECTMatrix& m) {
    return format_matrix(m, [](double v) { return format_real(v); });
}

MatrixCsv parse_matrix_csv(std::string_view text, const std::string& name) {
    MatrixCsv csv;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto fields = split_commas(line);
        if (header) {
            if (fields[0] != "angle") parse_fail(name, line_no, "header must start with 'angle'");
            if (fields.size() < 2) parse_fail(name, line_no, "header lists no levels");
            for (std::size_t k = 1; k < fields.size(); ++k) {
                double t = 0.0;
                if (!parse_double(fields[k], t)) parse_fail(name, line_no, "bad level '" + std::string(fields[k]) + "'");
                csv.levels.push_back(t);
            }
            header = false;
            continue;
        }
        if (fields.size() != csv.levels.size() + 1) {
            parse_fail(name, line_no,
                       "expected " + std::to_string(csv.levels.size() + 1) + " fields, got " + std::to_string(fields.size()));
        }
        double angle = 0.0;
        if (!parse_double(fields[0], angle)) parse_fail(name, line_no, "bad angle '" + std::string(fields[0]) + "'");
        csv.angles.push_back(angle);
        for (std::size_t k = 1; k < fields.size(); ++k) {
            double v = 0.0;
            if (!parse_double(fields[k], v)) parse_fail(name, line_no, "bad value '" + std::string(fields[k]) + "'");
            csv.cells.emplace_back(fields[k]);
        }
    }
    if (header) throw ParseError(name + ": empty matrix file");
    if (csv.angles.empty()) throw ParseError(name + ": matrix has no direction rows");
    return csv;
}

namespace {

LevelGrid levels_of(const MatrixCsv& csv) {
    try {
        return LevelGrid(csv.levels, csv.levels.back());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("matrix header: ") + e.what());
    }
}

DirectionGrid directions_of(const MatrixCsv& csv) { return directions_from_angles(csv.angles); }

} // namespace

ECTMatrix to_ect(const MatrixCsv& csv, const std::string& name) {
    std::vector<std::int64_t> values;
    values.reserve(csv.cells.size());
    for (const auto& cell : csv.cells) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
            throw ParseError(name + ": ECT value '" + cell + "' is not an integer");
        }
        values.push_back(v);
    }
    return ECTMatrix(directions_of(csv), levels_of(csv), std::move(values));
}

SECTMatrix to_sect(const MatrixCsv& csv) {
    std::vector<double> values;
    values.reserve(csv.cells.size());
    for (const auto& cell : csv.cells) {
        double v = 0.0;
        parse_double(cell, v);
        values.push_back(v);
    }
    return SECTMatrix(directions_of(csv), levels_of(csv), std::move(values));
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
    return os.str();
}

} // namespace ectstat::io
