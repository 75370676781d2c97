#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include <png.h>

#include <ectstat/errors.hpp>
#include <ectstat/io.hpp>

#include "support.hpp"

using namespace ectstat;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ectstat_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("ascii and binary pgm") {
    const io::GrayImage a = io::parse_pgm("P2\n# comment\n3 2\n255\n0 128 255\n255 0 0\n");
    REQUIRE(a.width == 3);
    REQUIRE(a.height == 2);
    CHECK(a.at(2, 0) == 1.0);
    CHECK(a.at(1, 0) == doctest::Approx(128.0 / 255.0));
    CHECK(a.at(0, 1) == 1.0);

    std::string p5 = "P5 2 2 255\n";
    p5 += std::string{char(0), char(255), char(10), char(200)};
    const io::GrayImage b = io::parse_pgm(p5);
    CHECK(b.at(1, 0) == 1.0);
    CHECK(b.at(0, 1) == doctest::Approx(10.0 / 255.0));

    std::string p16 = "P5 1 1 65535\n";
    p16 += std::string{char(0x80), char(0x00)};
    CHECK(io::parse_pgm(p16).at(0, 0) == doctest::Approx(32768.0 / 65535.0));

    CHECK_THROWS_AS(io::parse_pgm("P3 1 1 255\n0 0 0\n"), ParseError);
    CHECK_THROWS_AS(io::parse_pgm("P2 2 2 255\n0 0 0\n"), ParseError);
    CHECK_THROWS_AS(io::parse_pgm("P2 1 1 10\n11\n"), ParseError);
    CHECK_THROWS_AS(io::parse_pgm("P5 2 2 255\nab"), ParseError);
}

TEST_CASE("png decoding") {
    const fs::path path = scratch("tiny.png");
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = 3;
    img.height = 2;
    img.format = PNG_FORMAT_GRAY;
    const unsigned char px[6] = {0, 255, 0, 255, 255, 255};
    REQUIRE(png_image_write_to_file(&img, path.c_str(), 0, px, 0, nullptr) != 0);

    const io::GrayImage g = io::read_image(path);
    REQUIRE(g.width == 3);
    REQUIRE(g.height == 2);
    CHECK(g.at(0, 0) == 0.0);
    CHECK(g.at(1, 0) == 1.0);
    CHECK(g.at(2, 1) == 1.0);

    io::write_file_atomic(scratch("broken.png"), std::string("\x89PNG\r\n\x1a\nnot really", 19));
    CHECK_THROWS_AS(io::read_image(scratch("broken.png")), ParseError);
    CHECK_THROWS_AS(io::read_image(scratch("missing.pgm")), ParseError);
}

TEST_CASE("thresholding flips rows so +y is up") {
    const io::GrayImage img = io::parse_pgm("P2 2 2 255\n255 0\n0 0\n");
    const GridShape s = io::threshold_image(img, 0.5, 5.0, 1.0);
    CHECK(s.at(0, 1));
    CHECK_FALSE(s.at(0, 0));
    CHECK(s.frame().origin()[0] == -1.0);
    CHECK(s.foreground_count() == 1);

    // Intensity equal to the threshold is foreground.
    const io::GrayImage mid = io::parse_pgm("P2 1 1 2\n1\n");
    CHECK(io::threshold_image(mid, 0.5, 5.0, 1.0).foreground_count() == 1);
    CHECK_THROWS_AS(io::threshold_image(img, 1.5, 5.0, 1.0), InvalidArgument);

    // The default pitch keeps any image inside the ball.
    const io::GrayImage full = io::parse_pgm("P2 3 2 1\n1 1 1\n1 1 1\n");
    CHECK_NOTHROW(io::threshold_image(full, 0.5, 1.0, io::auto_pitch(3, 2, 1.0)));
}

TEST_CASE("matrix csv round trip") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 3.0);
    const DirectionGrid dirs = uniform_directions(7);
    const LevelGrid levels = uniform_levels(13, 3.6);

    std::vector<double> sv(7 * 13);
    for (auto& v : sv) v = g(rng);
    const SECTMatrix s(dirs, levels, sv);
    const std::string text = io::format_matrix_csv(s);
    const SECTMatrix back = io::to_sect(io::parse_matrix_csv(text));
    CHECK(back.values() == s.values());
    CHECK(back.same_grids(s));
    CHECK(io::format_matrix_csv(back) == text);

    std::vector<std::int64_t> ev(7 * 13);
    for (auto& v : ev) v = std::int64_t(g(rng) * 10);
    const ECTMatrix e(dirs, levels, ev);
    const ECTMatrix eback = io::to_ect(io::parse_matrix_csv(io::format_matrix_csv(e)));
    CHECK(eback.values() == e.values());
}

TEST_CASE("malformed matrix csv") {
    CHECK_THROWS_AS(io::parse_matrix_csv(""), ParseError);
    CHECK_THROWS_AS(io::parse_matrix_csv("theta,1,2\n0,1,2\n"), ParseError);
    CHECK_THROWS_AS(io::parse_matrix_csv("angle,1,2\n"), ParseError);
    CHECK_THROWS_AS(io::parse_matrix_csv("angle,1,2\n0,1\n"), ParseError);
    CHECK_THROWS_AS(io::parse_matrix_csv("angle,1,2\n0,1,x\n"), ParseError);
    CHECK_THROWS_AS(io::to_ect(io::parse_matrix_csv("angle,1,2\n0,1,2.5\n")), ParseError);
    CHECK_THROWS_AS(io::to_sect(io::parse_matrix_csv("angle,2,1\n0,1,2\n")), ParseError);
    try {
        io::parse_matrix_csv("angle,1,2\n0,1,2\n0,1\n", "m.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("m.csv:3") != std::string::npos);
    }
}

TEST_CASE("digests and atomic writes") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const fs::path p = scratch("atomic.txt");
    io::write_file_atomic(p, "one");
    io::write_file_atomic(p, "two");
    CHECK(io::read_file(p) == "two");
    for (const auto& entry : fs::directory_iterator(p.parent_path())) {
        CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
    }
}
