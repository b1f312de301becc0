#include "gdp/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

namespace gdp {

namespace {

constexpr double kLumaR = 0.299, kLumaG = 0.587, kLumaB = 0.114;

struct FileCloser {
    void operator()(FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

bool has_suffix_ci(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size())
        return false;
    for (size_t i = 0; i < suffix.size(); ++i) {
        char a = static_cast<char>(std::tolower(s[s.size() - suffix.size() + i]));
        if (a != suffix[i])
            return false;
    }
    return true;
}

int pnm_next_int(FILE* f, const std::string& path) {
    int c;
    // skip whitespace and '#' comments
    for (;;) {
        c = std::fgetc(f);
        if (c == EOF)
            throw FormatError("truncated PNM header: " + path);
        if (c == '#') {
            while (c != '\n' && c != EOF)
                c = std::fgetc(f);
        } else if (!std::isspace(c)) {
            break;
        }
    }
    int val = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        val = val * 10 + (c - '0');
        any = true;
        c = std::fgetc(f);
    }
    if (!any)
        throw FormatError("malformed PNM header: " + path);
    return val;
}

Image load_pnm(FILE* f, const std::string& path) {
    int m0 = std::fgetc(f), m1 = std::fgetc(f);
    if (m0 != 'P' || (m1 != '5' && m1 != '6'))
        throw FormatError("not a binary PGM/PPM file: " + path);
    const int channels = (m1 == '5') ? 1 : 3;
    int w = pnm_next_int(f, path);
    int h = pnm_next_int(f, path);
    int maxval = pnm_next_int(f, path);
    if (maxval != 255)
        throw FormatError("only 8-bit PNM supported (maxval 255): " + path);
    if (w <= 0 || h <= 0)
        throw FormatError("bad PNM dimensions: " + path);
    // exactly one whitespace byte separates header and raster
    std::vector<unsigned char> row(static_cast<size_t>(w) * channels);
    Image img(w, h);
    for (int y = 0; y < h; ++y) {
        if (std::fread(row.data(), 1, row.size(), f) != row.size())
            throw IoError("truncated PNM raster: " + path);
        for (int x = 0; x < w; ++x) {
            double v;
            if (channels == 1)
                v = row[x] / 255.0;
            else
                v = (kLumaR * row[3 * x] + kLumaG * row[3 * x + 1] + kLumaB * row[3 * x + 2]) / 255.0;
            img.at(x, y) = v;
        }
    }
    return img;
}

Image load_png(FILE* f, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    std::vector<png_bytep> rows;
    std::vector<unsigned char> buf;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("failed to decode PNG: " + path);
    }
    png_init_io(png, f);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);

    if (depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("16-bit PNG not supported: " + path);
    }
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    int channels = png_get_channels(png, info);
    size_t stride = png_get_rowbytes(png, info);
    buf.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = buf.data() + y * stride;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y) {
        const unsigned char* r = buf.data() + y * stride;
        for (png_uint_32 x = 0; x < w; ++x) {
            double v;
            if (channels == 1)
                v = r[x] / 255.0;
            else
                v = (kLumaR * r[channels * x] + kLumaG * r[channels * x + 1] +
                     kLumaB * r[channels * x + 2]) / 255.0;
            img.at(static_cast<int>(x), static_cast<int>(y)) = v;
        }
    }
    return img;
}

unsigned char quantize(double v) {
    double c = std::clamp(v, 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(c * 255.0));
}

} // namespace

Image load_image(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f)
        throw IoError("cannot open file: " + path);
    int c0 = std::fgetc(f.get());
    int c1 = std::fgetc(f.get());
    std::rewind(f.get());
    if (c0 == 'P' && (c1 == '5' || c1 == '6'))
        return load_pnm(f.get(), path);
    if (c0 == 0x89 && c1 == 'P')
        return load_png(f.get(), path);
    throw FormatError("unsupported image format: " + path);
}

void save_image(const Image& img, const std::string& path) {
    if (has_suffix_ci(path, ".png")) {
        FilePtr f(std::fopen(path.c_str(), "wb"));
        if (!f)
            throw IoError("cannot open file for writing: " + path);
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (!png)
            throw IoError("png_create_write_struct failed");
        png_infop info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            throw IoError("png_create_info_struct failed");
        }
        std::vector<unsigned char> buf(static_cast<size_t>(img.width()) * img.height());
        std::vector<png_bytep> rows(img.height());
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            throw IoError("failed to encode PNG: " + path);
        }
        png_init_io(png, f.get());
        png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x)
                buf[static_cast<size_t>(y) * img.width() + x] = quantize(img.at(x, y));
            rows[y] = buf.data() + static_cast<size_t>(y) * img.width();
        }
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    } else {
        FilePtr f(std::fopen(path.c_str(), "wb"));
        if (!f)
            throw IoError("cannot open file for writing: " + path);
        std::fprintf(f.get(), "P5\n%d %d\n255\n", img.width(), img.height());
        std::vector<unsigned char> row(img.width());
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x)
                row[x] = quantize(img.at(x, y));
            if (std::fwrite(row.data(), 1, row.size(), f.get()) != row.size())
                throw IoError("short write: " + path);
        }
    }
}

} // namespace gdp
