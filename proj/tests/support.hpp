#pragma once

// Shared fixtures for the test suites: temp directories, tiny image
// encoders (JPEG via libjpeg, PNG via libpng) and in-memory datasets.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "camid/synth.hpp"
#include "camid/types.hpp"

namespace testsupport {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("camid_test_" + tag);
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

// uniform-color binary PPM
inline void write_ppm_rgb(const fs::path& path, int w, int h, unsigned char r, unsigned char g,
                          unsigned char b) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "P6\n" << w << " " << h << "\n255\n";
    for (int i = 0; i < w * h; ++i) {
        out.put(static_cast<char>(r));
        out.put(static_cast<char>(g));
        out.put(static_cast<char>(b));
    }
}

inline void encode_jpeg_gradient(const fs::path& path, int w, int h, int quality = 90) {
    std::FILE* file = std::fopen(path.string().c_str(), "wb");
    if (!file) throw std::runtime_error("cannot open fixture path");
    jpeg_compress_struct cinfo;
    jpeg_error_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, file);
    cinfo.image_width = w;
    cinfo.image_height = h;
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * 3);
    while (cinfo.next_scanline < cinfo.image_height) {
        const int y = static_cast<int>(cinfo.next_scanline);
        for (int x = 0; x < w; ++x) {
            row[3 * x + 0] = static_cast<unsigned char>((x * 255) / std::max(1, w - 1));
            row[3 * x + 1] = static_cast<unsigned char>((y * 255) / std::max(1, h - 1));
            row[3 * x + 2] = 128;
        }
        unsigned char* rowp = row.data();
        jpeg_write_scanlines(&cinfo, &rowp, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::fclose(file);
}

inline void encode_png_rgb(const fs::path& path, const camid::RasterImage& img) {
    if (img.channels != 3) throw std::runtime_error("png fixture expects RGB");
    std::FILE* file = std::fopen(path.string().c_str(), "wb");
    if (!file) throw std::runtime_error("cannot open fixture path");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png)) != 0) throw std::runtime_error("png fixture write failed");
    png_init_io(png, file);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                row[3 * x + c] = static_cast<unsigned char>(img.at(y, x, c));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(file);
}

// minimal ISO-BMFF header carrying the heic brand
inline void write_fake_heic(const fs::path& path) {
    static const unsigned char bytes[] = {0x00, 0x00, 0x00, 0x18, 'f', 't', 'y', 'p',
                                          'h',  'e',  'i',  'c',  0x00, 0x00, 0x00, 0x00,
                                          'm',  'i',  'f',  '1',  'h',  'e',  'i',  'c'};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
}

// wraps in-memory labeled images as a Dataset with pre-decoded records
inline camid::Dataset dataset_from(const camid::LabeledImages& li) {
    camid::Dataset ds;
    ds.labels = li.device_labels;
    for (std::size_t i = 0; i < li.images.size(); ++i) {
        camid::ImageRecord rec;
        rec.path = "mem://" + std::to_string(i);
        rec.label = ds.labels[li.labels[i]];
        rec.decoded = li.images[i];
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

}  // namespace testsupport
