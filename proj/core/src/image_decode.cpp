#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <csetjmp>

#include <jpeglib.h>
#include <png.h>

#include "camid/ingest.hpp"
#include "camid/types.hpp"

namespace camid {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---------------------------------------------------------------------------
// HEIC detection
// ---------------------------------------------------------------------------

bool looks_like_heif(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char head[16] = {};
    in.read(head, sizeof(head));
    if (in.gcount() < 12) return false;
    if (std::memcmp(head + 4, "ftyp", 4) != 0) return false;
    static const char* brands[] = {"heic", "heix", "hevc", "heim", "heis", "mif1", "msf1"};
    for (const char* b : brands) {
        if (std::memcmp(head + 8, b, 4) == 0) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// JPEG (libjpeg); decode warnings are treated as errors
// ---------------------------------------------------------------------------

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, mgr->message);
    std::longjmp(mgr->jump, 1);
}

void jpeg_silent_output(j_common_ptr) {}

RasterImage decode_jpeg(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) throw DecodeError("cannot open file", path);

    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    jerr.pub.output_message = jpeg_silent_output;

    std::vector<unsigned char> row;
    RasterImage img;

    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError(std::string("jpeg decode failed: ") + jerr.message, path);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int h = static_cast<int>(cinfo.output_height);
    const int w = static_cast<int>(cinfo.output_width);
    img = RasterImage::make(h, w, 3, PixelRange::U8);
    row.resize(static_cast<std::size_t>(w) * 3);
    unsigned char* rowp = row.data();
    while (cinfo.output_scanline < cinfo.output_height) {
        const int y = static_cast<int>(cinfo.output_scanline);
        jpeg_read_scanlines(&cinfo, &rowp, 1);
        double* dst = &img.at(y, 0, 0);
        for (std::size_t i = 0; i < row.size(); ++i) dst[i] = static_cast<double>(row[i]);
    }
    jpeg_finish_decompress(&cinfo);
    const long warnings = cinfo.err->num_warnings;
    jpeg_destroy_decompress(&cinfo);
    if (warnings > 0) throw DecodeError("jpeg stream corrupt or truncated", path);
    return img;
}

// ---------------------------------------------------------------------------
// PNG (libpng)
// ---------------------------------------------------------------------------

RasterImage decode_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) throw DecodeError("cannot open file", path);

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw DecodeError("not a PNG file", path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("png reader allocation failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("png reader allocation failed", path);
    }

    std::vector<unsigned char> data;
    std::vector<png_bytep> row_pointers;
    int h = 0, w = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("png decode failed", path);
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);  // alpha is ignored; images are assumed opaque
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    data.resize(rowbytes * static_cast<std::size_t>(h));
    row_pointers.resize(h);
    for (int y = 0; y < h; ++y) row_pointers[y] = data.data() + rowbytes * static_cast<std::size_t>(y);
    png_read_image(png, row_pointers.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (rowbytes != static_cast<std::size_t>(w) * 3)
        throw DecodeError("unexpected PNG row layout", path);

    RasterImage img = RasterImage::make(h, w, 3, PixelRange::U8);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<double>(data[i]);
    return img;
}

// ---------------------------------------------------------------------------
// PNM (P2/P3 ascii, P5/P6 binary), maxval <= 255
// ---------------------------------------------------------------------------

int pnm_next_int(std::istream& in, const std::filesystem::path& path) {
    // skips whitespace and '#' comments
    while (true) {
        const int c = in.peek();
        if (c == EOF) throw DecodeError("truncated PNM header", path);
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value)) throw DecodeError("malformed PNM header", path);
    return value;
}

RasterImage decode_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("cannot open file", path);

    char magic[2] = {};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P') throw DecodeError("not a PNM file", path);
    const char kind = magic[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
        throw DecodeError("unsupported PNM variant", path);

    const int w = pnm_next_int(in, path);
    const int h = pnm_next_int(in, path);
    const int maxval = pnm_next_int(in, path);
    if (w < 1 || h < 1) throw DecodeError("invalid PNM dimensions", path);
    if (maxval < 1 || maxval > 255) throw DecodeError("unsupported PNM maxval", path);

    const bool color = (kind == '3' || kind == '6');
    const int channels = color ? 3 : 1;
    const std::size_t count = static_cast<std::size_t>(w) * h * channels;
    std::vector<double> raw(count);

    if (kind == '5' || kind == '6') {
        in.get();  // single whitespace byte after maxval
        std::vector<unsigned char> bytes(count);
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count)
            throw DecodeError("truncated PNM pixel data", path);
        for (std::size_t i = 0; i < count; ++i) raw[i] = static_cast<double>(bytes[i]);
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const int v = pnm_next_int(in, path);
            if (v < 0 || v > maxval) throw DecodeError("PNM sample out of range", path);
            raw[i] = static_cast<double>(v);
        }
    }

    RasterImage img = RasterImage::make(h, w, 3, PixelRange::U8);
    const double scale = 255.0 / maxval;
    if (color) {
        for (std::size_t i = 0; i < count; ++i) img.pixels[i] = raw[i] * scale;
    } else {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const double v = raw[i] * scale;
            img.pixels[3 * i + 0] = v;
            img.pixels[3 * i + 1] = v;
            img.pixels[3 * i + 2] = v;
        }
    }
    return img;
}

}  // namespace

bool is_supported_image_file(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".ppm";
}

RasterImage decode_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DecodeError("no such file", path);
    const std::string ext = lower_extension(path);
    if (ext == ".heic" || ext == ".heif" || looks_like_heif(path))
        throw DecodeError(
            "HEIC/HEIF input: pre-convert required (convert losslessly to PNG first)", path);
    if (ext == ".jpg" || ext == ".jpeg") return decode_jpeg(path);
    if (ext == ".png") return decode_png(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return decode_pnm(path);
    throw DecodeError("unsupported image format '" + ext + "'", path);
}

void write_ppm(const RasterImage& img, const std::filesystem::path& path) {
    const double scale = img.range == PixelRange::Unit ? 255.0 : 1.0;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double v = img.at(y, x, img.channels == 3 ? c : 0) * scale;
                const double clamped = std::min(255.0, std::max(0.0, v));
                row[static_cast<std::size_t>(x) * 3 + c] =
                    static_cast<unsigned char>(std::lround(clamped));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace camid
