#include "npr/image.hpp"

#include <png.h>

#include <array>
#include <fstream>
#include <sstream>

namespace npr {

namespace {

void png_append(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

std::vector<std::uint8_t> encode(int width, int height, int color_type, int channels,
                                 const std::uint8_t* pixels) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw std::runtime_error("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png: cannot create info struct");
  }
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: encoding failed");
  }
  png_set_write_fn(png, &out, png_append, png_flush_noop);
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(pixels + static_cast<std::size_t>(y) * width * channels);
  }
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

Rgb8Image to_rgb8(const IntensityImage& img, const std::array<double, 3>& tint) {
  Rgb8Image out{img.width(), img.height(), std::vector<std::uint8_t>(img.size() * 3)};
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = img[i];
    for (int c = 0; c < 3; ++c) out.rgb[i * 3 + c] = to_byte(v * tint[c]);
  }
  return out;
}

std::vector<std::uint8_t> encode_png(const Rgb8Image& img) {
  return encode(img.width, img.height, PNG_COLOR_TYPE_RGB, 3, img.rgb.data());
}

std::vector<std::uint8_t> encode_png_gray(const IntensityImage& img) {
  std::vector<std::uint8_t> gray(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) gray[i] = to_byte(img[i]);
  return encode(img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 1, gray.data());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_pgm(const std::filesystem::path& path, const IntensityImage& img, double lo, double hi) {
  std::ostringstream header;
  header << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  const double range = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < img.size(); ++i) bytes.push_back(to_byte((img[i] - lo) / range));
  write_file(path, bytes);
}

IntensityImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255) throw std::runtime_error(path.string() + ": not an 8-bit P5 PGM");
  in.get();
  IntensityImage img(w, h);
  std::vector<char> raw(img.size());
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!in) throw std::runtime_error(path.string() + ": truncated PGM");
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<unsigned char>(raw[i]) / 255.0f;
  return img;
}

}  // namespace npr
