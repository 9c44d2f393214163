#include "nino/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include <png.h>

#include "nino/error.hpp"
#include "nino/grid.hpp"

namespace nino {

namespace {

std::uint8_t lerp_channel(std::uint8_t a, std::uint8_t b, double f) {
  return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * f));
}

}  // namespace

double colormap_position(double value, const ColorScale& scale) {
  return std::clamp((value - scale.min) / (scale.max - scale.min), 0.0, 1.0);
}

Rgb colormap(double value, const ColorScale& scale) {
  if (!(scale.min < scale.max)) fail(ErrorKind::BadScale, "colormap scale needs min < max");
  if (is_missing(value)) return kMissingColor;
  const double pos = colormap_position(value, scale) * (kColormapAnchors.size() - 1);
  const auto seg = std::min<std::size_t>(static_cast<std::size_t>(pos), kColormapAnchors.size() - 2);
  const double f = pos - static_cast<double>(seg);
  const Rgb& a = kColormapAnchors[seg];
  const Rgb& b = kColormapAnchors[seg + 1];
  return {lerp_channel(a.r, b.r, f), lerp_channel(a.g, b.g, f), lerp_channel(a.b, b.b, f)};
}

HeatmapImage render_heatmap(std::span<const double> field, std::size_t n_lat, std::size_t n_lon,
                            const ColorScale& scale, std::size_t cell_px) {
  if (!(scale.min < scale.max)) fail(ErrorKind::BadScale, "heatmap scale needs min < max");
  if (field.size() != n_lat * n_lon || n_lat == 0 || n_lon == 0 || cell_px == 0) {
    fail(ErrorKind::ShapeMismatch, "heatmap field size does not match its dimensions");
  }
  HeatmapImage img{n_lon * cell_px, n_lat * cell_px, {}};
  img.pixels.resize(img.width * img.height);
  for (std::size_t row = 0; row < n_lat; ++row) {
    const std::size_t lat = n_lat - 1 - row;
    for (std::size_t col = 0; col < n_lon; ++col) {
      const Rgb c = colormap(field[lat * n_lon + col], scale);
      for (std::size_t dy = 0; dy < cell_px; ++dy) {
        for (std::size_t dx = 0; dx < cell_px; ++dx) {
          img.pixels[(row * cell_px + dy) * img.width + col * cell_px + dx] = c;
        }
      }
    }
  }
  return img;
}

std::string encode_ppm(const HeatmapImage& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.pixels.size() * 3);
  for (const auto& p : image.pixels) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

void write_ppm(const HeatmapImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  const auto bytes = encode_ppm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

void write_png(const HeatmapImage& image, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) fail(ErrorKind::IoError, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::IoError, "libpng initialization failed");
  }
  std::vector<png_byte> row(image.width * 3);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::IoError, "PNG encoding failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      const Rgb& p = image.at(x, y);
      row[3 * x] = p.r;
      row[3 * x + 1] = p.g;
      row[3 * x + 2] = p.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace nino
