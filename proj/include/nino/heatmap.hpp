#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nino {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Diverging colormap anchors at scale fractions 0, 1/4, 1/2, 3/4, 1:
/// violet, blue, white, yellow, red. Missing cells are gray.
inline constexpr std::array<Rgb, 5> kColormapAnchors{{
    {48, 0, 96},
    {0, 0, 255},
    {255, 255, 255},
    {255, 220, 0},
    {200, 0, 0},
}};
inline constexpr Rgb kMissingColor{128, 128, 128};

struct ColorScale {
  double min = -3.0;
  double max = 3.0;
};

/// Color at `value`, piecewise linear in RGB between anchors; values outside the
/// scale take the end colors.
Rgb colormap(double value, const ColorScale& scale);

/// Colormap parameter in [0, 1] of `value`.
double colormap_position(double value, const ColorScale& scale);

struct HeatmapImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rgb> pixels;  // row-major, top row first

  const Rgb& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

/// Renders a [n_lat][n_lon] field (southernmost row first) with north at the top,
/// one `cell_px` square block per cell.
HeatmapImage render_heatmap(std::span<const double> field, std::size_t n_lat, std::size_t n_lon,
                            const ColorScale& scale, std::size_t cell_px = 1);

/// Binary PPM (P6) bytes.
std::string encode_ppm(const HeatmapImage& image);
void write_ppm(const HeatmapImage& image, const std::filesystem::path& path);
void write_png(const HeatmapImage& image, const std::filesystem::path& path);

}  // namespace nino
