#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ard {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> rgb;  // row-major, top row first
};

/// HSV (all in [0,1]) to 8-bit RGB.
std::array<unsigned char, 3> hsv_to_rgb(double h, double s, double v) noexcept;

/// Binary PPM (P6, maxval 255).
std::string encode_ppm(const Image& image);
void write_ppm(const Image& image, const std::filesystem::path& path);

/// printf "%.6g"; the text format used by every CSV artifact.
std::string format_g(double x);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Throw ErrorCode::Io on failure.
void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// Appends one record to <dir>/manifest.json (a JSON array). File names
/// listed under "outputs" become {"file", "sha256"} entries.
void append_manifest(const std::filesystem::path& dir, nlohmann::json record);

}  // namespace ard
