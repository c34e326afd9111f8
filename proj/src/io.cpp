#include "ard/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "ard/error.hpp"

namespace ard {

std::array<unsigned char, 3> hsv_to_rgb(double h, double s, double v) noexcept {
  h = h - std::floor(h);
  const double hh = h * 6.0;
  const int sector = static_cast<int>(hh) % 6;
  const double f = hh - std::floor(hh);
  const double p = v * (1.0 - s), q = v * (1.0 - s * f), t = v * (1.0 - s * (1.0 - f));
  double r = v, g = t, b = p;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  auto byte = [](double c) {
    return static_cast<unsigned char>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
  };
  return {byte(r), byte(g), byte(b)};
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  return out;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  write_text(path, encode_ppm(image));
}

std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    fail(ErrorCode::Io, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void append_manifest(const std::filesystem::path& dir, nlohmann::json record) {
  const auto path = dir / "manifest.json";
  nlohmann::json all = nlohmann::json::array();
  if (std::filesystem::exists(path)) {
    try {
      all = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Io, "manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!all.is_array()) fail(ErrorCode::Io, "manifest " + path.string() + " is not an array");
  }
  if (record.contains("outputs") && record["outputs"].is_array()) {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& f : record["outputs"]) {
      const auto name = f.is_string() ? f.get<std::string>() : f.at("file").get<std::string>();
      const auto target = dir / name;
      nlohmann::json entry{{"file", name}};
      if (std::filesystem::exists(target)) entry["sha256"] = sha256_file(target);
      outs.push_back(std::move(entry));
    }
    record["outputs"] = std::move(outs);
  }
  all.push_back(std::move(record));
  write_text(path, all.dump(2) + "\n");
}

}  // namespace ard
