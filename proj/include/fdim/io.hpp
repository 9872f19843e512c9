#pragma once

// Artifact formats: SSRM response matrices, CSV magnitude grids and 8-bit
// grayscale PNG heatmaps.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include <png.h>

#include "fdim/farfield.hpp"
#include "fdim/imaging.hpp"

namespace fdi {

static_assert(std::endian::native == std::endian::little,
              "the binary writers assume a little-endian host");

namespace detail {

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("truncated matrix file");
  return v;
}

}  // namespace detail

/// "SSRM", u32 M, u32 N, f32 kappa, then row-major (re, im) f64 pairs.
inline void write_ssrm(const std::string& path, const cmat& P, double kappa) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write("SSRM", 4);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(P.rows()));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(P.cols()));
  detail::put<float>(out, static_cast<float>(kappa));
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      detail::put<double>(out, P(i, j).real());
      detail::put<double>(out, P(i, j).imag());
    }
}

struct SsrmFile {
  cmat P;
  float kappa = 0.0f;
};

inline SsrmFile read_ssrm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open matrix file " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "SSRM", 4) != 0) throw UsageError(path + " is not an SSRM file");
  const auto M = detail::take<std::uint32_t>(in), N = detail::take<std::uint32_t>(in);
  SsrmFile f;
  f.kappa = detail::take<float>(in);
  f.P.resize(M, N);
  for (std::uint32_t i = 0; i < M; ++i)
    for (std::uint32_t j = 0; j < N; ++j) {
      const double re = detail::take<double>(in);
      const double im = detail::take<double>(in);
      f.P(i, j) = cplx(re, im);
    }
  return f;
}

/// Rows from top (largest y) to bottom, columns from left (smallest x).
inline void write_magnitude_csv(const std::string& path, const ImageGrid& img) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  const rmat mag = img.magnitude();
  const int n = img.spec.samples;
  out << std::setprecision(17);
  for (int r = 0; r < n; ++r) {
    const int iy = n - 1 - r;
    for (int ix = 0; ix < n; ++ix) out << (ix ? "," : "") << mag(ix, iy);
    out << '\n';
  }
}

/// 8-bit grayscale pixels, row 0 = top, scaled by the maximum; all zero for
/// a zero image.
inline std::vector<std::uint8_t> grayscale_pixels(const ImageGrid& img) {
  const rmat mag = img.magnitude();
  const int n = img.spec.samples;
  const double peak = mag.size() ? mag.maxCoeff() : 0.0;
  std::vector<std::uint8_t> px(std::size_t(n) * n, 0);
  if (!(peak > 0.0)) return px;
  for (int r = 0; r < n; ++r)
    for (int ix = 0; ix < n; ++ix)
      px[std::size_t(r) * n + ix] =
          static_cast<std::uint8_t>(std::lround(255.0 * mag(ix, n - 1 - r) / peak));
  return px;
}

inline std::string encode_png_gray(const std::vector<std::uint8_t>& px, int width, int height) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  std::string out;
  std::vector<png_bytep> rows(height);
  for (int r = 0; r < height; ++r)
    rows[r] = const_cast<png_bytep>(px.data() + std::size_t(r) * width);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw Error("PNG encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t n) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<char*>(data), n);
      },
      nullptr);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

inline void write_png(const std::string& path, const ImageGrid& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  const std::string png = encode_png_gray(grayscale_pixels(img), img.spec.samples, img.spec.samples);
  out.write(png.data(), static_cast<std::streamsize>(png.size()));
}

}  // namespace fdi
