#pragma once

#include "umbir/media.hpp"
#include "umbir/synth.hpp"
#include "umbir/system_model.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace umbir {

/// Reconstructed or ground-truth raster on its grid.
struct Image {
  ImageGrid grid;
  std::vector<double> data;
};

/// Little-endian files with a magic tag, a version and CRC-32 checksums over
/// the header and the payload. Values are stored as 32-bit floats.
///
/// UMBM  measurements: S, K, then per frequency M, fs, T_o, f0, duration,
///       taper, amplitude, noise sigma; traces frequency-major, receiver,
///       time.
/// UMBI  image: rows, cols, pitch, origin; raster in index order.
/// UMBR  system cache: S, K, N, then per frequency the pulse, window, M and
///       the run lists of A and D.
inline constexpr std::uint32_t kFormatVersion = 1;

void write_measurements(const std::filesystem::path &path,
                        const MeasurementSet &set);
[[nodiscard]] MeasurementSet read_measurements(const std::filesystem::path &path);

void write_image(const std::filesystem::path &path, const Image &image);
[[nodiscard]] Image read_image(const std::filesystem::path &path);

void write_system_cache(
    const std::filesystem::path &path,
    const std::vector<std::shared_ptr<const SparseSystem>> &systems);
[[nodiscard]] std::vector<std::shared_ptr<const SparseSystem>>
read_system_cache(const std::filesystem::path &path);

/// 8-bit grayscale PGM, highest row at the top. With `magnitude`, |x| is
/// scaled so its peak maps to white; otherwise min..max maps to black..white.
void write_pgm(const std::filesystem::path &path, const Image &image,
               bool magnitude = true);

/// Writes `contents` to a sibling temporary file and renames it into place,
/// so a failed run never leaves a partial output behind.
void write_text_atomic(const std::filesystem::path &path,
                       const std::string &contents);

} // namespace umbir
