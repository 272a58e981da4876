#pragma once

#include <filesystem>
#include <vector>

#include "diner/signal.hpp"

namespace diner {

/// Reads a binary PGM (P5) or PPM (P6) with maxval up to 65535. Values are
/// scaled to [0, 1]; dims are (height, width).
[[nodiscard]] GridSignal load_image(const std::filesystem::path& path);

/// Writes a d_in = 2 signal with 1 or 3 channels as P5/P6. Values are
/// clamped to [0, 1] and quantized to `bits` (8 or 16).
void save_image(const GridSignal& signal, const std::filesystem::path& path, int bits = 8);

/// Stacks equally sized frames into a (frames, height, width) signal.
[[nodiscard]] GridSignal load_image_sequence(const std::vector<std::filesystem::path>& frames);

/// Raw grid blob: "DING", version u32, N u64, d_out u32, dtype u8, d_in u32,
/// d_in extents as u64, then N*d_out f64 values row-major.
void save_grid(const GridSignal& signal, const std::filesystem::path& path);
[[nodiscard]] GridSignal load_grid(const std::filesystem::path& path);

} // namespace diner
