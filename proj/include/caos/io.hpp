#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "caos/diagnostics.hpp"
#include "caos/model.hpp"

namespace caos {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Header plus one row per report, every value printed with 17 significant
/// digits.
std::string format_csv(std::span<const EnergyReport> series);
void write_csv(std::span<const EnergyReport> series, const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

/// "CAOS", u32 version, u32 ny, u32 nz, f64 t, then theta, q, psi, T, S
/// nodal values (y-major, z contiguous), all little-endian.
void write_snapshot(const State& state, const std::filesystem::path& path);
/// Ghost layers of the result are filled with the homogeneous reflections.
State read_snapshot(const std::filesystem::path& path);

}  // namespace caos
