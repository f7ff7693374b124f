#pragma once

#include <spopo/langevin.hpp>

#include <filesystem>
#include <string>

namespace spopo {

/// Binary dump: magic, header (field, seed, config hash, T_R, Δt, M, K,
/// slice grid) and then X and Y samples, slice-major.
void write_record_binary(const pulse_train_record& rec, const std::filesystem::path& path);
pulse_train_record read_record_binary(const std::filesystem::path& path);

/// CSV dump with '#' header lines carrying the same metadata, then one row
/// per (trajectory, slice, pulse) with 17 significant digits.
void write_record_csv(const pulse_train_record& rec, const std::filesystem::path& path);
pulse_train_record read_record_csv(const std::filesystem::path& path);

/// Shortest round-trippable text for finite values, "%.17g" style.
std::string format_double(double v);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace spopo
