#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <filesystem>
#include <string>

namespace rbanova {

// Binary containers are raw little-endian float64 with minimal headers:
// vectors carry an 8-byte length, matrices an 8-byte (rows, cols) pair and
// column-major payload. Round trips are bit-exact.

void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

/// Plain-text triplet export (row col value per line) for debugging.
void write_triplets(const std::filesystem::path& path, const Eigen::SparseMatrix<double>& m);

/// Checksum of a file's bytes (FNV-1a 64), hex encoded.
std::string file_checksum(const std::filesystem::path& path);

/// Format a double with 17 significant digits (round-trips exactly).
std::string format_full(double v);

}  // namespace rbanova
