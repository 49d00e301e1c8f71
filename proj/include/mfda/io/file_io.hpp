#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mfda {

/// Writes content to path via a temporary file in the same directory followed
/// by an atomic rename, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Binary matrix container: 8-byte magic, int64 rows, int64 cols, then
/// row-major doubles. Written atomically.
void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_binary(const std::string& path);

/// Multi-matrix variant: 8-byte magic, int64 count, then count blocks of
/// (int64 rows, int64 cols, row-major doubles). Written atomically.
void write_matrices_binary(const std::string& path,
                           const std::vector<Eigen::MatrixXd>& mats);
std::vector<Eigen::MatrixXd> read_matrices_binary(const std::string& path);

/// FNV-1a 64-bit content hash, reported as 16 hex digits. Used to key dataset
/// manifests to the exact bytes they were generated from.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex_of_file(const std::string& path);

/// Creates the directory (and parents) if needed.
void ensure_directory(const std::string& path);

}  // namespace mfda
