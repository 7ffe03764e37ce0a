#pragma once

// MatrixSet serialization.
//
// JSON: {"n": N, "k": K, "matrices": [[row-major N*N numbers], ...]}
// CSV:  one matrix per file, N rows of N comma-separated values.

#include "bajd/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace bajd {

/// Thrown for unreadable or malformed input files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const MatrixSet& c);
MatrixSet matrix_set_from_json(const nlohmann::json& j);

/// Row-major flattening used by every JSON payload in this project.
nlohmann::json row_major(const Matrix& m);
Matrix from_row_major(const nlohmann::json& values, Eigen::Index rows, Eigen::Index cols);

void write_matrix_set_json(const MatrixSet& c, const std::filesystem::path& path);
MatrixSet read_matrix_set_json(const std::filesystem::path& path);

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Writes c_000.csv, c_001.csv, ... into `dir`.
void write_matrix_set_csv(const MatrixSet& c, const std::filesystem::path& dir);

/// Reads a JSON file, or every *.csv in a directory in lexicographic order.
MatrixSet read_matrix_set(const std::filesystem::path& path);

/// Serializes JSON with a trailing newline; throws IoError if the file cannot be written.
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace bajd
