#include "bajd/matrix_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace bajd {

namespace fs = std::filesystem;

nlohmann::json row_major(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Matrix from_row_major(const nlohmann::json& values, Eigen::Index rows, Eigen::Index cols) {
  if (!values.is_array() || static_cast<Eigen::Index>(values.size()) != rows * cols)
    throw IoError("expected an array of " + std::to_string(rows * cols) + " numbers");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& v = values[static_cast<std::size_t>(i * cols + j)];
      if (!v.is_number()) throw IoError("non-numeric matrix entry");
      m(i, j) = v.get<double>();
    }
  return m;
}

nlohmann::json to_json(const MatrixSet& c) {
  nlohmann::json j;
  j["n"] = c.dim();
  j["k"] = c.size();
  j["matrices"] = nlohmann::json::array();
  for (const auto& m : c.matrices()) j["matrices"].push_back(row_major(m));
  return j;
}

MatrixSet matrix_set_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<Eigen::Index>();
    const auto k = j.at("k").get<std::size_t>();
    const auto& arr = j.at("matrices");
    if (!arr.is_array() || arr.size() != k) throw IoError("\"matrices\" must hold k entries");
    std::vector<Matrix> mats;
    mats.reserve(k);
    for (const auto& m : arr) mats.push_back(from_row_major(m, n, n));
    return MatrixSet(std::move(mats));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed MatrixSet JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("invalid MatrixSet: ") + e.what());
  }
}

void write_json_file(const nlohmann::json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_matrix_set_json(const MatrixSet& c, const fs::path& path) { write_json_file(to_json(c), path); }

MatrixSet read_matrix_set_json(const fs::path& path) { return matrix_set_from_json(read_json_file(path)); }

void write_matrix_csv(const Matrix& m, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw IoError(path.string() + ": bad number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path.string() + ": empty matrix file");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != m.cols())
      throw IoError(path.string() + ": ragged rows");
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_matrix_set_csv(const MatrixSet& c, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  for (std::size_t k = 0; k < c.size(); ++k) {
    std::ostringstream name;
    name << "c_" << std::setw(3) << std::setfill('0') << k << ".csv";
    write_matrix_csv(c[k], dir / name.str());
  }
}

MatrixSet read_matrix_set(const fs::path& path) {
  if (!fs::is_directory(path)) return read_matrix_set_json(path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  if (files.empty()) throw IoError(path.string() + ": no .csv matrices found");
  std::sort(files.begin(), files.end());
  std::vector<Matrix> mats;
  for (const auto& f : files) mats.push_back(read_matrix_csv(f));
  try {
    return MatrixSet(std::move(mats));
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace bajd
