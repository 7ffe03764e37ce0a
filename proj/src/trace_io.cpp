#include "bajd/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace bajd {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(const std::vector<ChainTrace>& traces, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const std::size_t k = traces.empty() || traces.front().sigma2.empty()
                            ? 0
                            : static_cast<std::size_t>(traces.front().sigma2.front().size());
  out << "chain,iter,loglik,logpost";
  for (std::size_t j = 1; j <= k; ++j) out << ",sigma2_" << j;
  out << '\n';
  for (const auto& t : traces) {
    for (std::size_t it = 0; it < t.loglik.size(); ++it) {
      out << t.chain << ',' << it << ',' << format_double(t.loglik[it]) << ',' << format_double(t.logpost[it]);
      for (Eigen::Index j = 0; j < t.sigma2[it].size(); ++j) out << ',' << format_double(t.sigma2[it][j]);
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_states_jsonl(const std::vector<ChainTrace>& traces, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& t : traces) {
    for (const auto& r : t.retained) {
      nlohmann::json j;
      j["chain"] = t.chain;
      j["iter"] = r.iter;
      j["b"] = row_major(r.state.b.matrix());
      nlohmann::json u = nlohmann::json::array();
      for (Eigen::Index k = 0; k < r.state.u.k(); ++k) {
        const Vector uk = r.state.u.u(k);
        u.push_back(std::vector<double>(uk.data(), uk.data() + uk.size()));
      }
      j["u"] = std::move(u);
      out << j.dump() << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ChainTrace> read_trace_dir(const fs::path& dir) {
  const fs::path csv_path = dir / "trace.csv";
  const fs::path states_path = dir / "states.jsonl";
  std::ifstream csv(csv_path);
  if (!csv) throw IoError("cannot read " + csv_path.string());
  std::string line;
  if (!std::getline(csv, line)) throw IoError(csv_path.string() + ": empty file");

  std::map<int, ChainTrace> by_chain;
  std::map<std::pair<int, int>, std::size_t> row_of;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    try {
      while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw IoError(csv_path.string() + ": malformed row");
    }
    if (vals.size() < 4) throw IoError(csv_path.string() + ": short row");
    const int chain = static_cast<int>(vals[0]);
    const int iter = static_cast<int>(vals[1]);
    ChainTrace& t = by_chain[chain];
    t.chain = chain;
    row_of[{chain, iter}] = t.loglik.size();
    t.loglik.push_back(vals[2]);
    t.logpost.push_back(vals[3]);
    t.sigma2.push_back(Eigen::Map<const Vector>(vals.data() + 4, static_cast<Eigen::Index>(vals.size() - 4)));
  }

  std::ifstream states(states_path);
  if (!states) throw IoError("cannot read " + states_path.string());
  while (std::getline(states, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const int chain = j.at("chain").get<int>();
      const int iter = j.at("iter").get<int>();
      const auto& u = j.at("u");
      const auto k = static_cast<Eigen::Index>(u.size());
      if (k == 0) throw IoError("state without eigenvalues");
      const auto m = static_cast<Eigen::Index>(u.front().size());
      const auto nm = static_cast<Eigen::Index>(j.at("b").size());
      if (m == 0 || nm % m != 0) throw IoError("inconsistent B / u sizes");
      const Matrix b = from_row_major(j.at("b"), nm / m, m);
      Matrix uv(m, k);
      for (Eigen::Index kk = 0; kk < k; ++kk) {
        const auto& row = u[static_cast<std::size_t>(kk)];
        if (static_cast<Eigen::Index>(row.size()) != m) throw IoError("ragged eigenvalue rows");
        for (Eigen::Index i = 0; i < m; ++i) uv(i, kk) = row[static_cast<std::size_t>(i)].get<double>();
      }
      auto it = row_of.find({chain, iter});
      if (it == row_of.end()) throw IoError("state has no matching trace row");
      ChainTrace& t = by_chain.at(chain);
      const std::size_t row = it->second;
      RetainedSample r{iter, t.loglik[row], t.logpost[row],
                       ChainState{StiefelPoint::orthonormalize(b), EigenvalueSet{uv},
                                  NoiseState{t.sigma2[row], Vector::Ones(k)}}};
      t.retained.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(states_path.string() + ": " + e.what());
    }
  }
  std::vector<ChainTrace> out;
  for (auto& [c, t] : by_chain) out.push_back(std::move(t));
  return out;
}

nlohmann::json to_json(const Truth& t) {
  nlohmann::json j;
  j["n"] = t.b_true.rows();
  j["m"] = t.b_true.cols();
  j["b_true"] = row_major(t.b_true);
  nlohmann::json u = nlohmann::json::array();
  for (Eigen::Index k = 0; k < t.u_true.cols(); ++k) {
    const Vector uk = t.u_true.col(k);
    u.push_back(std::vector<double>(uk.data(), uk.data() + uk.size()));
  }
  j["u_true"] = std::move(u);
  j["sigma2"] = t.sigma2;
  j["seed"] = t.seed;
  return j;
}

Truth truth_from_json(const nlohmann::json& j) {
  try {
    Truth t;
    const auto n = j.at("n").get<Eigen::Index>();
    const auto m = j.at("m").get<Eigen::Index>();
    t.b_true = from_row_major(j.at("b_true"), n, m);
    const auto& u = j.at("u_true");
    t.u_true = Matrix(m, static_cast<Eigen::Index>(u.size()));
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (static_cast<Eigen::Index>(u[k].size()) != m) throw IoError("truth: u_true rows must have m entries");
      for (Eigen::Index i = 0; i < m; ++i) t.u_true(i, static_cast<Eigen::Index>(k)) = u[k][static_cast<std::size_t>(i)].get<double>();
    }
    t.sigma2 = j.at("sigma2").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed truth file: ") + e.what());
  }
}

Truth read_truth(const fs::path& path) { return truth_from_json(read_json_file(path)); }

}  // namespace bajd
