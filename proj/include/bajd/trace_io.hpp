#pragma once

// On-disk formats for sampler output and ground truth.
//
//   trace.csv     chain,iter,loglik,logpost,sigma2_1..sigma2_K (every iteration)
//   states.jsonl  {"chain":c,"iter":t,"b":[N*M row-major],"u":[[M]...K]} per retained state
//   truth.json    {"n":N,"m":M,"b_true":[N*M row-major],"u_true":[[M]...K],"sigma2":x,"seed":s}

#include "bajd/gibbs.hpp"
#include "bajd/matrix_io.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace bajd {

void write_trace_csv(const std::vector<ChainTrace>& traces, const std::filesystem::path& path);
void write_states_jsonl(const std::vector<ChainTrace>& traces, const std::filesystem::path& path);

/// Rebuilds traces from trace.csv + states.jsonl in `dir`. Retained states get
/// loglik, logpost and sigma2 from the CSV row of the same (chain, iter); v2 is
/// not stored and is set to 1.
std::vector<ChainTrace> read_trace_dir(const std::filesystem::path& dir);

struct Truth {
  Matrix b_true;
  Matrix u_true;  // M x K, may be empty
  double sigma2 = 0.0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const Truth& t);
Truth truth_from_json(const nlohmann::json& j);
Truth read_truth(const std::filesystem::path& path);

/// Formats a double so that it parses back to the same value.
std::string format_double(double v);

}  // namespace bajd
