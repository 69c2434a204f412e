#pragma once

#include <cstdint>
#include <string>
#include <sys/types.h>

#include "fedsel/env/accuracy.hpp"

namespace fedsel::env {

inline constexpr int kOracleSchemaVersion = 1;

struct OracleRequest {
  std::int64_t id = 0;
  std::string dataset;
  long long size = 0;
  double emd = 0.0;
  std::uint64_t seed = 0;
  int epochs = 5;
};

struct OracleResponse {
  std::int64_t id = 0;
  bool ok = false;
  double achieved_emd = 0.0;
  double accuracy = 0.0;
  double wall_time = 0.0;
  std::string error;
};

/// One JSON object per line, no trailing newline.
std::string encode_request(const OracleRequest& request);
/// Throws std::runtime_error on malformed lines or schema mismatch.
OracleResponse decode_response(const std::string& line);

/// Talks to a spawned oracle process over its stdin/stdout, one request and
/// one response line at a time.
class ExternalOracle final : public AccuracyOracle {
 public:
  ExternalOracle(std::string command, std::uint64_t seed, int epochs = 5);
  ~ExternalOracle() override;
  ExternalOracle(const ExternalOracle&) = delete;
  ExternalOracle& operator=(const ExternalOracle&) = delete;

  double accuracy(const OracleQuery& query) override;
  OracleResponse call(const OracleRequest& request);

 private:
  std::string read_line();

  std::uint64_t seed_;
  int epochs_;
  std::int64_t next_id_ = 1;
  pid_t child_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace fedsel::env
