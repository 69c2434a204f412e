#include "fedsel/env/external_oracle.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <stdexcept>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fedsel::env {

using nlohmann::json;

std::string encode_request(const OracleRequest& request) {
  json j = {
      {"schema", kOracleSchemaVersion},
      {"id", request.id},
      {"dataset", request.dataset},
      {"size", request.size},
      {"emd", request.emd},
      {"seed", request.seed},
      {"epochs", request.epochs},
  };
  return j.dump();
}

OracleResponse decode_response(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("oracle response is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("oracle response must be a JSON object");
  if (j.contains("schema") && j.at("schema").get<int>() != kOracleSchemaVersion) {
    throw std::runtime_error("oracle response has unsupported schema version");
  }
  OracleResponse r;
  try {
    r.id = j.at("id").get<std::int64_t>();
    if (j.contains("error")) {
      r.ok = false;
      r.error = j.at("error").get<std::string>();
      return r;
    }
    r.ok = true;
    r.accuracy = j.at("accuracy").get<double>();
    r.achieved_emd = j.value("achieved_emd", 0.0);
    r.wall_time = j.value("wall_time", 0.0);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("oracle response missing field: ") + e.what());
  }
  if (!std::isfinite(r.accuracy) || r.accuracy < 0.0 || r.accuracy > 1.0) {
    throw std::runtime_error("oracle accuracy outside [0, 1]");
  }
  return r;
}

ExternalOracle::ExternalOracle(std::string command, std::uint64_t seed, int epochs)
    : seed_(seed), epochs_(epochs) {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw std::runtime_error(std::string("oracle pipe: ") + std::strerror(errno));
  }
  child_ = fork();
  if (child_ < 0) throw std::runtime_error(std::string("oracle fork: ") + std::strerror(errno));
  if (child_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  // A dead oracle must surface as an exception from write(), not a signal.
  std::signal(SIGPIPE, SIG_IGN);
}

ExternalOracle::~ExternalOracle() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (child_ > 0) {
    int status = 0;
    waitpid(child_, &status, 0);
  }
}

std::string ExternalOracle::read_line() {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw std::runtime_error("oracle process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

OracleResponse ExternalOracle::call(const OracleRequest& request) {
  const std::string line = encode_request(request) + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = write(to_child_, line.data() + written, line.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw std::runtime_error("oracle process is not accepting requests");
    written += static_cast<std::size_t>(n);
  }
  OracleResponse response = decode_response(read_line());
  if (response.id != request.id) {
    throw std::runtime_error("oracle answered request " + std::to_string(response.id) +
                             ", expected " + std::to_string(request.id));
  }
  return response;
}

double ExternalOracle::accuracy(const OracleQuery& query) {
  OracleRequest request;
  request.id = next_id_++;
  request.dataset = query.dataset;
  request.size = std::llround(query.cumulative_size);
  request.emd = query.emd;
  request.seed = seed_;
  request.epochs = epochs_;
  const OracleResponse response = call(request);
  if (!response.ok) throw std::runtime_error("oracle error: " + response.error);
  return response.accuracy;
}

}  // namespace fedsel::env
