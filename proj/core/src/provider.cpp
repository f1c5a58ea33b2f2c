#include "mmscs/provider.hpp"

#include <csignal>
#include <cerrno>
#include <cstring>
#include <nlohmann/json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "mmscs/error.hpp"

namespace mmscs {

SubprocessProvider::SubprocessProvider(const std::string& command) : command_(command) {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(std::string("pipe: ") + std::strerror(errno));
  }
  pid_ = fork();
  if (pid_ < 0) throw Error(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
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
  // A provider that exits early must not kill us on the next write.
  std::signal(SIGPIPE, SIG_IGN);
}

SubprocessProvider::~SubprocessProvider() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

nn::Vector SubprocessProvider::embed(std::string_view text) {
  std::string request = nlohmann::json{{"text", std::string(text)}}.dump() + "\n";
  std::size_t sent = 0;
  while (sent < request.size()) {
    const ssize_t n = write(to_child_, request.data() + sent, request.size() - sent);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error("provider '" + command_ + "' closed its input");
    sent += static_cast<std::size_t>(n);
  }
  std::size_t eol;
  while ((eol = buffer_.find('\n')) == std::string::npos) {
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error("provider '" + command_ + "' exited without answering");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  std::string line = buffer_.substr(0, eol);
  buffer_.erase(0, eol + 1);
  try {
    const auto j = nlohmann::json::parse(line);
    const auto& values = j.at("vector");
    nn::Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i].get<double>();
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad provider response: ") + e.what(), 0);
  }
}

}  // namespace mmscs
