#include "topicstream/external_ranker.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>

#include <json.hpp>

#include "topicstream/error.hpp"

namespace topicstream {
namespace {

using json = nlohmann::json;

std::string dump(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "exit status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "signal " + std::to_string(WTERMSIG(status));
  return "status " + std::to_string(status);
}

}  // namespace

ExternalRanker::ExternalRanker(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0) fail(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    fail(std::string("pipe: ") + std::strerror(errno));
  }
  pid_ = ::fork();
  if (pid_ < 0) fail(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    // exec so that pid_ is the ranker itself and kill reaches it
    const std::string line = "exec " + command_;
    ::execl("/bin/sh", "sh", "-c", line.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  try {
    json reply;
    try {
      reply = json::parse(call(dump({{"op", "hello"}})));
    } catch (const json::exception& e) {
      fail(std::string("malformed hello reply: ") + e.what());
    }
    if (!reply.is_object() || reply.value("ok", false) != true ||
        !reply.contains("trainable") || !reply["trainable"].is_boolean()) {
      fail("unexpected hello reply: " + reply.dump());
    }
    trainable_ = reply["trainable"].get<bool>();
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalRanker::~ExternalRanker() { shutdown(); }

void ExternalRanker::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    // Closing stdin asks the child to finish; give it a moment, then kill.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void ExternalRanker::fail(const std::string& what) {
  throw RuntimeFailure("external ranker `" + command_ + "`: " + what);
}

std::string ExternalRanker::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) fail("timed out after " + std::to_string(timeout_.count()) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[65536];
    const ssize_t got = ::read(from_child_, chunk, sizeof chunk);
    if (got < 0) {
      if (errno == EINTR) continue;
      fail(std::string("read: ") + std::strerror(errno));
    }
    if (got == 0) {
      int status = 0;
      std::string why = "closed its output";
      if (::waitpid(pid_, &status, 0) == pid_) {
        why = "exited (" + describe_status(status) + ")";
        pid_ = -1;
      }
      fail(why);
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

std::string ExternalRanker::call(const std::string& request_line) {
  std::size_t sent = 0;
  while (sent < request_line.size()) {
    const ssize_t n = ::write(to_child_, request_line.data() + sent, request_line.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("write: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
  return read_line();
}

double ExternalRanker::train(std::span<const TrainingExample> examples, TrainContext& ctx) {
  json pairs = json::array();
  for (const auto& ex : examples) {
    pairs.push_back({{"q", ex.query}, {"qid", ex.query_id}, {"d", ex.doc}, {"did", ex.doc_id}});
  }
  json reply;
  try {
    reply = json::parse(call(dump({{"op", "train"}, {"pairs", pairs}, {"epoch", ctx.epoch}})));
  } catch (const json::exception& e) {
    fail(std::string("malformed train reply: ") + e.what());
  }
  if (!reply.is_object() || reply.value("ok", false) != true) {
    fail("train failed: " + reply.dump());
  }
  if (!reply.contains("loss") || !reply["loss"].is_number()) {
    fail("train reply without numeric loss: " + reply.dump());
  }
  return reply["loss"].get<double>();
}

std::vector<double> ExternalRanker::rescore(const RescoreRequest& request) {
  json cands = json::array();
  for (const auto& c : request.candidates) cands.push_back({{"did", c.doc_id}, {"d", c.text}});
  json reply;
  try {
    reply = json::parse(call(dump({{"op", "rescore"},
                                   {"qid", request.query_id},
                                   {"q", request.query},
                                   {"cands", cands}})));
  } catch (const json::exception& e) {
    fail(std::string("malformed rescore reply: ") + e.what());
  }
  if (!reply.is_object() || reply.value("ok", false) != true || !reply.contains("scores") ||
      !reply["scores"].is_array()) {
    fail("unexpected rescore reply: " + reply.dump().substr(0, 200));
  }
  std::vector<double> scores;
  for (const auto& s : reply["scores"]) {
    if (!s.is_number()) fail("non-numeric score in rescore reply");
    scores.push_back(s.get<double>());
  }
  if (scores.size() != request.candidates.size()) {
    fail("rescore returned " + std::to_string(scores.size()) + " scores for " +
         std::to_string(request.candidates.size()) + " candidates");
  }
  return scores;
}

}  // namespace topicstream
