#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "topicstream/ranker.hpp"

namespace topicstream {

// Ranker living in a child process (`/bin/sh -c command`) that speaks
// newline-delimited JSON on stdin/stdout, one request in flight:
//   {"op":"hello"}                          -> {"ok":true,"trainable":bool}
//   {"op":"train","pairs":[{"q","qid","d","did"}...],"epoch":n}
//                                           -> {"ok":true,"loss":float}
//   {"op":"rescore","qid","q","cands":[{"did","d"}...]}
//                                           -> {"ok":true,"scores":[...]}
// Malformed replies, timeouts and child exit raise RuntimeFailure.
class ExternalRanker final : public Ranker {
 public:
  explicit ExternalRanker(std::string command,
                          std::chrono::milliseconds timeout = std::chrono::seconds(300));
  ~ExternalRanker() override;

  ExternalRanker(const ExternalRanker&) = delete;
  ExternalRanker& operator=(const ExternalRanker&) = delete;

  std::string name() const override { return "external"; }
  bool trainable() const override { return trainable_; }
  bool concurrent_rescore() const override { return false; }

  double train(std::span<const TrainingExample> examples, TrainContext& ctx) override;
  std::vector<double> rescore(const RescoreRequest& request) override;

  const std::string& command() const { return command_; }

 private:
  std::string call(const std::string& request_line);
  std::string read_line();
  void shutdown();
  [[noreturn]] void fail(const std::string& what);

  std::string command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  bool trainable_ = false;
};

}  // namespace topicstream
