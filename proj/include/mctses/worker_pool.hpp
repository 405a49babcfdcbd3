// Copyright 2026 The mctses Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mctses {

/// One antithetic-pair result. `rank` is the pair index within the
/// population; with one pair per worker it equals the worker rank.
struct WorkerMsg {
  std::uint64_t iteration = 0;
  std::uint32_t rank = 0;
  double delta = 0.0;
  friend bool operator==(const WorkerMsg&, const WorkerMsg&) = default;
};

// Wire frame: u32 payload length (= 20) | u64 iteration | u32 rank |
// f64 delta | u32 FNV-1a checksum of the 20 payload bytes. Little-endian.
inline constexpr std::size_t kFrameBytes = 4 + 8 + 4 + 8 + 4;
using Frame = std::array<std::uint8_t, kFrameBytes>;

Frame EncodeFrame(const WorkerMsg& msg);
// Throws ProtocolError on a bad length prefix or checksum.
WorkerMsg DecodeFrame(std::span<const std::uint8_t> bytes);

// Pair i is evaluated by worker i % world_size.
inline int OwnerOf(int pair, int world_size) { return pair % world_size; }

/// Allgather over the workers of one ES run.
class WorkerPool {
 public:
  virtual ~WorkerPool() = default;
  virtual int rank() const = 0;
  virtual int size() const = 0;
  /// Publishes this worker's pair results and returns all `population`
  /// deltas indexed by pair. Blocks until every worker has contributed.
  virtual std::vector<double> Allgather(std::uint64_t iteration,
                                        const std::vector<WorkerMsg>& mine,
                                        int population) = 0;
};

/// Shared rendezvous for in-process workers (threads).
class InProcessHub {
 public:
  InProcessHub(int world_size, std::chrono::milliseconds timeout);

  std::vector<double> Allgather(int rank, std::uint64_t iteration,
                                const std::vector<WorkerMsg>& mine, int population);
  int size() const { return world_size_; }

 private:
  struct Round {
    std::vector<std::optional<double>> deltas;
    int posted = 0;
    int collected = 0;
  };

  int world_size_;
  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::uint64_t, Round> rounds_;
};

class InProcessPool final : public WorkerPool {
 public:
  InProcessPool(std::shared_ptr<InProcessHub> hub, int rank) : hub_(std::move(hub)), rank_(rank) {}
  int rank() const override { return rank_; }
  int size() const override { return hub_->size(); }
  std::vector<double> Allgather(std::uint64_t iteration, const std::vector<WorkerMsg>& mine,
                                int population) override {
    return hub_->Allgather(rank_, iteration, mine, population);
  }

 private:
  std::shared_ptr<InProcessHub> hub_;
  int rank_;
};

struct Endpoint {
  std::string host;
  int port = 0;
};

// "host:port,host:port,..."
std::vector<Endpoint> ParsePeers(const std::string& spec);

/// Full-mesh TCP pool: one connection per pair of workers. Worker r listens
/// on peers[r] and dials every lower rank; the first frame on a connection
/// is a hello carrying the dialer's rank.
class TcpPool final : public WorkerPool {
 public:
  TcpPool(int rank, std::vector<Endpoint> peers, std::chrono::milliseconds timeout);
  ~TcpPool() override;
  TcpPool(const TcpPool&) = delete;
  TcpPool& operator=(const TcpPool&) = delete;

  int rank() const override { return rank_; }
  int size() const override { return static_cast<int>(peers_.size()); }
  std::vector<double> Allgather(std::uint64_t iteration, const std::vector<WorkerMsg>& mine,
                                int population) override;

 private:
  void SendFrame(int fd, const WorkerMsg& msg);
  WorkerMsg RecvFrame(int fd);

  int rank_;
  std::vector<Endpoint> peers_;
  std::chrono::milliseconds timeout_;
  int listen_fd_ = -1;
  std::vector<int> fds_;  // by peer rank; -1 for self
};

}  // namespace mctses
