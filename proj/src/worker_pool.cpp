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

#include "mctses/worker_pool.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <thread>

#include "mctses/error.hpp"

namespace mctses {
namespace {

constexpr std::uint64_t kHelloIteration = ~std::uint64_t{0};

std::uint32_t Fnv1a32(const std::uint8_t* data, std::size_t n) {
  std::uint32_t h = 0x811c9dc5u;
  for (std::size_t i = 0; i < n; ++i) h = (h ^ data[i]) * 0x01000193u;
  return h;
}

template <typename T>
void PutLe(std::uint8_t* out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

template <typename T>
T GetLe(const std::uint8_t* in) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[i]) << (8 * i);
  return v;
}

using Clock = std::chrono::steady_clock;

int RemainingMs(Clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

void CheckMessage(const WorkerMsg& msg, std::uint64_t iteration, int population,
                  int sender, int world_size) {
  if (msg.iteration != iteration) {
    throw ProtocolError("worker " + std::to_string(sender) + " sent iteration " +
                        std::to_string(msg.iteration) + ", expected " +
                        std::to_string(iteration));
  }
  if (static_cast<int>(msg.rank) >= population ||
      OwnerOf(static_cast<int>(msg.rank), world_size) != sender) {
    throw ProtocolError("worker " + std::to_string(sender) + " sent result for pair " +
                        std::to_string(msg.rank) + " it does not own");
  }
}

}  // namespace

Frame EncodeFrame(const WorkerMsg& msg) {
  Frame f{};
  PutLe<std::uint32_t>(f.data(), 20);
  PutLe<std::uint64_t>(f.data() + 4, msg.iteration);
  PutLe<std::uint32_t>(f.data() + 12, msg.rank);
  PutLe<std::uint64_t>(f.data() + 16, std::bit_cast<std::uint64_t>(msg.delta));
  PutLe<std::uint32_t>(f.data() + 24, Fnv1a32(f.data() + 4, 20));
  return f;
}

WorkerMsg DecodeFrame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kFrameBytes) throw ProtocolError("frame: wrong size");
  if (GetLe<std::uint32_t>(bytes.data()) != 20) throw ProtocolError("frame: bad length prefix");
  if (GetLe<std::uint32_t>(bytes.data() + 24) != Fnv1a32(bytes.data() + 4, 20)) {
    throw ProtocolError("frame: checksum mismatch");
  }
  WorkerMsg msg;
  msg.iteration = GetLe<std::uint64_t>(bytes.data() + 4);
  msg.rank = GetLe<std::uint32_t>(bytes.data() + 12);
  msg.delta = std::bit_cast<double>(GetLe<std::uint64_t>(bytes.data() + 16));
  return msg;
}

// ---------------------------------------------------------------------------
// In-process

InProcessHub::InProcessHub(int world_size, std::chrono::milliseconds timeout)
    : world_size_(world_size), timeout_(timeout) {
  if (world_size < 1) throw ConfigError("worker pool: world size must be >= 1");
}

std::vector<double> InProcessHub::Allgather(int rank, std::uint64_t iteration,
                                            const std::vector<WorkerMsg>& mine,
                                            int population) {
  std::unique_lock lock(mu_);
  Round& round = rounds_[iteration];
  if (round.deltas.empty()) round.deltas.resize(population);
  if (static_cast<int>(round.deltas.size()) != population) {
    throw ProtocolError("worker " + std::to_string(rank) + " disagrees on population size");
  }
  for (const WorkerMsg& msg : mine) {
    CheckMessage(msg, iteration, population, rank, world_size_);
    if (round.deltas[msg.rank]) {
      throw ProtocolError("rank collision on pair " + std::to_string(msg.rank));
    }
    round.deltas[msg.rank] = msg.delta;
  }
  ++round.posted;
  cv_.notify_all();
  if (!cv_.wait_for(lock, timeout_, [&] { return round.posted >= world_size_; })) {
    throw ProtocolError("iteration " + std::to_string(iteration) + ": only " +
                        std::to_string(round.posted) + " of " + std::to_string(world_size_) +
                        " workers reported before timeout");
  }
  std::vector<double> out(population);
  for (int i = 0; i < population; ++i) {
    if (!round.deltas[i]) {
      throw ProtocolError("iteration " + std::to_string(iteration) + ": missing pair " +
                          std::to_string(i));
    }
    out[i] = *round.deltas[i];
  }
  if (++round.collected == world_size_) rounds_.erase(iteration);
  return out;
}

// ---------------------------------------------------------------------------
// TCP

std::vector<Endpoint> ParsePeers(const std::string& spec) {
  std::vector<Endpoint> peers;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string::npos) end = spec.size();
    const std::string item = spec.substr(start, end - start);
    const std::size_t colon = item.rfind(':');
    if (item.empty() || colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
      throw ConfigError("peer '" + item + "' is not host:port");
    }
    Endpoint ep{item.substr(0, colon), 0};
    try {
      ep.port = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("peer '" + item + "' has a bad port");
    }
    if (ep.port <= 0 || ep.port > 65535) throw ConfigError("peer '" + item + "' has a bad port");
    peers.push_back(ep);
    start = end + 1;
  }
  return peers;
}

TcpPool::TcpPool(int rank, std::vector<Endpoint> peers, std::chrono::milliseconds timeout)
    : rank_(rank), peers_(std::move(peers)), timeout_(timeout) {
  const int world = static_cast<int>(peers_.size());
  if (world < 1 || rank < 0 || rank >= world) {
    throw ConfigError("tcp pool: rank " + std::to_string(rank) + " outside peer list of size " +
                      std::to_string(world));
  }
  fds_.assign(world, -1);
  const auto deadline = Clock::now() + timeout_;

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ProtocolError("tcp pool: socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(static_cast<std::uint16_t>(peers_[rank].port));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, world) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw ProtocolError("tcp pool: cannot listen on port " + std::to_string(peers_[rank].port) +
                        ": " + err);
  }

  // Dial every lower rank.
  for (int j = 0; j < rank; ++j) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(peers_[j].port);
    if (::getaddrinfo(peers_[j].host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
      throw ProtocolError("tcp pool: cannot resolve " + peers_[j].host);
    }
    int fd = -1;
    while (true) {
      fd = ::socket(AF_INET, SOCK_STREAM, 0);
      if (::connect(fd, res->ai_addr, res->ai_addrlen) == 0) break;
      ::close(fd);
      fd = -1;
      if (RemainingMs(deadline) == 0) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    ::freeaddrinfo(res);
    if (fd < 0) {
      throw ProtocolError("tcp pool: worker " + std::to_string(j) + " unreachable before timeout");
    }
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    fds_[j] = fd;
    SendFrame(fd, WorkerMsg{kHelloIteration, static_cast<std::uint32_t>(rank_), 0.0});
  }

  // Accept every higher rank.
  for (int accepted = 0; accepted < world - 1 - rank; ++accepted) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, RemainingMs(deadline)) <= 0) {
      throw ProtocolError("tcp pool: timed out waiting for higher-ranked workers");
    }
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) throw ProtocolError("tcp pool: accept() failed");
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    const WorkerMsg hello = RecvFrame(fd);
    const int peer = static_cast<int>(hello.rank);
    if (hello.iteration != kHelloIteration || peer <= rank_ || peer >= world) {
      ::close(fd);
      throw ProtocolError("tcp pool: unexpected hello from rank " + std::to_string(peer));
    }
    if (fds_[peer] >= 0) {
      ::close(fd);
      throw ProtocolError("tcp pool: rank collision, two workers claim rank " +
                          std::to_string(peer));
    }
    fds_[peer] = fd;
  }
}

TcpPool::~TcpPool() {
  for (int fd : fds_) {
    if (fd >= 0) ::close(fd);
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpPool::SendFrame(int fd, const WorkerMsg& msg) {
  const Frame f = EncodeFrame(msg);
  std::size_t sent = 0;
  while (sent < f.size()) {
    const ssize_t n = ::send(fd, f.data() + sent, f.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      throw ProtocolError("tcp pool: send failed");
    }
    sent += static_cast<std::size_t>(n);
  }
}

WorkerMsg TcpPool::RecvFrame(int fd) {
  Frame f{};
  std::size_t got = 0;
  const auto deadline = Clock::now() + timeout_;
  while (got < f.size()) {
    pollfd p{fd, POLLIN, 0};
    if (::poll(&p, 1, RemainingMs(deadline)) <= 0) {
      throw ProtocolError("tcp pool: timed out waiting for a worker message");
    }
    const ssize_t n = ::recv(fd, f.data() + got, f.size() - got, 0);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      throw ProtocolError("tcp pool: connection closed by peer");
    }
    got += static_cast<std::size_t>(n);
  }
  return DecodeFrame(f);
}

std::vector<double> TcpPool::Allgather(std::uint64_t iteration,
                                       const std::vector<WorkerMsg>& mine, int population) {
  const int world = size();
  std::vector<std::optional<double>> deltas(population);
  for (const WorkerMsg& msg : mine) {
    CheckMessage(msg, iteration, population, rank_, world);
    deltas[msg.rank] = msg.delta;
  }
  for (int j = 0; j < world; ++j) {
    if (j == rank_) continue;
    for (const WorkerMsg& msg : mine) SendFrame(fds_[j], msg);
  }
  for (int j = 0; j < world; ++j) {
    if (j == rank_) continue;
    int expected = 0;
    for (int i = 0; i < population; ++i) expected += OwnerOf(i, world) == j ? 1 : 0;
    for (int k = 0; k < expected; ++k) {
      const WorkerMsg msg = RecvFrame(fds_[j]);
      CheckMessage(msg, iteration, population, j, world);
      if (deltas[msg.rank]) {
        throw ProtocolError("rank collision on pair " + std::to_string(msg.rank));
      }
      deltas[msg.rank] = msg.delta;
    }
  }
  std::vector<double> out(population);
  for (int i = 0; i < population; ++i) {
    if (!deltas[i]) throw ProtocolError("missing pair " + std::to_string(i));
    out[i] = *deltas[i];
  }
  return out;
}

}  // namespace mctses
