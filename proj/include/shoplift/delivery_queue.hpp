#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <mutex>
#include <optional>

#include "shoplift/model.hpp"

namespace shoplift {

// Bounded FIFO of events awaiting delivery. When full, the oldest event is
// dropped and counted. With a backing file the queue is rewritten after every
// change and reloaded on construction, so undelivered events survive restarts.
class DeliveryQueue {
 public:
  explicit DeliveryQueue(std::size_t capacity, std::optional<std::filesystem::path> path = std::nullopt);

  void push(const SuspicionEvent& event);
  std::optional<SuspicionEvent> front() const;
  // Removes the front element if it is still the given event.
  void pop(const std::string& event_id);

  // Waits until the queue is non-empty, closed, or the timeout passes.
  std::optional<SuspicionEvent> wait_front(std::chrono::milliseconds timeout);
  // Waits until the queue is empty; returns false on timeout.
  bool wait_empty(std::chrono::milliseconds timeout);
  void close();

  std::size_t size() const;
  std::uint64_t dropped() const;
  std::size_t capacity() const { return capacity_; }

 private:
  void persist() const;

  std::size_t capacity_;
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::condition_variable changed_;
  std::deque<SuspicionEvent> items_;
  std::uint64_t dropped_ = 0;
  bool closed_ = false;
};

}  // namespace shoplift
