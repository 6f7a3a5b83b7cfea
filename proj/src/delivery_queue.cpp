#include "shoplift/delivery_queue.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "shoplift/codec.hpp"

namespace shoplift {

DeliveryQueue::DeliveryQueue(std::size_t capacity, std::optional<std::filesystem::path> path)
    : capacity_(capacity), path_(std::move(path)) {
  if (capacity_ == 0) {
    throw ConfigError("queue capacity must be >= 1");
  }
  if (path_ && std::filesystem::exists(*path_)) {
    std::ifstream in(*path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) {
        continue;
      }
      try {
        items_.push_back(deserialize<SuspicionEvent>(line));
      } catch (const DecodeError& e) {
        // Only the last line can be torn; anything after it is lost anyway.
        spdlog::warn("queue file {}: dropping unreadable entry ({})", path_->string(), e.what());
      }
    }
    while (items_.size() > capacity_) {
      items_.pop_front();
      ++dropped_;
    }
  }
}

void DeliveryQueue::persist() const {
  if (!path_) {
    return;
  }
  std::filesystem::path tmp = *path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const SuspicionEvent& e : items_) {
      out << serialize(e) << '\n';
    }
    if (!out.flush()) {
      throw Error("cannot write queue file " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, *path_);
}

void DeliveryQueue::push(const SuspicionEvent& event) {
  {
    std::lock_guard lock(mutex_);
    if (items_.size() == capacity_) {
      items_.pop_front();
      ++dropped_;
      spdlog::warn("delivery queue full, dropped oldest event (total dropped: {})", dropped_);
    }
    items_.push_back(event);
    persist();
  }
  changed_.notify_all();
}

std::optional<SuspicionEvent> DeliveryQueue::front() const {
  std::lock_guard lock(mutex_);
  if (items_.empty()) {
    return std::nullopt;
  }
  return items_.front();
}

void DeliveryQueue::pop(const std::string& event_id) {
  {
    std::lock_guard lock(mutex_);
    if (items_.empty() || items_.front().event_id != event_id) {
      return;
    }
    items_.pop_front();
    persist();
  }
  changed_.notify_all();
}

std::optional<SuspicionEvent> DeliveryQueue::wait_front(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  changed_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; });
  if (items_.empty()) {
    return std::nullopt;
  }
  return items_.front();
}

bool DeliveryQueue::wait_empty(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  return changed_.wait_for(lock, timeout, [&] { return items_.empty(); });
}

void DeliveryQueue::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  changed_.notify_all();
}

std::size_t DeliveryQueue::size() const {
  std::lock_guard lock(mutex_);
  return items_.size();
}

std::uint64_t DeliveryQueue::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

}  // namespace shoplift
