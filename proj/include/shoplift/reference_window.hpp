#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shoplift/distance.hpp"
#include "shoplift/lof.hpp"

namespace shoplift {

// Bounded FIFO of "normal" points with an incrementally maintained pairwise
// distance matrix. Inserting into a full window evicts the oldest point.
template <class Point>
class ReferenceWindow {
 public:
  explicit ReferenceWindow(std::size_t capacity)
      : capacity_(capacity), slots_(capacity), distances_(capacity * capacity, 0.0) {
    if (capacity == 0) {
      throw std::invalid_argument("ReferenceWindow capacity must be positive");
    }
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return size_ == capacity_; }

  // i-th oldest point.
  const Point& at(std::size_t i) const { return slots_[slot_of(i)]; }

  std::vector<Point> contents() const {
    std::vector<Point> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      out.push_back(at(i));
    }
    return out;
  }

  void push(Point p) {
    std::size_t slot;
    if (full()) {
      slot = head_;
      head_ = (head_ + 1) % capacity_;
    } else {
      slot = slot_of(size_);
      ++size_;
    }
    slots_[slot] = std::move(p);
    for (std::size_t i = 0; i < size_; ++i) {
      const std::size_t other = slot_of(i);
      const double d = other == slot ? 0.0 : euclidean(slots_[slot], slots_[other]);
      distances_[slot * capacity_ + other] = d;
      distances_[other * capacity_ + slot] = d;
    }
    reference_.reset();
  }

  // Distances from q to each point, oldest first.
  std::vector<double> distances_to(const Point& q) const {
    std::vector<double> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      out.push_back(euclidean(q, at(i)));
    }
    return out;
  }

  // LOF statistics of the current contents; rebuilt only after a change.
  const LofReference& reference(std::size_t k) const {
    if (!reference_ || reference_->k() != k) {
      std::vector<double> matrix(size_ * size_);
      for (std::size_t i = 0; i < size_; ++i) {
        const std::size_t si = slot_of(i);
        for (std::size_t j = 0; j < size_; ++j) {
          matrix[i * size_ + j] = distances_[si * capacity_ + slot_of(j)];
        }
      }
      reference_ = LofReference::from_distances(matrix, size_, k);
    }
    return *reference_;
  }

  double score(const Point& q, std::size_t k) const { return reference(k).score(distances_to(q)); }

 private:
  std::size_t slot_of(std::size_t i) const { return (head_ + i) % capacity_; }

  std::size_t capacity_;
  std::vector<Point> slots_;
  std::vector<double> distances_;  // slot-indexed, capacity x capacity
  std::size_t head_ = 0;           // slot of the oldest point
  std::size_t size_ = 0;
  mutable std::optional<LofReference> reference_;
};

}  // namespace shoplift
