// Copyright 2026 The DouDizhu Lab Authors
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

#ifndef DDZ_REPLAY_BUFFER_H_
#define DDZ_REPLAY_BUFFER_H_

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "ddz/cards.h"
#include "ddz/features.h"
#include "ddz/game.h"
#include "ddz/models.h"

namespace ddz {

// One visited (state, action) pair and the return it led to.
struct Sample {
  Position position = Position::kLandlord;
  std::vector<float> state;  // decision-network state encoding
  CompactHistory history{};
  CardSet action;
  float target_return = 0.0f;
  CountVector true_next_hand{};
  LegalLabel legal_label{};

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Bounded FIFO with blocking push (producers wait while full) and blocking
// batch pop (the consumer waits for enough samples). Close() releases all
// waiters.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

  // Returns false if the queue was closed before the item fit.
  bool Push(T item) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
    if (closed_) return false;
    items_.push_back(std::move(item));
    ++produced_;
    not_empty_.notify_all();
    return true;
  }

  // Non-blocking; false when full or closed.
  bool TryPush(T item) {
    std::lock_guard lock(mu_);
    if (closed_ || items_.size() >= capacity_) return false;
    items_.push_back(std::move(item));
    ++produced_;
    not_empty_.notify_all();
    return true;
  }

  // Blocks until `n` items are available; nullopt once closed.
  std::optional<std::vector<T>> PopBatch(std::size_t n) {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || items_.size() >= n; });
    if (items_.size() < n) return std::nullopt;
    return TakeLocked(n);
  }

  // Non-blocking variant.
  std::optional<std::vector<T>> TryPopBatch(std::size_t n) {
    std::lock_guard lock(mu_);
    if (items_.size() < n) return std::nullopt;
    return TakeLocked(n);
  }

  void Close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_full_.notify_all();
    not_empty_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t produced() const {
    std::lock_guard lock(mu_);
    return produced_;
  }
  std::uint64_t consumed() const {
    std::lock_guard lock(mu_);
    return consumed_;
  }

  // Resident items in FIFO order (for checkpointing).
  std::vector<T> Snapshot() const {
    std::lock_guard lock(mu_);
    return std::vector<T>(items_.begin(), items_.end());
  }
  // Replaces contents and counters (for resuming).
  void Restore(std::vector<T> items, std::uint64_t produced,
               std::uint64_t consumed) {
    std::lock_guard lock(mu_);
    items_.assign(std::make_move_iterator(items.begin()),
                  std::make_move_iterator(items.end()));
    produced_ = produced;
    consumed_ = consumed;
  }

 private:
  std::vector<T> TakeLocked(std::size_t n) {
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(std::move(items_.front()));
      items_.pop_front();
    }
    consumed_ += n;
    not_full_.notify_all();
    return out;
  }

  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> items_;
  std::uint64_t produced_ = 0;
  std::uint64_t consumed_ = 0;
  bool closed_ = false;
};

using ReplayBuffer = BoundedQueue<Sample>;

}  // namespace ddz

#endif  // DDZ_REPLAY_BUFFER_H_
