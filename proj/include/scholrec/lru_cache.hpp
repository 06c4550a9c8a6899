#pragma once

#include <cstddef>
#include <list>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>

namespace scholrec {

// Thread-safe least-recently-used map. get_or_compute runs the producer
// outside the lock; when two threads race on one key the first stored value
// wins and both callers receive it.
template <typename Key, typename Value, typename Hash = std::hash<Key>>
class LruCache {
 public:
  explicit LruCache(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  std::optional<Value> get(const Key& key) {
    std::lock_guard lock(mutex_);
    const auto it = map_.find(key);
    if (it == map_.end()) {
      ++misses_;
      return std::nullopt;
    }
    ++hits_;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }

  // Returns the stored value: an existing one if present, else `value`.
  Value put(const Key& key, Value value) {
    std::lock_guard lock(mutex_);
    const auto it = map_.find(key);
    if (it != map_.end()) {
      order_.splice(order_.begin(), order_, it->second);
      return it->second->second;
    }
    order_.emplace_front(key, std::move(value));
    map_.emplace(key, order_.begin());
    if (map_.size() > capacity_) {
      map_.erase(order_.back().first);
      order_.pop_back();
    }
    return order_.front().second;
  }

  template <typename Producer>
  Value get_or_compute(const Key& key, Producer&& produce) {
    if (auto hit = get(key)) return std::move(*hit);
    return put(key, produce());
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return map_.size();
  }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
  }
  std::size_t misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
  }

  void clear() {
    std::lock_guard lock(mutex_);
    map_.clear();
    order_.clear();
  }

 private:
  using Entry = std::pair<Key, Value>;

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> order_;  // most recent first
  std::unordered_map<Key, typename std::list<Entry>::iterator, Hash> map_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace scholrec
