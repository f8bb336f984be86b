// Integer partitions and their conjugates.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tscale {

class Partition {
 public:
  Partition() = default;
  /// Trailing zeros are kept so that a partition can be padded to a length.
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t j = 0; j < parts_.size(); ++j) {
      if (parts_[j] < 0) throw std::invalid_argument("partition parts must be nonnegative");
      if (j > 0 && parts_[j] > parts_[j - 1]) throw std::invalid_argument("partition parts must be nonincreasing");
    }
  }

  const std::vector<int>& parts() const { return parts_; }
  int operator[](std::size_t j) const { return j < parts_.size() ? parts_[j] : 0; }
  std::size_t length() const { return parts_.size(); }
  int size() const {
    int s = 0;
    for (int v : parts_) s += v;
    return s;
  }
  /// Number of nonzero parts.
  int height() const {
    int h = 0;
    for (int v : parts_) h += v > 0 ? 1 : 0;
    return h;
  }
  int largest() const { return parts_.empty() ? 0 : parts_.front(); }

  /// Column heights of the Young diagram (no trailing zeros).
  Partition conjugate() const {
    std::vector<int> out(static_cast<std::size_t>(largest()), 0);
    for (int v : parts_)
      for (int c = 0; c < v; ++c) ++out[static_cast<std::size_t>(c)];
    return Partition(std::move(out));
  }

  /// Copy padded with zeros (or stripped of trailing zeros) to length n.
  Partition padded(std::size_t n) const {
    if (static_cast<std::size_t>(height()) > n) throw std::invalid_argument("partition has more than " + std::to_string(n) + " nonzero parts");
    std::vector<int> out(parts_.begin(), parts_.begin() + static_cast<std::ptrdiff_t>(std::min(n, parts_.size())));
    out.resize(n, 0);
    return Partition(std::move(out));
  }

  Partition scaled(int s) const {
    std::vector<int> out = parts_;
    for (int& v : out) v *= s;
    return Partition(std::move(out));
  }

  /// Partition with trailing zeros removed.
  Partition trimmed() const { return padded(static_cast<std::size_t>(height())); }

  bool operator==(const Partition& o) const { return trimmed().parts_ == o.trimmed().parts_; }

  std::string str() const {
    std::string s = "(";
    for (std::size_t j = 0; j < parts_.size(); ++j) s += (j ? "," : "") + std::to_string(parts_[j]);
    return s + ")";
  }

 private:
  std::vector<int> parts_;
};

inline Partition conjugate(const Partition& p) { return p.conjugate(); }

/// All partitions of k with at most `maxParts` nonzero parts, each padded to
/// length maxParts, in reverse lexicographic order ((k) first).
inline std::vector<Partition> partitions_of(int k, int maxParts) {
  std::vector<Partition> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int cap) -> void {
    if (remaining == 0) {
      std::vector<int> parts = cur;
      parts.resize(static_cast<std::size_t>(maxParts), 0);
      out.emplace_back(std::move(parts));
      return;
    }
    if (static_cast<int>(cur.size()) == maxParts) return;
    for (int v = std::min(remaining, cap); v >= 1; --v) {
      cur.push_back(v);
      self(self, remaining - v, v);
      cur.pop_back();
    }
  };
  if (k == 0) {
    out.emplace_back(std::vector<int>(static_cast<std::size_t>(maxParts), 0));
    return out;
  }
  rec(rec, k, k);
  return out;
}

}  // namespace tscale
