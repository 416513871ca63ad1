#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace catorder {

/// An order of the J response categories.
///
/// Stored 0-based: `(*this)[k]` is the data category placed at model
/// position k. The order "(t, s, o, st)" over labels (o, s, st, t) is the
/// image {3, 1, 0, 2}. Composition follows (a * b)(k) = a(b(k)).
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> image);

  static Permutation identity(int size);
  /// The order that lists `base` back to front: rev(k) = base(J-1-k).
  static Permutation reversed(const Permutation& base);
  /// Swap of two positions, as a permutation of `size` elements.
  static Permutation transposition(int size, int a, int b);
  /// Parses "2,1,3,4" (1-based positions).
  static Permutation parse(std::string_view text);
  /// Parses a comma separated list of category labels, e.g. "t,s,o,st".
  static Permutation parse_labels(std::string_view text,
                                  std::span<const std::string> labels);

  int size() const noexcept { return static_cast<int>(image_.size()); }
  int operator[](int k) const { return image_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& image() const noexcept { return image_; }

  Permutation inverse() const;
  bool is_identity() const;

  friend Permutation operator*(const Permutation& a, const Permutation& b);
  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

  /// "2,1,3,4"
  std::string to_string() const;
  /// "(t, s, o, st)"
  std::string to_labels(std::span<const std::string> labels) const;

 private:
  std::vector<int> image_;
};

}  // namespace catorder
