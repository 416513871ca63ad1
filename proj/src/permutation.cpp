#include "catorder/permutation.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "catorder/error.hpp"

namespace catorder {

namespace {

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(',', start);
    auto piece = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!piece.empty() && (piece.front() == ' ' || piece.front() == '(')) piece.remove_prefix(1);
    while (!piece.empty() && (piece.back() == ' ' || piece.back() == ')')) piece.remove_suffix(1);
    parts.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (int v : image_) {
    if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)]) {
      throw Error(ErrorKind::InvalidArgument, "permutation image is not a bijection");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int size) {
  std::vector<int> image(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) image[static_cast<std::size_t>(k)] = k;
  return Permutation(std::move(image));
}

Permutation Permutation::reversed(const Permutation& base) {
  std::vector<int> image(base.image_.rbegin(), base.image_.rend());
  return Permutation(std::move(image));
}

Permutation Permutation::transposition(int size, int a, int b) {
  auto p = identity(size);
  std::swap(p.image_[static_cast<std::size_t>(a)], p.image_[static_cast<std::size_t>(b)]);
  return p;
}

Permutation Permutation::parse(std::string_view text) {
  std::vector<int> image;
  for (auto piece : split_commas(text)) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (ec != std::errc{} || ptr != piece.data() + piece.size()) {
      throw Error(ErrorKind::Parse, "bad order entry '" + std::string(piece) + "'");
    }
    image.push_back(value - 1);
  }
  return Permutation(std::move(image));
}

Permutation Permutation::parse_labels(std::string_view text, std::span<const std::string> labels) {
  std::vector<int> image;
  for (auto piece : split_commas(text)) {
    auto it = std::find(labels.begin(), labels.end(), piece);
    if (it == labels.end()) {
      throw Error(ErrorKind::Parse, "unknown category label '" + std::string(piece) + "'");
    }
    image.push_back(static_cast<int>(it - labels.begin()));
  }
  if (image.size() != labels.size()) {
    throw Error(ErrorKind::Parse, "order must list every category exactly once");
  }
  return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (int k = 0; k < size(); ++k) inv[static_cast<std::size_t>(image_[static_cast<std::size_t>(k)])] = k;
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
  for (int k = 0; k < size(); ++k) {
    if (image_[static_cast<std::size_t>(k)] != k) return false;
  }
  return true;
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "composing permutations of different sizes");
  }
  std::vector<int> image(b.image_.size());
  for (int k = 0; k < b.size(); ++k) image[static_cast<std::size_t>(k)] = a[b[k]];
  return Permutation(std::move(image));
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  for (int k = 0; k < size(); ++k) os << (k ? "," : "") << image_[static_cast<std::size_t>(k)] + 1;
  return os.str();
}

std::string Permutation::to_labels(std::span<const std::string> labels) const {
  std::ostringstream os;
  os << '(';
  for (int k = 0; k < size(); ++k) {
    os << (k ? ", " : "") << labels[static_cast<std::size_t>(image_[static_cast<std::size_t>(k)])];
  }
  os << ')';
  return os.str();
}

}  // namespace catorder
