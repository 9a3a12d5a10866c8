#ifndef OTTAIL_COMMON_HPP
#define OTTAIL_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ot {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(dist2(a, b));
}

// Lexicographic comparison of two points of equal dimension.
inline int lex_compare(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return 0;
}

// A flat, immutable list of d-dimensional points.  Used for compact sets K,
// probe grids and similar finite point collections.
class PointList {
 public:
  PointList() : dim_(0) {}
  PointList(int dim, std::vector<double> flat) : dim_(dim), flat_(std::move(flat)) {
    if (dim_ <= 0) throw std::invalid_argument("PointList: dimension must be positive");
    if (flat_.size() % static_cast<std::size_t>(dim_) != 0)
      throw std::invalid_argument("PointList: flat size not a multiple of dim");
  }

  static PointList from_points(const std::vector<Vec>& pts) {
    if (pts.empty()) throw std::invalid_argument("PointList: empty input");
    const int d = static_cast<int>(pts.front().size());
    std::vector<double> flat;
    flat.reserve(pts.size() * d);
    for (const auto& p : pts) {
      if (static_cast<int>(p.size()) != d)
        throw std::invalid_argument("PointList: inconsistent dimensions");
      flat.insert(flat.end(), p.begin(), p.end());
    }
    return PointList(d, std::move(flat));
  }

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / dim_; }
  bool empty() const { return flat_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {flat_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  const std::vector<double>& flat() const { return flat_; }

 private:
  int dim_;
  std::vector<double> flat_;
};

}  // namespace ot

#endif  // OTTAIL_COMMON_HPP
