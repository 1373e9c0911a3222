#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace harmo {

enum class Topology { Torus, Box, Mixed };

const char* to_string(Topology t);

// Uniform node-centred grid. Axis 0 is the slowest index, the last axis is
// contiguous. A box axis with N nodes spans (N-1)h; a periodic axis spans Nh.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(std::vector<int> shape, std::vector<double> spacing, std::vector<bool> periodic,
           std::vector<double> origin = {});

  static GridSpec box(std::vector<int> shape, std::vector<double> spacing,
                      std::vector<double> origin = {});
  static GridSpec torus(std::vector<int> shape, std::vector<double> spacing,
                        std::vector<double> origin = {});
  // Box with `nodes` per axis covering [lo, hi]^n.
  static GridSpec cube(int dim, int nodes, double lo, double hi);

  int dim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<double>& origin() const { return origin_; }
  bool periodic(int axis) const { return periodic_[axis]; }
  const std::vector<bool>& periodic_flags() const { return periodic_; }
  Topology topology() const;

  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }
  double cell_volume() const;  // prod h
  double length(int axis) const;
  double lower(int axis) const { return origin_[axis]; }
  double upper(int axis) const { return origin_[axis] + length(axis); }
  double center(int axis) const { return origin_[axis] + 0.5 * length(axis); }

  std::size_t index(const int* multi) const;
  std::size_t index(const std::vector<int>& multi) const { return index(multi.data()); }
  void multi(std::size_t node, int* out) const;
  std::vector<int> multi(std::size_t node) const;
  int coord_index(std::size_t node, int axis) const {
    return static_cast<int>((node / stride_[axis]) % static_cast<std::size_t>(shape_[axis]));
  }
  double coord(std::size_t node, int axis) const {
    return origin_[axis] + spacing_[axis] * coord_index(node, axis);
  }
  std::vector<double> point(std::size_t node) const;

  bool on_boundary(std::size_t node) const;
  // Outward unit normal: face normal, or normalised sum of face normals on
  // edges and corners. Zero vector for interior nodes.
  std::vector<double> outward_normal(std::size_t node) const;
  // Trapezoid (box axes) / rectangle (periodic axes) node weight without
  // the cell volume factor.
  double node_weight(std::size_t node) const;
  std::vector<double> quadrature_weights() const;  // node_weight * cell_volume

  bool same_layout(const GridSpec& o) const;
  bool operator==(const GridSpec& o) const;
  std::string describe() const;

 private:
  std::vector<int> shape_;
  std::vector<double> spacing_;
  std::vector<bool> periodic_;
  std::vector<double> origin_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
};

}  // namespace harmo
