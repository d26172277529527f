#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace pnp {

/// Physical coordinates; unused trailing components are zero.
using Point = std::array<double, 3>;

/// Zero-based cell multi-index. Components beyond the grid dimension are 0.
using MultiIndex = std::array<int, 3>;

enum class Side { Minus, Plus };

/// A cell face, named by the cell it bounds, the normal axis and the side.
///
/// The interior face (alpha, j, Plus) is the same face as
/// (alpha + e_j, j, Minus); `canonical()` maps both to the Plus face of the
/// lower cell.
struct FaceId {
  MultiIndex cell{};
  int axis = 0;
  Side side = Side::Minus;

  friend bool operator==(const FaceId&, const FaceId&) = default;
};

/// Uniform tensor-product grid on (0, L_1) x ... x (0, L_d), d in {1, 2, 3}.
///
/// Cells are stored lexicographically with axis 0 fastest:
///   flat = i0 + N0 * (i1 + N1 * i2).
/// Immutable after construction.
class Grid {
 public:
  Grid(int dim, std::vector<double> lengths, std::vector<int> counts);

  int dim() const noexcept { return dim_; }
  int count(int axis) const { return counts_[axis]; }
  double length(int axis) const { return lengths_[axis]; }
  double spacing(int axis) const { return spacings_[axis]; }
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t num_cells() const noexcept { return num_cells_; }

  /// Total domain volume, prod L_j.
  double domain_volume() const noexcept;

  std::size_t flat(const MultiIndex& index) const noexcept {
    return static_cast<std::size_t>(index[0]) +
           static_cast<std::size_t>(counts_[0]) *
               (static_cast<std::size_t>(index[1]) +
                static_cast<std::size_t>(counts_[1]) * static_cast<std::size_t>(index[2]));
  }
  MultiIndex multi(std::size_t flat) const noexcept;

  /// Flat-index offset of the neighbour along `axis` (stride of that axis).
  std::size_t stride(int axis) const noexcept { return strides_[axis]; }

  bool contains(const MultiIndex& index) const noexcept;

  Point cell_center(const MultiIndex& index) const noexcept;
  Point cell_center(std::size_t flat) const noexcept { return cell_center(multi(flat)); }
  Point face_center(const FaceId& face) const noexcept;

  bool is_boundary(const FaceId& face) const noexcept;
  FaceId canonical(const FaceId& face) const;

  /// All faces on the boundary plane x_axis = 0 (Minus) or x_axis = L (Plus),
  /// in lexicographic order of their adjacent cells.
  std::vector<FaceId> boundary_faces(int axis, Side side) const;

  /// Number of interior faces normal to `axis`.
  std::size_t num_interior_faces(int axis) const;

 private:
  int dim_;
  std::array<int, 3> counts_{1, 1, 1};
  std::array<double, 3> lengths_{1.0, 1.0, 1.0};
  std::array<double, 3> spacings_{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> strides_{1, 1, 1};
  double cell_volume_ = 1.0;
  std::size_t num_cells_ = 1;
};

/// Convenience factory matching the textbook signature.
inline Grid build_grid(int dim, std::vector<double> lengths, std::vector<int> counts) {
  return Grid(dim, std::move(lengths), std::move(counts));
}

}  // namespace pnp
