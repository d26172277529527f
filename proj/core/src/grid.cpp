#include "pnp/grid.hpp"

#include <cmath>
#include <string>

#include "pnp/error.hpp"

namespace pnp {

Grid::Grid(int dim, std::vector<double> lengths, std::vector<int> counts) : dim_(dim) {
  if (dim < 1 || dim > 3) {
    throw InvalidArgument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (static_cast<int>(lengths.size()) != dim || static_cast<int>(counts.size()) != dim) {
    throw InvalidArgument("grid needs exactly " + std::to_string(dim) +
                          " lengths and counts");
  }
  for (int j = 0; j < dim; ++j) {
    if (!(lengths[j] > 0.0) || !std::isfinite(lengths[j])) {
      throw InvalidArgument("grid length along axis " + std::to_string(j) +
                            " must be positive and finite");
    }
    if (counts[j] < 1) {
      throw InvalidArgument("grid count along axis " + std::to_string(j) +
                            " must be at least 1");
    }
    counts_[j] = counts[j];
    lengths_[j] = lengths[j];
    spacings_[j] = lengths[j] / counts[j];
  }
  strides_ = {1, static_cast<std::size_t>(counts_[0]),
              static_cast<std::size_t>(counts_[0]) * static_cast<std::size_t>(counts_[1])};
  num_cells_ = static_cast<std::size_t>(counts_[0]) * counts_[1] * counts_[2];
  cell_volume_ = 1.0;
  for (int j = 0; j < dim_; ++j) cell_volume_ *= spacings_[j];
}

double Grid::domain_volume() const noexcept {
  double v = 1.0;
  for (int j = 0; j < dim_; ++j) v *= lengths_[j];
  return v;
}

MultiIndex Grid::multi(std::size_t flat) const noexcept {
  MultiIndex index{};
  index[0] = static_cast<int>(flat % counts_[0]);
  flat /= counts_[0];
  index[1] = static_cast<int>(flat % counts_[1]);
  index[2] = static_cast<int>(flat / counts_[1]);
  return index;
}

bool Grid::contains(const MultiIndex& index) const noexcept {
  for (int j = 0; j < 3; ++j) {
    if (index[j] < 0 || index[j] >= counts_[j]) return false;
  }
  return true;
}

Point Grid::cell_center(const MultiIndex& index) const noexcept {
  Point p{0.0, 0.0, 0.0};
  // L * (k + 1/2) / N keeps box edges such as 0.25 on a 30-cell axis exact.
  for (int j = 0; j < dim_; ++j) p[j] = lengths_[j] * (index[j] + 0.5) / counts_[j];
  return p;
}

Point Grid::face_center(const FaceId& face) const noexcept {
  Point p = cell_center(face.cell);
  const int j = face.axis;
  const int k = face.side == Side::Minus ? face.cell[j] : face.cell[j] + 1;
  p[j] = lengths_[j] * k / counts_[j];
  return p;
}

bool Grid::is_boundary(const FaceId& face) const noexcept {
  return face.side == Side::Minus ? face.cell[face.axis] == 0
                                  : face.cell[face.axis] == counts_[face.axis] - 1;
}

FaceId Grid::canonical(const FaceId& face) const {
  if (face.axis < 0 || face.axis >= dim_ || !contains(face.cell)) {
    throw InvalidArgument("face does not belong to this grid");
  }
  if (face.side == Side::Plus || is_boundary(face)) return face;
  FaceId lower = face;
  lower.cell[face.axis] -= 1;
  lower.side = Side::Plus;
  return lower;
}

std::vector<FaceId> Grid::boundary_faces(int axis, Side side) const {
  if (axis < 0 || axis >= dim_) {
    throw InvalidArgument("axis " + std::to_string(axis) + " out of range for a " +
                          std::to_string(dim_) + "-d grid");
  }
  std::vector<FaceId> faces;
  faces.reserve(num_cells_ / counts_[axis]);
  const int fixed = side == Side::Minus ? 0 : counts_[axis] - 1;
  for (std::size_t c = 0; c < num_cells_; ++c) {
    MultiIndex index = multi(c);
    if (index[axis] != fixed) continue;
    faces.push_back(FaceId{index, axis, side});
  }
  return faces;
}

std::size_t Grid::num_interior_faces(int axis) const {
  if (axis < 0 || axis >= dim_) throw InvalidArgument("axis out of range");
  return num_cells_ / counts_[axis] * (counts_[axis] - 1);
}

}  // namespace pnp
