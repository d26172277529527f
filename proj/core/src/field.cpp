#include "pnp/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pnp/error.hpp"
#include "pnp/expression.hpp"

namespace pnp {

AnalyticField constant_field(double value) {
  return [value](const Point&, double) { return value; };
}

AnalyticField expression_field(const std::string& source) {
  Expression e = Expression::parse(source);
  return [e](const Point& p, double t) { return e(p, t); };
}

ScalarField::ScalarField(std::shared_ptr<const Grid> grid, double fill)
    : grid_(std::move(grid)), values_(grid_->num_cells(), fill) {}

ScalarField::ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->num_cells()) {
    throw InvalidArgument("field has " + std::to_string(values_.size()) +
                          " values for a grid of " + std::to_string(grid_->num_cells()) +
                          " cells");
  }
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField sample_initial(std::shared_ptr<const Grid> grid, const AnalyticField& field,
                           double t) {
  ScalarField out(grid);
  for (std::size_t c = 0; c < grid->num_cells(); ++c) {
    const double v = field(grid->cell_center(c), t);
    if (!std::isfinite(v)) {
      const MultiIndex m = grid->multi(c);
      std::ostringstream msg;
      msg << "non-finite sample " << v << " at cell (" << m[0] << ", " << m[1] << ", " << m[2]
          << ")";
      throw InvalidArgument(msg.str());
    }
    out[c] = v;
  }
  return out;
}

double face_value(const Grid& grid, const AnalyticField& field, const FaceId& face, double t) {
  const double v = field(grid.face_center(face), t);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "non-finite face value " << v << " on axis " << face.axis << " at cell ("
        << face.cell[0] << ", " << face.cell[1] << ", " << face.cell[2] << ")";
    throw InvalidArgument(msg.str());
  }
  return v;
}

std::vector<double> sample_plus_faces(const Grid& grid, const AnalyticField& field, int axis,
                                      double t) {
  std::vector<double> out(grid.num_cells());
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    out[c] = face_value(grid, field, FaceId{grid.multi(c), axis, Side::Plus}, t);
  }
  return out;
}

bool BoundarySpec::any_dirichlet(int dim) const {
  for (int j = 0; j < dim; ++j) {
    if (is_dirichlet(j, Side::Minus) || is_dirichlet(j, Side::Plus)) return true;
  }
  return false;
}

void BoundarySpec::set_dirichlet(int axis, Side side, AnalyticField potential,
                                 std::vector<AnalyticField> densities) {
  BoundaryCondition& bc = at(axis, side);
  bc.kind = BoundaryKind::Dirichlet;
  bc.potential = std::move(potential);
  bc.densities = std::move(densities);
}

}  // namespace pnp
