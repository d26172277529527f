#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pnp/grid.hpp"

namespace pnp {

/// A closed-form function of position and time.
using AnalyticField = std::function<double(const Point&, double)>;

AnalyticField constant_field(double value);

/// Compiles an expression string (see Expression) into an AnalyticField.
AnalyticField expression_field(const std::string& source);

/// One value per cell of a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const Grid> grid, double fill = 0.0);
  ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }

  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const;
  double max() const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

/// Midpoint ("central point") quadrature of `field` at time `t`: each cell
/// gets the value at its center. Throws if any sample is not finite.
ScalarField sample_initial(std::shared_ptr<const Grid> grid, const AnalyticField& field,
                           double t = 0.0);

/// Pointwise evaluation at the geometric center of `face`.
double face_value(const Grid& grid, const AnalyticField& field, const FaceId& face,
                  double t = 0.0);

/// Samples `field` at the center of every face normal to `axis` that lies on
/// the plus side of a cell. Entry c belongs to face (cell c, axis, Plus); the
/// entries of the last layer are boundary faces.
std::vector<double> sample_plus_faces(const Grid& grid, const AnalyticField& field, int axis,
                                      double t = 0.0);

enum class BoundaryKind { NoFlux, Dirichlet };

/// Condition on one boundary plane (axis, side).
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::NoFlux;
  AnalyticField potential;                 // phi^b(x, t), Dirichlet only
  std::vector<AnalyticField> densities;    // rho_i^b(x, t), one per species
};

/// Conditions for the 2d planes of the box. Unset planes are no-flux.
class BoundarySpec {
 public:
  BoundaryCondition& at(int axis, Side side) { return planes_[index(axis, side)]; }
  const BoundaryCondition& at(int axis, Side side) const { return planes_[index(axis, side)]; }

  bool is_dirichlet(int axis, Side side) const {
    return at(axis, side).kind == BoundaryKind::Dirichlet;
  }
  bool any_dirichlet(int dim) const;

  void set_dirichlet(int axis, Side side, AnalyticField potential,
                     std::vector<AnalyticField> densities);

 private:
  static std::size_t index(int axis, Side side) {
    return static_cast<std::size_t>(2 * axis + (side == Side::Plus ? 1 : 0));
  }
  std::array<BoundaryCondition, 6> planes_{};
};

struct SpeciesSpec {
  std::string name;
  double charge = 0.0;                       // q_i, signed
  AnalyticField diffusion = constant_field(1.0);
  AnalyticField chemical_potential = constant_field(0.0);  // static mu_i(x)
  AnalyticField initial = constant_field(0.0);
  AnalyticField source;                      // optional forcing f_i(x, t)
};

}  // namespace pnp
