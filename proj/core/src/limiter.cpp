#include "pnp/limiter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pnp/error.hpp"

namespace pnp {

LimiterPatch grow_patch(const ScalarField& field, std::size_t beta) {
  const Grid& g = field.grid();
  const double vol = g.cell_volume();
  const MultiIndex center = g.multi(beta);

  LimiterPatch patch;
  patch.center = beta;
  patch.cells.push_back(beta);
  std::vector<char> member(g.num_cells(), 0);
  member[beta] = 1;
  double sum = vol * field[beta];

  int max_radius = 0;
  for (int j = 0; j < g.dim(); ++j) max_radius = std::max(max_radius, g.count(j) - 1);

  for (int p = 1;; ++p) {
    MultiIndex lo{0, 0, 0}, hi{0, 0, 0};
    for (int j = 0; j < g.dim(); ++j) {
      lo[j] = std::max(0, center[j] - p);
      hi[j] = std::min(g.count(j) - 1, center[j] + p);
    }
    for (int k = lo[2]; k <= hi[2]; ++k) {
      for (int jj = lo[1]; jj <= hi[1]; ++jj) {
        for (int i = lo[0]; i <= hi[0]; ++i) {
          const std::size_t c = g.flat({i, jj, k});
          if (member[c] || field[c] == 0.0) continue;
          member[c] = 1;
          patch.cells.push_back(c);
          sum += vol * field[c];
        }
      }
    }
    patch.radius = p;
    patch.average = sum / static_cast<double>(patch.cells.size());
    if (patch.average > 0.0) break;
    if (p >= max_radius) {
      std::ostringstream msg;
      msg << "limiter: no neighbourhood of cell " << beta
          << " has positive mass; the total mass must be positive";
      throw InvalidArgument(msg.str());
    }
  }

  patch.min_mass = vol * field[beta];
  for (std::size_t c : patch.cells) patch.min_mass = std::min(patch.min_mass, vol * field[c]);
  patch.theta = std::min(1.0, patch.average / (patch.average - patch.min_mass));
  return patch;
}

void apply_patch(ScalarField& field, LimiterPatch& patch) {
  const double vol = field.grid().cell_volume();
  const double theta = patch.theta;
  if (theta >= 1.0) return;
  const double target = patch.average / vol;
  const double scale = std::max(std::abs(patch.min_mass), patch.average) / vol;
  for (std::size_t c : patch.cells) {
    double v = theta * field[c] + (1.0 - theta) * target;
    if (vol * field[c] == patch.min_mass) v = 0.0;  // the minimum maps to 0 exactly
    if (v < 0.0) {
      if (v < -1e-13 * scale) throw Error("limiter produced a negative value");
      v = 0.0;
    }
    field[c] = v;
  }
}

LimiterResult apply_limiter(const ScalarField& field) {
  LimiterResult out{field, {}};
  double total = 0.0;
  for (double v : field.values()) total += v;
  bool any_negative = false;
  for (double v : field.values()) any_negative = any_negative || v < 0.0;
  if (!any_negative) return out;
  if (!(total > 0.0)) throw InvalidArgument("limiter requires positive total mass");

  for (bool dirty = true; dirty;) {
    dirty = false;
    for (std::size_t c = 0; c < out.field.size(); ++c) {
      if (out.field[c] >= 0.0) continue;
      LimiterPatch patch = grow_patch(out.field, c);
      apply_patch(out.field, patch);
      out.patches.push_back(std::move(patch));
      dirty = true;
    }
  }
  return out;
}

}  // namespace pnp
