#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msdg/mesh.hpp"

namespace msdg {

enum class CoefKind { AnalyticPeriodic, Constant, Layered, Grid, Lognormal };

// Scalar coefficient a(x) > 0.  Grid and lognormal kinds hold piecewise
// constant cell values over an axis-aligned bounding box; the others are
// closed-form.  eval_unit treats the field as 1-periodic for cell problems.
struct CoefficientField {
  CoefKind kind = CoefKind::Constant;
  double eps = 0;        // oscillation period of the analytic kinds
  double value = 1;      // constant kind
  int n = 0;             // grid cells per axis
  Vec2 bb0{0, 0}, bb1{1, 1};
  std::vector<double> cells;  // row-major, index j*n + i
  double sigma2 = 0, l1 = 0, l2 = 0;
  uint64_t seed = 0;
  double lambda_min = 0, lambda_max = 0;  // filled by estimate_ellipticity

  double eval(Vec2 p) const;
  double eval_unit(Vec2 y) const;
};

CoefficientField make_periodic_field(double eps);
CoefficientField make_constant_field(double v);
CoefficientField make_layered_field(double eps);
CoefficientField make_grid_field(int n, std::vector<double> cells, Vec2 bb0, Vec2 bb1);
CoefficientField make_lognormal_field(double sigma2, double l1, double l2, uint64_t seed,
                                      int n, Vec2 bb0, Vec2 bb1);

// mean over cells whose centers fall in the ellipse of semi-axes (l1,l2)
// around each cell center; cells beyond the grid are left out of the mean
std::vector<double> ellipse_mean_smooth(const std::vector<double>& z, int n, double h,
                                        double l1, double l2);

// min/max sampled on a lattice (exact over cells for grid-backed kinds);
// stores the result on the field and returns {min,max}
std::pair<double, double> estimate_ellipticity(CoefficientField& f, int samples = 1 << 20);

std::string field_signature(const CoefficientField& f);
std::string dump_grid_field_text(const CoefficientField& f);
CoefficientField load_grid_field_text(const std::string& text, Vec2 bb0, Vec2 bb1);

}  // namespace msdg
