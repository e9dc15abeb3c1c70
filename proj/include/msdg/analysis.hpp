#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msdg/coefficient.hpp"
#include "msdg/dg.hpp"
#include "msdg/fem.hpp"
#include "msdg/mesh.hpp"
#include "msdg/msbasis.hpp"

namespace msdg {

// element-broken function: fine nodal values per coarse element, in the slot
// order of CoarseFineMap::nodes_of
struct BrokenFine {
  const CoarseFineMap* cf = nullptr;
  std::vector<std::vector<double>> vals;
};

BrokenFine expand_dg(const DGSpace& sp, const std::vector<double>& coeffs);
// nodal coefficients (one per coarse node) through the element basis
BrokenFine expand_nodal(const TriMesh& coarse, const CoarseFineMap& cf,
                        const std::vector<ElementBasis>& basis,
                        const std::vector<double>& nodal);
// coarse P1 nodal values interpolated at the fine nodes
BrokenFine expand_coarse_p1(const TriMesh& coarse, const CoarseFineMap& cf,
                            const std::vector<double>& coarse_nodal);
// restriction of a fine nodal vector (continuous functions)
BrokenFine restrict_fine(const CoarseFineMap& cf, const std::vector<double>& fine_nodal);

struct ErrorReport {
  std::string method;
  double h = 0;
  double eps_or_seed = 0;
  double beta = 0, gamma0 = 0;
  std::string rho_mode;
  double factor = 0;
  double err_l2 = 0, err_linf = 0, err_energy = 0;
  double t_assemble = 0, t_solve = 0;
  bool failed = false;
  double residual = 0;  // achieved solver residual, for failure reporting
};

// relative L2 / Linf / broken a-weighted H1 errors against a fine reference
void relative_errors(const CoefficientField& a, const BrokenFine& uh,
                     const std::vector<double>& ue_fine, ErrorReport& out);

// ||v||_{1,h}^2 = sum_K int_K a |grad v|^2 + ||v||_{L2}^2
double broken_energy_norm(const CoefficientField& a, const BrokenFine& v);

BrokenFine broken_diff(const BrokenFine& x, const BrokenFine& y);

struct DGNormParts {
  double grad2 = 0, flux2 = 0, jump2 = 0;
  double total() const;
};

// HOmega penalizes jumps of the P1 shadow, E the raw multiscale jumps
enum class DGNormKind { HOmega, E };

DGNormParts dg_norm_parts(const DGSpace& sp, const CoefficientField& a, const PenaltyConfig& pc,
                          const std::vector<double>& coeffs, DGNormKind kind);
double dg_norm(const DGSpace& sp, const CoefficientField& a, const PenaltyConfig& pc,
               const std::vector<double>& coeffs, DGNormKind kind);

// distance functional between a fine reference and a DG solution: broken
// gradient term, flux-average term, and jumps of (u_ref - Pi u_h)
DGNormParts error_functional_parts(const DGSpace& sp, const CoefficientField& a,
                                   const PenaltyConfig& pc, const std::vector<double>& ue_fine,
                                   const std::vector<double>& coeffs);
double error_functional(const DGSpace& sp, const CoefficientField& a, const PenaltyConfig& pc,
                        const std::vector<double>& ue_fine, const std::vector<double>& coeffs);

struct CoercivityResult {
  double min_quotient = 0;
  int trials = 0;
};

// min over random v of a_h(v,v) / ||v||_{h,Omega}^2 for the projected form
CoercivityResult coercivity_probe(const DGSpace& sp, const CoefficientField& a,
                                  const PenaltyConfig& pc, int trials, uint64_t seed);

// plain H1 norm of a fine nodal function
double h1_norm(const TriMesh& mesh, const std::vector<double>& w);

}  // namespace msdg
