#pragma once

#include <string>
#include <vector>

#include "msdg/coefficient.hpp"
#include "msdg/mesh.hpp"
#include "msdg/msbasis.hpp"

namespace msdg {

// lattice-sampled heat maps as standalone SVG documents
std::string render_field_svg(const CoefficientField& a, Vec2 bb0, Vec2 bb1, int samples = 256);
std::string render_nodal_svg(const TriMesh& mesh, const std::vector<double>& vals,
                             int samples = 256);
// one multiscale function over its element, zero elsewhere on the fine mesh
std::string render_basis_svg(const TriMesh& fine, const CoarseFineMap& cf, const ElementBasis& b,
                             int slot, int samples = 256);

}  // namespace msdg
