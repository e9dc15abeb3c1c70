#pragma once

#include <string>
#include <vector>

#include "msdg/analysis.hpp"
#include "msdg/config.hpp"
#include "msdg/coefficient.hpp"
#include "msdg/fem.hpp"
#include "msdg/mesh.hpp"
#include "msdg/msbasis.hpp"

namespace msdg {

struct RunOutputs {
  std::vector<ErrorReport> rows;
  std::string csv;
  double dtilde_min = -1, dtilde_max = -1;  // effective separation of the oversampled basis
  bool any_failed = false;
};

RunOutputs run_experiment(const RunConfig& cfg);

struct SweepSpec {
  std::string param;  // gamma0 | h | delta0
  std::vector<double> values;
};

RunOutputs run_sweep(const RunConfig& base, const SweepSpec& sweep);

// reentrant-corner study: l-shape domain with the singular trace as data
RunOutputs run_lshape(RunConfig cfg);

ScalarFn corner_singular_fn();
ScalarFn boundary_fn(const RunConfig& cfg);
CoefficientField build_field(const RunConfig& cfg);

// fine reference values, cached per process on the run signature
const std::vector<double>& cached_reference(const RunConfig& cfg, const TriMesh& fine,
                                            const CoefficientField& field);
void clear_reference_cache();

void write_text_file(const std::string& path, const std::string& content);

}  // namespace msdg
