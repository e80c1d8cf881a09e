// Self-contained correctness checks runnable from the CLI: independent
// oracle routes (jump-operator dissipator, direct-commutator Liouville
// action) and the invariant suites for the propagators.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "flq/config.hpp"
#include "flq/liouville.hpp"

namespace flq::check {

// Dissipator assembled from jump operators |b><a| with rate relax(a,b),
// plus elementwise pure dephasing.  Independent of lindblad_apply.
CMatrix lindblad_jump_form(const RateMatrices& rates, const CMatrix& rho);

// Random density matrix (positive, unit trace) from a Ginibre draw.
CMatrix random_density_matrix(std::mt19937_64& rng, int dim = 4);

struct CheckResult {
    std::string name;
    bool passed = false;
    double metric = 0.0; // measured deviation
    double bound = 0.0;  // allowed deviation
    std::string detail;
};

// Runs the oracle-equivalence and invariant checks for the given
// configuration.  Numerical failures (NoConvergence, TraceDrift, ...)
// propagate as exceptions; a returned entry with passed=false means the
// computation ran but missed its bound.
std::vector<CheckResult> run_validation_suite(const RunConfig& cfg);

} // namespace flq::check
