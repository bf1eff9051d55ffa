#pragma once

#include "glt/rng.hpp"

namespace glt {

// Generalized inverse Gaussian with density ∝ y^{p-1} exp(-a y / 2 - b / (2 y)).
// a = 0 (p < 0) gives an inverted Gamma, b = 0 (p > 0) a Gamma.
double sample_gig(double p, double a, double b, Rng& rng);

// Unnormalized log density.
double gig_log_kernel(double y, double p, double a, double b);

// E[Y] for a, b > 0.
double gig_mean(double p, double a, double b);

}  // namespace glt
