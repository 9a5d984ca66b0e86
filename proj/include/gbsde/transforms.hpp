#pragma once

#include "gbsde/driver.hpp"
#include "gbsde/field.hpp"

namespace gbsde {

// Driver transformations between equation families. Inputs are never
// mutated; each result records the transformation in its lineage. Each
// transform has a solution push-forward mapping (Y, Z) fields accordingly.

/// Geometric -> ordinary: f(t,y,z) = f_geom(t, e^y, z) + |z|^2/2.
/// Push-forward: Y' = ln Y, Z' = Z.
DriverSpec gbsde_to_ordinary(const DriverSpec& geometric);

/// Ordinary -> geometric: f_geom(t,y,z) = f(t, ln y, z) - |z|^2/2.
DriverSpec ordinary_to_gbsde(const DriverSpec& ordinary);

/// Geometric -> LN-Q: g(t,y,z) = y * f_geom(t, y, z/y).
/// Push-forward: Y unchanged, Z' = Y * Z.
DriverSpec gbsde_to_lnq(const DriverSpec& geometric);

/// LN-Q -> ordinary quadratic: g'(t,y,z) = e^-y g(t, e^y, e^y z) + |z|^2/2.
/// The bundle's quadratic weight becomes delta + 1/2.
/// Push-forward: Y' = ln Y, Z' = Z/Y.
DriverSpec lnq_to_quadratic(const DriverSpec& lnq);

/// Inverse of lnq_to_quadratic: g(t,y,z) = y * (g'(t, ln y, z/y) - |z/y|^2/2).
DriverSpec quadratic_to_lnq(const DriverSpec& quadratic);

/// Two-driver -> LN-Q: g(t,y,v) = g1(t, y, g2_inverse(t, y, v)). Verifies by
/// sampling that g2_inverse round-trips g2 (tolerance 1e-9) and that
/// |g2(t,y,z)| >= K y |z|; the largest certified K and the reduced bundle
/// (alpha, beta, gamma/K, delta/K^2) are recorded on the result. Throws with
/// a witness point when a precondition fails.
DriverSpec twodriver_reduce(const DriverSpec& two_driver);

/// Generic two-driver form of a geometric driver: g1 = y*f(t,y,z), g2 = y*z,
/// K = 1, g2_inverse(v) = v/y. Reducing it recovers the LN-Q form.
DriverSpec two_driver_form(const DriverSpec& geometric);

// Solution push-forwards. Lattice and ensemble fields are both supported.
SolutionField push_gbsde_to_ordinary(const SolutionField& geometric_field);
SolutionField push_ordinary_to_gbsde(const SolutionField& ordinary_field);
SolutionField push_gbsde_to_lnq(const SolutionField& geometric_field);
SolutionField push_lnq_to_quadratic(const SolutionField& lnq_field);
SolutionField push_quadratic_to_lnq(const SolutionField& quadratic_field);

} // namespace gbsde
