#pragma once

#include "fbeuler/polynomial.hpp"
#include "fbeuler/surface_mesh.hpp"

namespace fbeuler {

/// Real orthonormal spherical harmonic Y_lm evaluated at the direction of x
/// (x is normalized internally), l <= 4, -l <= m <= l.
double real_sph_harmonic(int l, int m, const Vec3& x);

/// The homogeneous harmonic polynomial r^l Y_lm.
const Polynomial& solid_harmonic_poly(int l, int m);

/// Solid harmonic r^l Y_lm(x^) — the harmonic polynomial whose restriction
/// to the unit sphere is Y_lm. Defined for all x including the origin.
double solid_harmonic(int l, int m, const Vec3& x);

/// Gradient of the solid harmonic (analytic, via central differences of the
/// closed form would lose digits; this is exact).
Vec3 solid_harmonic_gradient(int l, int m, const Vec3& x);

} // namespace fbeuler
