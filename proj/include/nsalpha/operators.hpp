#pragma once

#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

/// Exponent of the Helmholtz symbol (1 + alpha^2 lambda_k)^e.
enum class FilterExponent { minus_one, minus_half, plus_half, plus_one };

/// Eigenvalue of the Stokes operator A = -Laplacian at a nonzero retained wavevector.
double stokes_eigenvalue(const BoxSpec& box, const Wavevector& k);

/// Leray-Helmholtz projection, mode by mode: c <- c - (khat.c) khat.
SpectralField leray_project(const SpectralField& g);

/// Multiply every mode by (1 + alpha^2 lambda_k)^exponent. alpha = 0 is an exact identity.
SpectralField helmholtz_filter(const SpectralField& v, double alpha, FilterExponent exponent);

/// A u
SpectralField stokes_apply(const SpectralField& u);
/// A^{-1} g (A is invertible on zero-mean fields)
SpectralField stokes_inverse(const SpectralField& g);

/// L^2 inner product with the integral convention (includes the box volume).
double inner_product(const SpectralField& u, const SpectralField& v);
double norm_h(const SpectralField& u);
/// ||u|| = |grad u|
double norm_v(const SpectralField& u);
/// ||g||_{D(A)'} = |A^{-1} g|
double norm_dadual(const SpectralField& g);
/// Squared norms, avoiding a square root in quadrature loops.
double norm_h2(const SpectralField& u);
double norm_v2(const SpectralField& u);
double norm_dadual2(const SpectralField& g);

/// B(u,v) = P[(u.grad) v], pseudo-spectral with 2/3-rule dealiasing.
SpectralField nonlinear_b(const SpectralField& u, const SpectralField& v);

/// B~(u,v) = P[u x (curl v)], pseudo-spectral with 2/3-rule dealiasing.
SpectralField nonlinear_btilde(const SpectralField& u, const SpectralField& v);

/// Advection in rotational form, P[(curl v) x u] = -B~(u,v).
/// With v = u this equals B(u,u) on the dealiased Galerkin space.
SpectralField advection(const SpectralField& u, const SpectralField& v);

}  // namespace nsalpha
