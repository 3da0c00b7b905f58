#pragma once

// Radial Neumann eigenvalues of -Delta_p through the decoupled phase
//
//   vartheta' = r^{N-1} [ (p-1)|sin_p vartheta|^{p'} / r^{(N-1)p'}
//                         + lambda |cos_p vartheta|^p ],   vartheta(0) = pi_p.
//
// vartheta_lambda(R) increases strictly with lambda, and lambda_k is the
// value with vartheta_lambda(R) = k pi_p.

#include <Eigen/Core>

#include "plap/config.hpp"
#include "plap/radial_system.hpp"

namespace plap {

struct EigenResult {
  int k = 1;
  double lambda = 0;
  double angle_residual = 0;  // |vartheta_lambda(R) - k pi_p|
};

// vartheta_lambda at the outer radius; lambda >= 0.
double eigen_angle(double lambda, const Geometry& geom, const SolverConfig& cfg);

// k-th radial eigenvalue, k >= 1. Throws SearchError when no bracket exists
// below cfg.lambda_max * R^{-p}.
EigenResult eigenvalue(int k, const Geometry& geom, const SolverConfig& cfg);

// Eigenfunction with phi(0) = -1, integrated in Cartesian form
//   phi' = phi_{p'}(psi / r^{N-1}),  psi' = -lambda r^{N-1} phi_p(phi).
struct Eigenfunction {
  Eigen::VectorXd r;
  Eigen::VectorXd phi;
  Eigen::VectorXd psi;
};

Eigenfunction eigenfunction(double lambda, const Geometry& geom, const SolverConfig& cfg);

}  // namespace plap
