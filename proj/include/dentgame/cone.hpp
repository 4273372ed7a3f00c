#pragma once
#include "dentgame/geometry.hpp"

namespace dentgame {

// The ambient data of one game instance: a unit functional f, a slope
// epsilon in (0,1), and the polyhedral norm.
struct ConeSystem {
  int d = 0;
  Fun f;
  double epsilon = 0.5;
  PolyhedralNorm N;

  void validate() const;  // dual_norm(f)==1, epsilon in (0,1); throws ConfigError
  ConeSystem with_epsilon(double eps) const {
    ConeSystem s = *this;
    s.epsilon = eps;
    return s;
  }
};

// Cone band set {x : f(x) >= epsilon*||x|| + p}, exact as an intersection of
// |dual vertices| half-spaces.
Polyhedron lambda_p(const ConeSystem& sys, double p);

double margin(const ConeSystem& sys, const Vec& x);  // f(x) - eps*||x||

// floor(margin), with margins within 1e-9 of an integer assigned to the
// higher band.
int band_index(const ConeSystem& sys, const Vec& x);

}  // namespace dentgame
