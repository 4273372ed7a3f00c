#include "dentgame/cone.hpp"

#include <cmath>

namespace dentgame {

void ConeSystem::validate() const {
  N.validate();
  if (d != N.dim() || f.dim() != d)
    throw ConfigError("system: dimension mismatch between f and norm");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("system: epsilon must lie in (0,1)");
  if (std::abs(dual_norm(f, N) - 1.0) > 1e-9)
    throw ConfigError("system: f must have dual norm 1");
}

Polyhedron lambda_p(const ConeSystem& sys, double p) {
  // f(x) >= eps*max_v v(x) + p  <=>  (f - eps*v)(x) >= p for every dual vertex
  Polyhedron P(sys.d);
  for (const Fun& v : sys.N.dual) P.add({sys.f - sys.epsilon * v, p});
  return P;
}

double margin(const ConeSystem& sys, const Vec& x) {
  return evaluate(sys.f, x) - sys.epsilon * norm(x, sys.N);
}

int band_index(const ConeSystem& sys, const Vec& x) {
  double m = margin(sys, x);
  double r = std::round(m);
  if (std::abs(m - r) <= 1e-9) return (int)r;  // boundary joins the higher band
  return (int)std::floor(m);
}

}  // namespace dentgame
