#pragma once
#include <vector>

#include "dentgame/errors.hpp"

namespace dentgame {

// Points live in R^d, functionals in the dual. Both are stored as plain
// coordinate vectors; the distinction is kept at the type level because the
// two sides carry different norms.
struct Vec {
  std::vector<double> c;

  Vec() = default;
  explicit Vec(std::vector<double> coords) : c(std::move(coords)) {}
  static Vec zero(int d) { return Vec(std::vector<double>(d, 0.0)); }

  int dim() const { return static_cast<int>(c.size()); }
  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  bool operator==(const Vec&) const = default;
};

struct Fun {
  std::vector<double> a;

  Fun() = default;
  explicit Fun(std::vector<double> coeffs) : a(std::move(coeffs)) {}
  static Fun zero(int d) { return Fun(std::vector<double>(d, 0.0)); }

  int dim() const { return static_cast<int>(a.size()); }
  double& operator[](int i) { return a[i]; }
  double operator[](int i) const { return a[i]; }
  bool operator==(const Fun&) const = default;
};

inline double evaluate(const Fun& g, const Vec& x) {
  const size_t n = g.a.size();
  if (n != x.c.size()) throw DimensionMismatch("dimension mismatch");
  const double* ga = g.a.data();
  const double* xc = x.c.data();
  double s = 0;
  for (size_t i = 0; i < n; ++i) s += ga[i] * xc[i];
  return s;
}

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
Fun operator+(const Fun& a, const Fun& b);
Fun operator-(const Fun& a, const Fun& b);
Fun operator*(double s, const Fun& a);

// A norm given by the vertex lists of its unit ball and of the dual unit
// ball.  norm(x) is evaluated by support over the dual vertices, dual_norm(g)
// by support over the primal vertices.
struct PolyhedralNorm {
  std::vector<Vec> primal;  // vertices of the unit ball
  std::vector<Fun> dual;    // vertices of the dual unit ball

  int dim() const { return primal.empty() ? 0 : primal.front().dim(); }
  void validate() const;  // symmetry + consistency; throws ConfigError

  static PolyhedralNorm l1(int d);
  static PolyhedralNorm linf(int d);
};

double norm(const Vec& x, const PolyhedralNorm& N);
double dual_norm(const Fun& g, const PolyhedralNorm& N);

enum class Sense { AtLeast, StrictlyLess };

// Half-space {x : g(x) >= c}.  Sense::StrictlyLess marks cuts whose removed
// piece was the open slice {g < c}; numerically all constraints are handled
// in closed form.
struct HalfSpace {
  Fun g;
  double c = 0.0;
  Sense sense = Sense::AtLeast;
};

struct Polyhedron {
  int d = 0;
  std::vector<HalfSpace> constraints;

  Polyhedron() = default;
  explicit Polyhedron(int dim) : d(dim) {}
  static Polyhedron box(int d, double lo, double hi);
  void add(HalfSpace h) { constraints.push_back(std::move(h)); }
};

Polyhedron intersect(const Polyhedron& P, const HalfSpace& H);
bool contains(const Polyhedron& P, const Vec& x, double tol = 1e-9);

// Vertex enumeration by active-set combinations (d <= 3).  Deduplicated at
// 1e-9 and sorted lexicographically.  Throws UnboundedError / EmptySetError.
std::vector<Vec> vertices(const Polyhedron& P);

bool is_empty(const Polyhedron& P);
bool is_bounded(const Polyhedron& P);  // throws EmptySetError if empty

double diameter(const Polyhedron& P, const PolyhedralNorm& N);
double max_norm(const Polyhedron& P, const PolyhedralNorm& N);
double diameter_of(const std::vector<Vec>& verts, const PolyhedralNorm& N);
double max_norm_of(const std::vector<Vec>& verts, const PolyhedralNorm& N);

enum class LpStatus { Optimal, Unbounded, Empty };

struct LpResult {
  LpStatus status = LpStatus::Empty;
  double value = 0.0;
  Vec argmin;
};

// Deterministic simplex; among optimal points the lexicographically smallest
// is returned (when the optimal face is bounded).
LpResult lp_min(const Fun& g, const Polyhedron& P);

struct Separation {
  Fun h;       // dual_norm(h) == 1
  double gap;  // h(x0) + gap == inf h over P
};

// Strictly separating functional for x0 from a (possibly unbounded)
// polyhedron, maximizing the gap over the dual unit ball.
Separation separate_point(const Vec& x0, const Polyhedron& P,
                          const PolyhedralNorm& N);

// Point maximizing the minimum constraint slack (within a large bounded
// window); throws EmptyInteriorError when the max slack is ~0.
Vec interior_point(const Polyhedron& P);

// Drops constraints slack at every vertex of a bounded polyhedron.  If
// verts_out is non-null it receives the vertex list.
Polyhedron reduce_bounded(const Polyhedron& P, std::vector<Vec>* verts_out);

}  // namespace dentgame
