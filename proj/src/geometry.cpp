#include "dentgame/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace dentgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(int a, int b) {
  if (a != b) throw DimensionMismatch("dimension mismatch");
}

std::vector<double> add_v(const std::vector<double>& a,
                          const std::vector<double>& b) {
  check_dim((int)a.size(), (int)b.size());
  std::vector<double> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

std::vector<double> sub_v(const std::vector<double>& a,
                          const std::vector<double>& b) {
  check_dim((int)a.size(), (int)b.size());
  std::vector<double> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

std::vector<double> scale_v(double s, const std::vector<double>& a) {
  std::vector<double> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// Dense tableau simplex for: maximize c^T z subject to A z <= b, z >= 0.
// Classic codebook formulation; deterministic throughout (entering variable
// by most negative reduced cost with index tie-break, ratio test tie broken
// by basis index).  Returns +inf when unbounded, -inf when infeasible.
struct Simplex {
  int m, n;
  std::vector<int> N, B;
  std::vector<std::vector<double>> D;
  static constexpr double eps = 1e-9;

  Simplex(const std::vector<std::vector<double>>& A,
          const std::vector<double>& b, const std::vector<double>& c)
      : m((int)b.size()),
        n((int)c.size()),
        N(n + 1),
        B(m),
        D(m + 2, std::vector<double>(n + 2)) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) D[i][j] = A[i][j];
    for (int i = 0; i < m; ++i) {
      B[i] = n + i;
      D[i][n] = -1;
      D[i][n + 1] = b[i];
    }
    for (int j = 0; j < n; ++j) {
      N[j] = j;
      D[m][j] = -c[j];
    }
    N[n] = -1;
    D[m + 1][n] = 1;
  }

  void pivot(int r, int s) {
    double* a = D[r].data();
    double inv = 1 / a[s];
    for (int i = 0; i < m + 2; ++i)
      if (i != r && std::abs(D[i][s]) > eps) {
        double* bb = D[i].data();
        double inv2 = bb[s] * inv;
        for (int j = 0; j < n + 2; ++j) bb[j] -= a[j] * inv2;
        bb[s] = a[s] * inv2;
      }
    for (int j = 0; j < n + 2; ++j)
      if (j != s) D[r][j] *= inv;
    for (int i = 0; i < m + 2; ++i)
      if (i != r) D[i][s] *= -inv;
    D[r][s] = inv;
    std::swap(B[r], N[s]);
  }

  bool simplex(int phase) {
    int x = m + phase - 1;
    for (;;) {
      int s = -1;
      for (int j = 0; j < n + 1; ++j) {
        if (N[j] == -phase) continue;
        if (s == -1 ||
            std::make_pair(D[x][j], N[j]) < std::make_pair(D[x][s], N[s]))
          s = j;
      }
      if (D[x][s] >= -eps) return true;
      int r = -1;
      for (int i = 0; i < m; ++i) {
        if (D[i][s] <= eps) continue;
        if (r == -1 || std::make_pair(D[i][n + 1] / D[i][s], B[i]) <
                           std::make_pair(D[r][n + 1] / D[r][s], B[r]))
          r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  double solve(std::vector<double>& x) {
    int r = 0;
    for (int i = 1; i < m; ++i)
      if (D[i][n + 1] < D[r][n + 1]) r = i;
    if (D[r][n + 1] < -eps) {
      pivot(r, n);
      if (!simplex(2) || D[m + 1][n + 1] < -eps) return -kInf;
      for (int i = 0; i < m; ++i)
        if (B[i] == -1) {
          int s = 0;
          for (int j = 1; j < n + 1; ++j)
            if (std::make_pair(D[i][j], N[j]) < std::make_pair(D[i][s], N[s]))
              s = j;
          pivot(i, s);
        }
    }
    bool ok = simplex(1);
    x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
      if (B[i] < n) x[B[i]] = D[i][n + 1];
    return ok ? D[m][n + 1] : kInf;
  }
};

// min g.x over {A x >= c}, x free, via the standard-form split x = u - w.
LpResult lp_min_raw(const Fun& g, const Polyhedron& P) {
  const int d = P.d;
  check_dim(g.dim(), d);
  const int m = (int)P.constraints.size();
  const int n = 2 * d;
  std::vector<std::vector<double>> A(m, std::vector<double>(n));
  std::vector<double> b(m), c(n);
  for (int i = 0; i < m; ++i) {
    const HalfSpace& h = P.constraints[i];
    check_dim(h.g.dim(), d);
    for (int j = 0; j < d; ++j) {
      A[i][j] = -h.g[j];
      A[i][d + j] = h.g[j];
    }
    b[i] = -h.c;
  }
  for (int j = 0; j < d; ++j) {
    c[j] = -g[j];
    c[d + j] = g[j];
  }
  std::vector<double> z;
  double obj = Simplex(A, b, c).solve(z);
  LpResult res;
  if (obj == -kInf) {
    res.status = LpStatus::Empty;
    return res;
  }
  if (obj == kInf) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.value = -obj;
  res.argmin = Vec::zero(d);
  for (int j = 0; j < d; ++j) res.argmin[j] = z[j] - z[d + j];
  return res;
}

}  // namespace

Vec operator+(const Vec& a, const Vec& b) { return Vec(add_v(a.c, b.c)); }
Vec operator-(const Vec& a, const Vec& b) { return Vec(sub_v(a.c, b.c)); }
Vec operator*(double s, const Vec& a) { return Vec(scale_v(s, a.c)); }
Fun operator+(const Fun& a, const Fun& b) { return Fun(add_v(a.a, b.a)); }
Fun operator-(const Fun& a, const Fun& b) { return Fun(sub_v(a.a, b.a)); }
Fun operator*(double s, const Fun& a) { return Fun(scale_v(s, a.a)); }

double norm(const Vec& x, const PolyhedralNorm& N) {
  double best = -kInf;
  for (const Fun& g : N.dual) best = std::max(best, evaluate(g, x));
  return best;
}

double dual_norm(const Fun& g, const PolyhedralNorm& N) {
  double best = -kInf;
  for (const Vec& v : N.primal) best = std::max(best, evaluate(g, v));
  return best;
}

void PolyhedralNorm::validate() const {
  if (primal.empty() || dual.empty())
    throw ConfigError("norm: empty vertex list");
  int d = primal.front().dim();
  auto has_neg = [d](const auto& list, const auto& v) {
    for (const auto& w : list) {
      double diff = 0;
      for (int i = 0; i < d; ++i) diff = std::max(diff, std::abs(v[i] + w[i]));
      if (diff <= 1e-12) return true;
    }
    return false;
  };
  for (const Vec& v : primal) {
    if (v.dim() != d) throw ConfigError("norm: ragged primal vertex list");
    if (!has_neg(primal, v)) throw ConfigError("norm: primal ball not symmetric");
  }
  for (const Fun& g : dual) {
    if (g.dim() != d) throw ConfigError("norm: ragged dual vertex list");
    if (!has_neg(dual, g)) throw ConfigError("norm: dual ball not symmetric");
  }
  // consistency: each primal vertex has unit norm as computed by the dual list
  for (const Vec& v : primal) {
    double nv = norm(v, *this);
    if (std::abs(nv - 1.0) > 1e-9)
      throw ConfigError("norm: primal/dual vertex lists inconsistent");
  }
  for (const Fun& g : dual) {
    double ng = dual_norm(g, *this);
    if (std::abs(ng - 1.0) > 1e-9)
      throw ConfigError("norm: dual vertices are not unit functionals");
  }
}

PolyhedralNorm PolyhedralNorm::l1(int d) {
  PolyhedralNorm N;
  for (int i = 0; i < d; ++i)
    for (double s : {1.0, -1.0}) {
      Vec v = Vec::zero(d);
      v[i] = s;
      N.primal.push_back(v);
    }
  // dual ball = sup-norm ball: all sign corners
  int corners = 1 << d;
  for (int mask = 0; mask < corners; ++mask) {
    Fun g = Fun::zero(d);
    for (int i = 0; i < d; ++i) g[i] = (mask >> i & 1) ? 1.0 : -1.0;
    N.dual.push_back(g);
  }
  return N;
}

PolyhedralNorm PolyhedralNorm::linf(int d) {
  PolyhedralNorm N;
  int corners = 1 << d;
  for (int mask = 0; mask < corners; ++mask) {
    Vec v = Vec::zero(d);
    for (int i = 0; i < d; ++i) v[i] = (mask >> i & 1) ? 1.0 : -1.0;
    N.primal.push_back(v);
  }
  for (int i = 0; i < d; ++i)
    for (double s : {1.0, -1.0}) {
      Fun g = Fun::zero(d);
      g[i] = s;
      N.dual.push_back(g);
    }
  return N;
}

Polyhedron Polyhedron::box(int d, double lo, double hi) {
  Polyhedron P(d);
  for (int i = 0; i < d; ++i) {
    Fun up = Fun::zero(d), dn = Fun::zero(d);
    up[i] = 1.0;
    dn[i] = -1.0;
    P.add({up, lo});
    P.add({dn, -hi});
  }
  return P;
}

Polyhedron intersect(const Polyhedron& P, const HalfSpace& H) {
  check_dim(H.g.dim(), P.d);
  Polyhedron Q = P;
  Q.add(H);
  return Q;
}

bool contains(const Polyhedron& P, const Vec& x, double tol) {
  check_dim(x.dim(), P.d);
  for (const HalfSpace& h : P.constraints)
    if (evaluate(h.g, x) < h.c - tol) return false;
  return true;
}

bool is_empty(const Polyhedron& P) {
  return lp_min_raw(Fun::zero(P.d), P).status == LpStatus::Empty;
}

bool is_bounded(const Polyhedron& P) {
  if (is_empty(P)) throw EmptySetError("is_bounded: empty polyhedron");
  // recession cone {r : A r >= 0}, probed inside a unit box in each +-
  // coordinate direction
  Polyhedron rec(P.d);
  for (const HalfSpace& h : P.constraints) rec.add({h.g, 0.0});
  for (const HalfSpace& h : Polyhedron::box(P.d, -1.0, 1.0).constraints)
    rec.add(h);
  for (int j = 0; j < P.d; ++j) {
    for (double s : {1.0, -1.0}) {
      Fun obj = Fun::zero(P.d);
      obj[j] = -s;  // maximize s * r_j
      LpResult r = lp_min_raw(obj, rec);
      if (r.status == LpStatus::Optimal && -r.value > 1e-7) return false;
    }
  }
  return true;
}

std::vector<Vec> vertices(const Polyhedron& P) {
  if (P.d < 1 || P.d > 3)
    throw Error("vertices: only dimensions 1..3 supported");
  if (!is_bounded(P)) throw UnboundedError("vertices: unbounded polyhedron");
  const int d = P.d;
  const int m = (int)P.constraints.size();
  std::vector<Vec> out;
  std::vector<int> idx(d);
  auto try_combo = [&](const std::vector<int>& sel) {
    // solve the d x d active system by Gaussian elimination
    std::vector<std::vector<double>> A(d, std::vector<double>(d + 1));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) A[i][j] = P.constraints[sel[i]].g[j];
      A[i][d] = P.constraints[sel[i]].c;
    }
    for (int col = 0; col < d; ++col) {
      int piv = col;
      for (int r = col + 1; r < d; ++r)
        if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
      if (std::abs(A[piv][col]) < 1e-11) return;
      std::swap(A[col], A[piv]);
      for (int r = 0; r < d; ++r) {
        if (r == col) continue;
        double f = A[r][col] / A[col][col];
        for (int j = col; j <= d; ++j) A[r][j] -= f * A[col][j];
      }
    }
    Vec x = Vec::zero(d);
    for (int i = 0; i < d; ++i) x[i] = A[i][d] / A[i][i];
    if (!contains(P, x, 1e-9)) return;
    for (const Vec& v : out) {
      double diff = 0;
      for (int i = 0; i < d; ++i) diff = std::max(diff, std::abs(v[i] - x[i]));
      if (diff <= 1e-9) return;
    }
    out.push_back(x);
  };
  if (d == 1) {
    for (int i = 0; i < m; ++i) try_combo({i});
  } else if (d == 2) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) try_combo({i, j});
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        for (int k = j + 1; k < m; ++k) try_combo({i, j, k});
  }
  std::sort(out.begin(), out.end(),
            [](const Vec& a, const Vec& b) { return a.c < b.c; });
  return out;
}

double diameter_of(const std::vector<Vec>& verts, const PolyhedralNorm& N) {
  double best = 0;
  for (size_t i = 0; i < verts.size(); ++i)
    for (size_t j = i + 1; j < verts.size(); ++j)
      best = std::max(best, norm(verts[i] - verts[j], N));
  return best;
}

double max_norm_of(const std::vector<Vec>& verts, const PolyhedralNorm& N) {
  double best = 0;
  for (const Vec& v : verts) best = std::max(best, norm(v, N));
  return best;
}

double diameter(const Polyhedron& P, const PolyhedralNorm& N) {
  return diameter_of(vertices(P), N);
}

double max_norm(const Polyhedron& P, const PolyhedralNorm& N) {
  return max_norm_of(vertices(P), N);
}

LpResult lp_min(const Fun& g, const Polyhedron& P) {
  LpResult base = lp_min_raw(g, P);
  if (base.status != LpStatus::Optimal) return base;
  // lexicographic tie-break: pin the optimal value, then minimize the
  // coordinates in order.  An unbounded optimal face keeps the raw argmin.
  Polyhedron Q = P;
  Q.add({(-1.0) * g, -(base.value + 1e-9)});
  Vec best = base.argmin;
  for (int i = 0; i < P.d; ++i) {
    Fun e = Fun::zero(P.d);
    e[i] = 1.0;
    LpResult r = lp_min_raw(e, Q);
    if (r.status != LpStatus::Optimal) return base;
    best = r.argmin;
    Fun ne = Fun::zero(P.d);
    ne[i] = -1.0;
    Q.add({ne, -(r.value + 1e-9)});
  }
  base.argmin = best;
  return base;
}

Separation separate_point(const Vec& x0, const Polyhedron& P,
                          const PolyhedralNorm& N) {
  check_dim(x0.dim(), P.d);
  const int d = P.d;
  const int m = (int)P.constraints.size();
  if (m == 0) throw NotSeparable("separate_point: full space");
  // Dual-multiplier LP: variables y >= 0, h = A^T y.  Maximize
  // c.y - h(x0) subject to h inside the dual unit ball.  By LP duality
  // c.y lower-bounds inf h over P, with equality at the optimum.
  std::vector<std::vector<double>> A(N.primal.size(), std::vector<double>(m));
  std::vector<double> b(N.primal.size(), 1.0), cobj(m);
  for (size_t r = 0; r < N.primal.size(); ++r)
    for (int i = 0; i < m; ++i)
      A[r][i] = evaluate(P.constraints[i].g, N.primal[r]);
  for (int i = 0; i < m; ++i)
    cobj[i] = P.constraints[i].c - evaluate(P.constraints[i].g, x0);
  std::vector<double> y;
  double obj = Simplex(A, b, cobj).solve(y);
  if (obj == -kInf) throw NotSeparable("separate_point: multiplier LP infeasible");
  if (obj == kInf) throw NotSeparable("separate_point: multiplier LP unbounded");
  if (obj <= 1e-9) throw NotSeparable("separate_point: x0 not separable from P");
  Fun h = Fun::zero(d);
  for (int i = 0; i < m; ++i)
    if (y[i] != 0.0) h = h + y[i] * P.constraints[i].g;
  double dn = dual_norm(h, N);
  if (dn <= 1e-12) throw NotSeparable("separate_point: degenerate separator");
  h = (1.0 / dn) * h;
  LpResult inf = lp_min(h, P);
  if (inf.status != LpStatus::Optimal)
    throw NotSeparable("separate_point: separator unbounded below on P");
  double gap = inf.value - evaluate(h, x0);
  if (gap <= 1e-9) throw NotSeparable("separate_point: zero gap after rescale");
  return {h, gap};
}

Vec interior_point(const Polyhedron& P) {
  const int d = P.d;
  const double W = 1e6;
  // lifted LP in (x, s): g_i.x - s >= c_i inside a large window
  Polyhedron Q(d + 1);
  for (const HalfSpace& h : P.constraints) {
    Fun row = Fun::zero(d + 1);
    for (int j = 0; j < d; ++j) row[j] = h.g[j];
    row[d] = -1.0;
    Q.add({row, h.c});
  }
  for (int j = 0; j < d; ++j) {
    Fun up = Fun::zero(d + 1), dn = Fun::zero(d + 1);
    up[j] = 1.0;
    dn[j] = -1.0;
    Q.add({up, -W});
    Q.add({dn, -W});
  }
  Fun obj = Fun::zero(d + 1);
  obj[d] = -1.0;  // maximize s
  LpResult r = lp_min(obj, Q);
  if (r.status != LpStatus::Optimal || -r.value <= 1e-9)
    throw EmptyInteriorError("interior_point: no interior");
  Vec x = Vec::zero(d);
  for (int j = 0; j < d; ++j) x[j] = r.argmin[j];
  return x;
}

Polyhedron reduce_bounded(const Polyhedron& P, std::vector<Vec>* verts_out) {
  std::vector<Vec> V = vertices(P);
  Polyhedron Q(P.d);
  for (const HalfSpace& h : P.constraints) {
    double slack = kInf;
    for (const Vec& v : V)
      slack = std::min(slack, evaluate(h.g, v) - h.c);
    if (slack <= 1e-7) Q.add(h);
  }
  if (verts_out) *verts_out = std::move(V);
  return Q;
}

}  // namespace dentgame
