#include "capdp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace capdp {

char role_code(Role r) {
  switch (r) {
    case Role::Interior: return 'I';
    case Role::Obstacle: return 'O';
    case Role::Exterior: return 'E';
    case Role::Dirichlet: return 'D';
  }
  return '?';
}

Role role_from_code(char c) {
  switch (c) {
    case 'I': return Role::Interior;
    case 'O': return Role::Obstacle;
    case 'E': return Role::Exterior;
    case 'D': return Role::Dirichlet;
  }
  throw ParseError(std::string("unknown role code '") + c + "'");
}

long DiscreteDomain::interior_count() const { return count(Role::Interior); }

long DiscreteDomain::count(Role r) const {
  long c = 0;
  for (Role x : roles)
    if (x == r) ++c;
  return c;
}

Idx3 DiscreteDomain::nearest_node(const Vec3& x) const {
  Idx3 i{0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    int v = static_cast<int>(std::lround((x[d] - origin[d]) / h));
    i[d] = std::clamp(v, 0, shape[d] - 1);
  }
  return i;
}

bool DiscreteDomain::operator==(const DiscreteDomain& other) const {
  return dim == other.dim && shape == other.shape && h == other.h && origin == other.origin &&
         roles == other.roles;
}

double ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return M_PI;
    case 3: return 4.0 * M_PI / 3.0;
  }
  throw InvalidShape("dimension must be 1..3");
}

double sphere_area(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    case 3: return 4.0 * M_PI;
  }
  throw InvalidShape("dimension must be 1..3");
}

namespace {

double norm2(const Vec3& a, const Vec3& b, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

double dist_to_segment(const Vec3& x, const Vec3& a, const Vec3& b, int dim) {
  double ab2 = 0, t = 0;
  for (int d = 0; d < dim; ++d) {
    ab2 += (b[d] - a[d]) * (b[d] - a[d]);
    t += (x[d] - a[d]) * (b[d] - a[d]);
  }
  if (ab2 > 0) t = std::clamp(t / ab2, 0.0, 1.0);
  Vec3 p = a;
  for (int d = 0; d < dim; ++d) p[d] = a[d] + t * (b[d] - a[d]);
  return norm2(x, p, dim);
}

int infer_dim(const ShapeSpec&) { return 0; }

// Marks every Interior node that is face-adjacent to an Exterior node as Dirichlet,
// so the zero boundary condition of the open set sits on grid nodes.
void mark_dirichlet_collar(DiscreteDomain& dom) {
  std::vector<long> collar;
  for (long k = 0; k < dom.node_count(); ++k) {
    if (dom.role(k) != Role::Interior) continue;
    Idx3 i = dom.unindex(k);
    bool hit = false;
    for (int d = 0; d < dom.dim && !hit; ++d) {
      for (int s = -1; s <= 1 && !hit; s += 2) {
        Idx3 j = i;
        j[d] += s;
        if (!dom.in_range(j) || dom.role(dom.index(j)) == Role::Exterior) hit = true;
      }
    }
    if (hit) collar.push_back(k);
  }
  for (long k : collar) dom.roles[static_cast<std::size_t>(k)] = Role::Dirichlet;
}

}  // namespace

DiscreteDomain make_shape(const ShapeSpec& spec, int resolution) {
  (void)infer_dim(spec);
  if (resolution < 8) throw InvalidShape("resolution must be at least 8 nodes per unit");
  throw InvalidShape("make_shape requires a dimensioned constructor; use the make_* helpers");
}

namespace {

DiscreteDomain raster(const ShapeSpec& spec, int dim, int resolution, const Vec3& lo,
                      const Vec3& hi) {
  if (resolution < 8) throw InvalidShape("resolution must be at least 8 nodes per unit");
  if (dim < 1 || dim > 3) throw InvalidShape("dimension must be 1..3");
  DiscreteDomain dom;
  dom.dim = dim;
  dom.h = 1.0 / resolution;
  for (int d = 0; d < dim; ++d) {
    dom.origin[d] = lo[d];
    dom.shape[d] = static_cast<int>(std::lround((hi[d] - lo[d]) / dom.h)) + 1;
    if (dom.shape[d] < 2) throw InvalidShape("degenerate bounding box");
  }
  dom.roles.assign(static_cast<std::size_t>(dom.node_count()), Role::Exterior);
  dom.analytic = spec;

  auto classify = [&](const Vec3& x) -> Role {
    switch (spec.kind) {
      case ShapeSpec::Kind::Ball:
        return norm2(x, spec.center, dim) < spec.r ? Role::Interior : Role::Exterior;
      case ShapeSpec::Kind::Annulus: {
        double rho = norm2(x, spec.center, dim);
        if (rho < spec.r_in) return Role::Obstacle;
        if (rho < spec.r_out) return Role::Interior;
        return Role::Exterior;
      }
      case ShapeSpec::Kind::Box:
        return Role::Interior;  // boundary handled below
      case ShapeSpec::Kind::BallMinusSegment: {
        if (norm2(x, spec.center, dim) >= spec.r) return Role::Exterior;
        if (dist_to_segment(x, spec.seg_a, spec.seg_b, dim) < 0.51 / resolution)
          return Role::Obstacle;
        return Role::Interior;
      }
      case ShapeSpec::Kind::BallMinusPointCluster: {
        if (norm2(x, spec.center, dim) >= spec.r) return Role::Exterior;
        for (const Vec3& p : spec.cluster)
          if (norm2(x, p, dim) < 0.51 / resolution) return Role::Obstacle;
        return Role::Interior;
      }
      case ShapeSpec::Kind::ComplementHalfspace:
        return x[spec.halfspace_axis] > spec.halfspace_plane ? Role::Interior : Role::Obstacle;
      case ShapeSpec::Kind::Custom:
        return Role::Exterior;
    }
    return Role::Exterior;
  };

  for (long k = 0; k < dom.node_count(); ++k)
    dom.roles[static_cast<std::size_t>(k)] = classify(dom.position(k));

  if (spec.kind == ShapeSpec::Kind::Box) {
    // Outermost ring carries the zero boundary condition.
    for (long k = 0; k < dom.node_count(); ++k) {
      Idx3 i = dom.unindex(k);
      for (int d = 0; d < dim; ++d)
        if (i[d] == 0 || i[d] == dom.shape[d] - 1)
          dom.roles[static_cast<std::size_t>(k)] = Role::Dirichlet;
    }
  } else {
    mark_dirichlet_collar(dom);
  }
  return dom;
}

}  // namespace

DiscreteDomain make_ball(const Vec3& center, double r, int resolution, int dim) {
  if (r <= 0) throw InvalidShape("ball radius must be positive");
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::Ball;
  s.center = center;
  s.r = r;
  double m = 2.0 / resolution;
  Vec3 lo{center[0] - r - m, center[1] - r - m, center[2] - r - m};
  Vec3 hi{center[0] + r + m, center[1] + r + m, center[2] + r + m};
  return raster(s, dim, resolution, lo, hi);
}

DiscreteDomain make_annulus(const Vec3& center, double r_in, double r_out, int resolution,
                            int dim) {
  if (r_in <= 0 || r_in >= r_out) throw InvalidShape("annulus requires 0 < r_in < r_out");
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::Annulus;
  s.center = center;
  s.r_in = r_in;
  s.r_out = r_out;
  double m = 2.0 / resolution;
  Vec3 lo{center[0] - r_out - m, center[1] - r_out - m, center[2] - r_out - m};
  Vec3 hi{center[0] + r_out + m, center[1] + r_out + m, center[2] + r_out + m};
  return raster(s, dim, resolution, lo, hi);
}

DiscreteDomain make_box(int resolution, int dim) {
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::Box;
  return raster(s, dim, resolution, Vec3{0, 0, 0}, Vec3{1, 1, 1});
}

DiscreteDomain make_ball_minus_segment(const Vec3& center, double r, const Vec3& a, const Vec3& b,
                                       int resolution, int dim) {
  if (r <= 0) throw InvalidShape("ball radius must be positive");
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::BallMinusSegment;
  s.center = center;
  s.r = r;
  s.seg_a = a;
  s.seg_b = b;
  double m = 2.0 / resolution;
  Vec3 lo{center[0] - r - m, center[1] - r - m, center[2] - r - m};
  Vec3 hi{center[0] + r + m, center[1] + r + m, center[2] + r + m};
  return raster(s, dim, resolution, lo, hi);
}

DiscreteDomain make_ball_minus_point_cluster(const Vec3& center, double r,
                                             const std::vector<Vec3>& cluster, int resolution,
                                             int dim) {
  if (r <= 0) throw InvalidShape("ball radius must be positive");
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::BallMinusPointCluster;
  s.center = center;
  s.r = r;
  s.cluster = cluster;
  double m = 2.0 / resolution;
  Vec3 lo{center[0] - r - m, center[1] - r - m, center[2] - r - m};
  Vec3 hi{center[0] + r + m, center[1] + r + m, center[2] + r + m};
  return raster(s, dim, resolution, lo, hi);
}

DiscreteDomain make_complement_halfspace(int axis, double plane, int resolution, int dim) {
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::ComplementHalfspace;
  s.halfspace_axis = axis;
  s.halfspace_plane = plane;
  Vec3 lo{plane - 1, -1, -1};
  Vec3 hi{plane + 1, 1, 1};
  for (int d = dim; d < 3; ++d) {
    lo[d] = 0;
    hi[d] = 0;
  }
  return raster(s, dim, resolution, lo, hi);
}

ScalarField distance_to_boundary(const DomainPtr& dom) {
  if (dom->interior_count() == 0) throw NoBoundary("domain has no interior nodes");
  bool has_boundary = false;
  for (long k = 0; k < dom->node_count(); ++k)
    if (dom->role(k) != Role::Interior) has_boundary = true;
  if (!has_boundary) throw NoBoundary("all-interior domain has no boundary");

  ScalarField d(dom, 0.0);
  const int n = dom->dim;

  if (dom->analytic && dom->analytic->kind != ShapeSpec::Kind::Custom) {
    const ShapeSpec& s = *dom->analytic;
    for (long k = 0; k < dom->node_count(); ++k) {
      if (dom->role(k) != Role::Interior) continue;
      Vec3 x = dom->position(k);
      double v = 0;
      switch (s.kind) {
        case ShapeSpec::Kind::Ball:
          v = s.r - norm2(x, s.center, n);
          break;
        case ShapeSpec::Kind::Annulus: {
          double rho = norm2(x, s.center, n);
          v = std::min(s.r_out - rho, rho - s.r_in);
          break;
        }
        case ShapeSpec::Kind::Box: {
          v = std::numeric_limits<double>::infinity();
          for (int a = 0; a < n; ++a) v = std::min({v, x[a], 1.0 - x[a]});
          break;
        }
        case ShapeSpec::Kind::BallMinusSegment:
          v = std::min(s.r - norm2(x, s.center, n), dist_to_segment(x, s.seg_a, s.seg_b, n));
          break;
        case ShapeSpec::Kind::BallMinusPointCluster: {
          v = s.r - norm2(x, s.center, n);
          for (const Vec3& p : s.cluster) v = std::min(v, norm2(x, p, n));
          break;
        }
        case ShapeSpec::Kind::ComplementHalfspace:
          v = x[s.halfspace_axis] - s.halfspace_plane;
          break;
        case ShapeSpec::Kind::Custom:
          break;
      }
      d[k] = std::max(v, 0.0);
    }
    return d;
  }

  // Multi-source Dijkstra over the full neighbor stencil with Euclidean edge weights.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(dom->node_count()), inf);
  using Item = std::pair<double, long>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (long k = 0; k < dom->node_count(); ++k) {
    if (dom->role(k) != Role::Interior) {
      dist[static_cast<std::size_t>(k)] = 0;
      heap.emplace(0.0, k);
    }
  }
  while (!heap.empty()) {
    auto [dk, k] = heap.top();
    heap.pop();
    if (dk > dist[static_cast<std::size_t>(k)]) continue;
    Idx3 i = dom->unindex(k);
    Idx3 off{0, 0, 0};
    int lim = (n >= 1 ? 1 : 0);
    for (off[0] = -lim; off[0] <= lim; ++off[0])
      for (off[1] = (n >= 2 ? -1 : 0); off[1] <= (n >= 2 ? 1 : 0); ++off[1])
        for (off[2] = (n >= 3 ? -1 : 0); off[2] <= (n >= 3 ? 1 : 0); ++off[2]) {
          if (off[0] == 0 && off[1] == 0 && off[2] == 0) continue;
          Idx3 j{i[0] + off[0], i[1] + off[1], i[2] + off[2]};
          if (!dom->in_range(j)) continue;
          double w = dom->h * std::sqrt(double(off[0] * off[0] + off[1] * off[1] + off[2] * off[2]));
          long kj = dom->index(j);
          if (dk + w < dist[static_cast<std::size_t>(kj)]) {
            dist[static_cast<std::size_t>(kj)] = dk + w;
            heap.emplace(dk + w, kj);
          }
        }
  }
  for (long k = 0; k < dom->node_count(); ++k)
    if (dom->role(k) == Role::Interior) d[k] = dist[static_cast<std::size_t>(k)];
  return d;
}

namespace {

// Chessboard (Chebyshev) distance, in grid units, to the nearest non-Interior node.
std::vector<int> chebyshev_boundary_distance(const DiscreteDomain& dom) {
  const int n = dom.dim;
  std::vector<int> D(static_cast<std::size_t>(dom.node_count()), -1);
  std::vector<long> frontier;
  for (long k = 0; k < dom.node_count(); ++k) {
    if (dom.role(k) != Role::Interior) {
      D[static_cast<std::size_t>(k)] = 0;
      frontier.push_back(k);
    }
  }
  int level = 0;
  while (!frontier.empty()) {
    ++level;
    std::vector<long> next;
    for (long k : frontier) {
      Idx3 i = dom.unindex(k);
      Idx3 off;
      for (off[0] = -1; off[0] <= 1; ++off[0])
        for (off[1] = (n >= 2 ? -1 : 0); off[1] <= (n >= 2 ? 1 : 0); ++off[1])
          for (off[2] = (n >= 3 ? -1 : 0); off[2] <= (n >= 3 ? 1 : 0); ++off[2]) {
            Idx3 j{i[0] + off[0], i[1] + off[1], i[2] + off[2]};
            if (!dom.in_range(j)) continue;
            long kj = dom.index(j);
            if (D[static_cast<std::size_t>(kj)] < 0) {
              D[static_cast<std::size_t>(kj)] = level;
              next.push_back(kj);
            }
          }
    }
    frontier.swap(next);
  }
  return D;
}

struct Sieve {
  const DiscreteDomain& dom;
  const std::vector<int>& D;
  WhitneyDecomposition out;

  // Returns (any interior, all in-cube nodes interior, min D over interior-relevant nodes).
  void visit(Idx3 corner, int size, int gen) {
    bool any_interior = false;
    bool all_interior = true;
    int dmin = std::numeric_limits<int>::max();
    Idx3 i;
    const int n = dom.dim;
    for (i[0] = corner[0]; i[0] < corner[0] + size; ++i[0])
      for (i[1] = corner[1]; i[1] < corner[1] + (n >= 2 ? size : 1); ++i[1])
        for (i[2] = corner[2]; i[2] < corner[2] + (n >= 3 ? size : 1); ++i[2]) {
          if (!dom.in_range(i)) {
            all_interior = false;
            continue;
          }
          long k = dom.index(i);
          if (dom.role(k) == Role::Interior) {
            any_interior = true;
            dmin = std::min(dmin, D[static_cast<std::size_t>(k)]);
          } else {
            all_interior = false;
          }
        }
    if (!any_interior) return;
    if (all_interior && dmin >= size) {
      WhitneyCube q;
      q.corner = corner;
      q.size = size;
      q.generation = gen;
      q.dist = dmin * dom.h;
      if (dmin > 4 * size)
        throw DecompositionFailure("Whitney sandwich violated at corner (" +
                                   std::to_string(corner[0]) + "," + std::to_string(corner[1]) +
                                   "," + std::to_string(corner[2]) + ")");
      out.cubes.push_back(q);
      return;
    }
    if (size == 1)
      throw DecompositionFailure(
          "resolution too coarse to certify the sandwich near node (" +
          std::to_string(corner[0]) + "," + std::to_string(corner[1]) + "," +
          std::to_string(corner[2]) + ")");
    int half = size / 2;
    Idx3 c;
    for (int b = 0; b < (1 << n); ++b) {
      c = corner;
      for (int d = 0; d < n; ++d)
        if (b & (1 << d)) c[d] += half;
      visit(c, half, gen - 1);
    }
  }
};

}  // namespace

WhitneyDecomposition whitney_decompose(const DiscreteDomain& dom) {
  if (dom.interior_count() == 0) throw DecompositionFailure("open set is empty");
  bool proper = false;
  for (long k = 0; k < dom.node_count(); ++k)
    if (dom.role(k) != Role::Interior) proper = true;
  if (!proper) throw DecompositionFailure("open set is not a proper subset of the grid");

  std::vector<int> D = chebyshev_boundary_distance(dom);
  int maxside = 1, gen = 0;
  int need = std::max({dom.shape[0], dom.shape[1], dom.shape[2]});
  while (maxside < need) {
    maxside *= 2;
    ++gen;
  }
  Sieve sieve{dom, D, {}};
  sieve.visit(Idx3{0, 0, 0}, maxside, gen);
  sieve.out.covered = true;
  return sieve.out;
}

std::pair<DiscreteDomain, CoordinateMap> rescale_to_unit(const DiscreteDomain& dom,
                                                         const Vec3& center, double r,
                                                         int resolution) {
  if (r <= 0) throw InvalidScale("rescale radius must be positive");
  CoordinateMap map{center, r};
  if (resolution == 0) resolution = std::max(8, static_cast<int>(std::lround(r / dom.h)));

  DiscreteDomain out;
  out.dim = dom.dim;
  out.h = 1.0 / resolution;
  double m = 2.0 * out.h;
  bool intersects = false;
  for (int d = 0; d < dom.dim; ++d) {
    out.origin[d] = -1 - m;
    out.shape[d] = static_cast<int>(std::lround(2 * (1 + m) / out.h)) + 1;
  }
  out.roles.assign(static_cast<std::size_t>(out.node_count()), Role::Exterior);
  for (long k = 0; k < out.node_count(); ++k) {
    Vec3 x = out.position(k);
    double rho = 0;
    for (int d = 0; d < dom.dim; ++d) rho += x[d] * x[d];
    if (std::sqrt(rho) >= 1) continue;
    Vec3 y = map.apply(x);
    bool inside = true;
    for (int d = 0; d < dom.dim; ++d)
      if (y[d] < dom.origin[d] - dom.h / 2 ||
          y[d] > dom.origin[d] + (dom.shape[d] - 1) * dom.h + dom.h / 2)
        inside = false;
    if (!inside) continue;
    intersects = true;
    out.roles[static_cast<std::size_t>(k)] = dom.role(dom.index(dom.nearest_node(y)));
  }
  if (!intersects) throw InvalidScale("ball does not intersect the domain box");
  mark_dirichlet_collar(out);
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::Custom;
  out.analytic = s;
  return {out, map};
}

std::vector<double> resample_through_map(const DiscreteDomain& src,
                                         const std::vector<double>& values,
                                         const DiscreteDomain& dst, const CoordinateMap& map) {
  std::vector<double> out(static_cast<std::size_t>(dst.node_count()), 0.0);
  for (long k = 0; k < dst.node_count(); ++k) {
    Vec3 y = map.apply(dst.position(k));
    out[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(src.index(src.nearest_node(y)))];
  }
  return out;
}

void save_mask(const DiscreteDomain& dom, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path + " for writing");
  f << "CAPGRID 1\n";
  f << "dim " << dom.dim << "\n";
  for (int d = 0; d < dom.dim; ++d) f << dom.shape[d] << (d + 1 < dom.dim ? " " : "");
  f << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", dom.h);
  f << "h " << buf << " origin";
  for (int d = 0; d < dom.dim; ++d) {
    std::snprintf(buf, sizeof(buf), "%.17g", dom.origin[d]);
    f << " " << buf;
  }
  f << "\n";
  long rows = dom.node_count() / dom.shape[0];
  for (long row = 0; row < rows; ++row) {
    for (int x = 0; x < dom.shape[0]; ++x)
      f << role_code(dom.role(row * dom.shape[0] + x));
    f << "\n";
  }
}

namespace {

std::string read_line(std::istream& f, int& lineno) {
  std::string line;
  if (!std::getline(f, line)) throw ParseError("unexpected end of file at line " + std::to_string(lineno));
  ++lineno;
  return line;
}

DiscreteDomain load_header(std::istream& f, int& lineno) {
  std::string line = read_line(f, lineno);
  if (line != "CAPGRID 1")
    throw ParseError("line 1: expected 'CAPGRID 1'");
  DiscreteDomain dom;
  {
    std::istringstream ss(read_line(f, lineno));
    std::string tag;
    ss >> tag >> dom.dim;
    if (tag != "dim" || dom.dim < 1 || dom.dim > 3)
      throw ParseError("line 2: expected 'dim n' with n in 1..3");
  }
  {
    std::istringstream ss(read_line(f, lineno));
    for (int d = 0; d < dom.dim; ++d)
      if (!(ss >> dom.shape[d]) || dom.shape[d] < 2)
        throw ParseError("line 3: bad node count");
  }
  {
    std::istringstream ss(read_line(f, lineno));
    std::string tag;
    ss >> tag >> dom.h;
    if (tag != "h" || !(dom.h > 0)) throw ParseError("line 4: expected 'h <decimal>'");
    ss >> tag;
    if (tag != "origin") throw ParseError("line 4: expected 'origin'");
    for (int d = 0; d < dom.dim; ++d)
      if (!(ss >> dom.origin[d])) throw ParseError("line 4: bad origin");
  }
  return dom;
}

}  // namespace

DiscreteDomain load_mask(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  int lineno = 0;
  DiscreteDomain dom = load_header(f, lineno);
  dom.roles.resize(static_cast<std::size_t>(dom.node_count()));
  long rows = dom.node_count() / dom.shape[0];
  for (long row = 0; row < rows; ++row) {
    std::string line = read_line(f, lineno);
    if (static_cast<long>(line.size()) < dom.shape[0])
      throw ParseError("line " + std::to_string(lineno) + ": truncated row");
    for (int x = 0; x < dom.shape[0]; ++x) {
      try {
        dom.roles[static_cast<std::size_t>(row * dom.shape[0] + x)] = role_from_code(line[static_cast<std::size_t>(x)]);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::Custom;
  dom.analytic = s;
  return dom;
}

void save_field(const ScalarField& field, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path + " for writing");
  const DiscreteDomain& dom = *field.dom;
  f << "CAPGRID 1\n";
  f << "dim " << dom.dim << "\n";
  for (int d = 0; d < dom.dim; ++d) f << dom.shape[d] << (d + 1 < dom.dim ? " " : "");
  f << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", dom.h);
  f << "h " << buf << " origin";
  for (int d = 0; d < dom.dim; ++d) {
    std::snprintf(buf, sizeof(buf), "%.17g", dom.origin[d]);
    f << " " << buf;
  }
  f << "\n";
  long rows = dom.node_count() / dom.shape[0];
  for (long row = 0; row < rows; ++row) {
    for (int x = 0; x < dom.shape[0]; ++x) {
      std::snprintf(buf, sizeof(buf), "%.17g", field[row * dom.shape[0] + x]);
      f << (x ? " " : "") << buf;
    }
    f << "\n";
  }
}

ScalarField load_field(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  int lineno = 0;
  DiscreteDomain dom = load_header(f, lineno);
  dom.roles.assign(static_cast<std::size_t>(dom.node_count()), Role::Interior);
  auto domp = std::make_shared<DiscreteDomain>(std::move(dom));
  ScalarField field(domp);
  long rows = domp->node_count() / domp->shape[0];
  for (long row = 0; row < rows; ++row) {
    std::istringstream ss(read_line(f, lineno));
    for (int x = 0; x < domp->shape[0]; ++x)
      if (!(ss >> field[row * domp->shape[0] + x]))
        throw ParseError("line " + std::to_string(lineno) + ": bad value");
  }
  return field;
}

}  // namespace capdp
