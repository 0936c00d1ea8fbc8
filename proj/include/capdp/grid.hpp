#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace capdp {

using Vec3 = std::array<double, 3>;
using Idx3 = std::array<int, 3>;

enum class Role : std::uint8_t { Interior = 0, Obstacle = 1, Exterior = 2, Dirichlet = 3 };

char role_code(Role r);
Role role_from_code(char c);

struct InvalidShape : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidScale : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyRegion : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DecompositionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Analytic description of the shape a domain was rasterized from.
/// Kept so that boundary distances can use closed forms instead of Dijkstra.
struct ShapeSpec {
  enum class Kind {
    Ball,
    Annulus,
    Box,
    BallMinusSegment,
    BallMinusPointCluster,
    ComplementHalfspace,
    Custom
  };
  Kind kind = Kind::Custom;
  Vec3 center{0, 0, 0};
  double r = 0;
  double r_in = 0;
  double r_out = 0;
  Vec3 seg_a{0, 0, 0};
  Vec3 seg_b{0, 0, 0};
  std::vector<Vec3> cluster;
  int halfspace_axis = 0;
  double halfspace_plane = 0;
};

/// Regular grid over a box with per-node role codes.
/// Immutable after construction; safe to share across threads.
class DiscreteDomain {
 public:
  int dim = 2;
  Idx3 shape{1, 1, 1};  // unused axes hold 1
  double h = 0;
  Vec3 origin{0, 0, 0};
  std::vector<Role> roles;
  std::optional<ShapeSpec> analytic;

  long node_count() const { return static_cast<long>(shape[0]) * shape[1] * shape[2]; }

  long index(const Idx3& i) const {
    return (static_cast<long>(i[2]) * shape[1] + i[1]) * shape[0] + i[0];
  }
  Idx3 unindex(long k) const {
    Idx3 i;
    i[0] = static_cast<int>(k % shape[0]);
    i[1] = static_cast<int>((k / shape[0]) % shape[1]);
    i[2] = static_cast<int>(k / (static_cast<long>(shape[0]) * shape[1]));
    return i;
  }
  bool in_range(const Idx3& i) const {
    for (int d = 0; d < 3; ++d)
      if (i[d] < 0 || i[d] >= shape[d]) return false;
    return true;
  }
  Vec3 position(const Idx3& i) const {
    return {origin[0] + i[0] * h, origin[1] + i[1] * h, origin[2] + i[2] * h};
  }
  Vec3 position(long k) const { return position(unindex(k)); }
  Role role(long k) const { return roles[static_cast<std::size_t>(k)]; }

  long interior_count() const;
  long count(Role r) const;
  Idx3 nearest_node(const Vec3& x) const;

  bool operator==(const DiscreteDomain& other) const;
};

using DomainPtr = std::shared_ptr<const DiscreteDomain>;

/// Node-indexed real values on a DiscreteDomain.
struct ScalarField {
  DomainPtr dom;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(DomainPtr d, double fill = 0.0)
      : dom(std::move(d)), values(static_cast<std::size_t>(dom->node_count()), fill) {}

  double& operator[](long k) { return values[static_cast<std::size_t>(k)]; }
  double operator[](long k) const { return values[static_cast<std::size_t>(k)]; }
};

/// Dyadic cube of the Whitney decomposition, in node-index units.
/// A cube of size s at corner c covers the half-open node block [c, c+s)^dim.
struct WhitneyCube {
  Idx3 corner{0, 0, 0};
  int size = 1;        // side in nodes, a power of two
  int generation = 0;  // size == 2^generation
  double dist = 0;     // Chebyshev distance of the cube's nodes to the boundary, length units
};

struct WhitneyDecomposition {
  std::vector<WhitneyCube> cubes;
  bool covered = false;
  double diam(const WhitneyCube& q, double h) const { return q.size * h; }
};

DiscreteDomain make_shape(const ShapeSpec& spec, int resolution);

// Convenience constructors for the library shapes.
DiscreteDomain make_ball(const Vec3& center, double r, int resolution, int dim = 2);
DiscreteDomain make_annulus(const Vec3& center, double r_in, double r_out, int resolution,
                            int dim = 2);
DiscreteDomain make_box(int resolution, int dim = 2);
DiscreteDomain make_ball_minus_segment(const Vec3& center, double r, const Vec3& a, const Vec3& b,
                                       int resolution, int dim = 2);
DiscreteDomain make_ball_minus_point_cluster(const Vec3& center, double r,
                                             const std::vector<Vec3>& cluster, int resolution,
                                             int dim = 2);
DiscreteDomain make_complement_halfspace(int axis, double plane, int resolution, int dim = 2);

ScalarField distance_to_boundary(const DomainPtr& dom);

WhitneyDecomposition whitney_decompose(const DiscreteDomain& dom);

/// Pullback coordinate map x -> z + r x between B(0,1) and B(z,r).
struct CoordinateMap {
  Vec3 center{0, 0, 0};
  double r = 1;
  Vec3 apply(const Vec3& x) const {
    return {center[0] + r * x[0], center[1] + r * x[1], center[2] + r * x[2]};
  }
  Vec3 invert(const Vec3& y) const {
    return {(y[0] - center[0]) / r, (y[1] - center[1]) / r, (y[2] - center[2]) / r};
  }
};

std::pair<DiscreteDomain, CoordinateMap> rescale_to_unit(const DiscreteDomain& dom,
                                                         const Vec3& center, double r,
                                                         int resolution = 0);

/// Resample a node field through a coordinate map by nearest node.
std::vector<double> resample_through_map(const DiscreteDomain& src,
                                         const std::vector<double>& values,
                                         const DiscreteDomain& dst, const CoordinateMap& map);

void save_mask(const DiscreteDomain& dom, const std::string& path);
DiscreteDomain load_mask(const std::string& path);

void save_field(const ScalarField& f, const std::string& path);
ScalarField load_field(const std::string& path);

double ball_volume(int n);   // |B(0,1)| in R^n
double sphere_area(int n);   // |S^{n-1}| in R^n

}  // namespace capdp
