#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "genrecon/error.hpp"

namespace genrecon {

using Vec3 = std::array<double, 3>;
using Triangle = std::array<std::uint32_t, 3>;

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> faces;  // 0-based

  bool operator==(const Mesh&) const = default;
};

struct PointCloud {
  std::vector<Vec3> points;
  std::string source;
};

struct EvalReport {
  double chamfer = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  double tau = 0.0;
  std::size_t n_points = 0;
  std::uint64_t seed = 0;
  std::uint64_t seed_b = 0;
  bool normalized = false;
};

enum class ObjErrorKind {
  index_out_of_range,
  negative_index,
  bad_vertex,
  too_few_vertices,
  degenerate_face,
  bad_face_token,
};

std::string_view to_string(ObjErrorKind kind);

class ObjParseError : public Error {
 public:
  ObjParseError(ObjErrorKind kind, std::size_t line, const std::string& detail);

  ObjErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ObjErrorKind kind_;
  std::size_t line_;
};

/// Plain-geometry OBJ subset: `v` and `f` records. Face entries may carry
/// texture/normal indices (discarded); polygons are fan-triangulated.
Mesh parse_obj(std::string_view text);
Mesh load_obj(const std::filesystem::path& path);
std::string serialize_obj(const Mesh& mesh);
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

/// Axis-aligned unit cube [0,1]^3 as 8 vertices and 12 triangles.
Mesh unit_cube();

double triangle_area(const Mesh& mesh, std::size_t face);

/// Centers on the bounding-box center and scales to unit box diagonal.
Mesh normalize_to_unit_diagonal(const Mesh& mesh);

/// Area-weighted uniform surface samples, deterministic under seed.
PointCloud sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed);

/// Squared distance from each query point to its nearest neighbour in the
/// reference cloud, computed with a k-d tree.
std::vector<double> nearest_squared_distances(const std::vector<Vec3>& queries,
                                              const std::vector<Vec3>& reference);

/// Symmetric sum of mean squared nearest-neighbour distances.
double chamfer(const PointCloud& p, const PointCloud& q);

struct FScore {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

double harmonic_fscore(double precision, double recall);
FScore fscore(const PointCloud& p, const PointCloud& q, double tau);

/// Samples `a` with seed and `b` with seed_b and scores them.
EvalReport eval_meshes(const Mesh& a, const Mesh& b, std::size_t n, double tau,
                       std::uint64_t seed, std::uint64_t seed_b, bool normalize = false);
inline EvalReport eval_meshes(const Mesh& a, const Mesh& b, std::size_t n, double tau,
                              std::uint64_t seed) {
  return eval_meshes(a, b, n, tau, seed, seed + 1);
}

}  // namespace genrecon
