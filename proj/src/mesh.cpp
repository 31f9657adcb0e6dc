#include "genrecon/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace genrecon {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  // from_chars rejects a leading '+', which OBJ writers occasionally emit.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size() && std::isfinite(out);
}

bool parse_int(std::string_view tok, long long& out) {
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

struct PendingFace {
  std::vector<long long> indices;  // 1-based as written
  std::size_t line = 0;
};

long long face_vertex_index(std::string_view tok, std::size_t line) {
  std::array<std::string_view, 3> parts{};
  std::size_t count = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= tok.size(); ++i) {
    if (i == tok.size() || tok[i] == '/') {
      if (count == parts.size()) {
        throw ObjParseError(ObjErrorKind::bad_face_token, line, std::string(tok));
      }
      parts[count++] = tok.substr(start, i - start);
      start = i + 1;
    }
  }
  long long index = 0;
  if (!parse_int(parts[0], index)) {
    throw ObjParseError(ObjErrorKind::bad_face_token, line, std::string(tok));
  }
  for (std::size_t k = 1; k < count; ++k) {
    long long ignored = 0;
    if (!parts[k].empty() && !parse_int(parts[k], ignored)) {
      throw ObjParseError(ObjErrorKind::bad_face_token, line, std::string(tok));
    }
  }
  if (index < 0) {
    throw ObjParseError(ObjErrorKind::negative_index, line,
                        "relative index " + std::to_string(index) + " is not supported");
  }
  return index;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

// Implicit k-d tree over a permutation of the reference points: the median of
// each index range is the node, its halves are the subtrees.
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& pts) : pts_(pts), order_(pts.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    build(0, order_.size(), 0);
  }

  double nearest(const Vec3& q) const {
    double best = std::numeric_limits<double>::infinity();
    search(q, 0, order_.size(), 0, best);
    return best;
  }

 private:
  void build(std::size_t lo, std::size_t hi, int depth) {
    if (hi - lo <= 1) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const int axis = depth % 3;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::size_t a, std::size_t b) { return pts_[a][axis] < pts_[b][axis]; });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void search(const Vec3& q, std::size_t lo, std::size_t hi, int depth, double& best) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const Vec3& p = pts_[order_[mid]];
    best = std::min(best, squared_distance(q, p));
    const int axis = depth % 3;
    const double diff = q[axis] - p[axis];
    const bool left_first = diff < 0.0;
    if (left_first) {
      search(q, lo, mid, depth + 1, best);
      if (diff * diff < best) search(q, mid + 1, hi, depth + 1, best);
    } else {
      search(q, mid + 1, hi, depth + 1, best);
      if (diff * diff < best) search(q, lo, mid, depth + 1, best);
    }
  }

  const std::vector<Vec3>& pts_;
  std::vector<std::size_t> order_;
};

void require_nonempty(const PointCloud& c, const char* what) {
  if (c.points.empty()) throw_invalid(std::string(what) + ": empty point cloud");
}

}  // namespace

std::string_view to_string(ObjErrorKind kind) {
  switch (kind) {
    case ObjErrorKind::index_out_of_range: return "index_out_of_range";
    case ObjErrorKind::negative_index: return "negative_index";
    case ObjErrorKind::bad_vertex: return "bad_vertex";
    case ObjErrorKind::too_few_vertices: return "too_few_vertices";
    case ObjErrorKind::degenerate_face: return "degenerate_face";
    case ObjErrorKind::bad_face_token: return "bad_face_token";
  }
  return "unknown";
}

ObjParseError::ObjParseError(ObjErrorKind kind, std::size_t line, const std::string& detail)
    : Error(ErrorCode::obj_parse,
            "OBJ line " + std::to_string(line) + ": " + std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      line_(line) {}

Mesh parse_obj(std::string_view text) {
  Mesh mesh;
  std::vector<PendingFace> pending;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    if (tokens[0] == "v") {
      if (tokens.size() < 4) {
        throw ObjParseError(ObjErrorKind::bad_vertex, line_no, "vertex needs three coordinates");
      }
      Vec3 v{};
      for (std::size_t k = 0; k < 3; ++k) {
        if (!parse_double(tokens[k + 1], v[k])) {
          throw ObjParseError(ObjErrorKind::bad_vertex, line_no,
                              "non-numeric coordinate '" + std::string(tokens[k + 1]) + "'");
        }
      }
      mesh.vertices.push_back(v);
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) {
        throw ObjParseError(ObjErrorKind::too_few_vertices, line_no,
                            "face has " + std::to_string(tokens.size() - 1) + " vertices");
      }
      PendingFace f;
      f.line = line_no;
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        f.indices.push_back(face_vertex_index(tokens[k], line_no));
      }
      pending.push_back(std::move(f));
    }
    if (end == text.size()) break;
  }

  const auto n = static_cast<long long>(mesh.vertices.size());
  for (const PendingFace& f : pending) {
    for (long long idx : f.indices) {
      if (idx < 1 || idx > n) {
        throw ObjParseError(ObjErrorKind::index_out_of_range, f.line,
                            "index " + std::to_string(idx) + " with " + std::to_string(n) +
                                " vertices");
      }
    }
    for (std::size_t k = 1; k + 1 < f.indices.size(); ++k) {
      const Triangle t{static_cast<std::uint32_t>(f.indices[0] - 1),
                       static_cast<std::uint32_t>(f.indices[k] - 1),
                       static_cast<std::uint32_t>(f.indices[k + 1] - 1)};
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
        throw ObjParseError(ObjErrorKind::degenerate_face, f.line, "repeated vertex index");
      }
      mesh.faces.push_back(t);
    }
  }
  return mesh;
}

Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, path.string() + ": cannot open");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_obj(text);
}

std::string serialize_obj(const Mesh& mesh) {
  std::string out;
  for (const Vec3& v : mesh.vertices) {
    out += "v " + format_double(v[0]) + " " + format_double(v[1]) + " " + format_double(v[2]) + "\n";
  }
  for (const Triangle& t : mesh.faces) {
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
           std::to_string(t[2] + 1) + "\n";
  }
  return out;
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, path.string() + ": cannot open for writing");
  out << serialize_obj(mesh);
  if (!out) throw Error(ErrorCode::io_error, path.string() + ": write failed");
}

Mesh unit_cube() {
  Mesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  }
  // Two outward-facing triangles per side.
  m.faces = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
             {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return m;
}

double triangle_area(const Mesh& mesh, std::size_t face) {
  const Triangle& t = mesh.faces.at(face);
  const Vec3& a = mesh.vertices.at(t[0]);
  const Vec3& b = mesh.vertices.at(t[1]);
  const Vec3& c = mesh.vertices.at(t[2]);
  const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const Vec3 x{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  return 0.5 * std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

Mesh normalize_to_unit_diagonal(const Mesh& mesh) {
  if (mesh.vertices.empty()) throw_invalid("cannot normalize a mesh without vertices");
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const Vec3& v : mesh.vertices) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  const double diag = std::sqrt(squared_distance(lo, hi));
  if (!(diag > 0.0)) throw Error(ErrorCode::zero_area, "mesh bounding box has zero diagonal");
  Mesh out = mesh;
  for (Vec3& v : out.vertices) {
    for (int k = 0; k < 3; ++k) v[k] = (v[k] - 0.5 * (lo[k] + hi[k])) / diag;
  }
  return out;
}

PointCloud sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw_invalid("sample count must be >= 1");
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += triangle_area(mesh, f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::zero_area, "mesh has zero total surface area");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud cloud;
  cloud.source = "surface samples (seed " + std::to_string(seed) + ")";
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    if (it == cumulative.end()) it = std::prev(it);
    const Triangle& t = mesh.faces[static_cast<std::size_t>(it - cumulative.begin())];
    double u = unit(rng);
    double v = unit(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    Vec3 p{};
    for (int k = 0; k < 3; ++k) p[k] = a[k] + u * (b[k] - a[k]) + v * (c[k] - a[k]);
    cloud.points.push_back(p);
  }
  return cloud;
}

std::vector<double> nearest_squared_distances(const std::vector<Vec3>& queries,
                                              const std::vector<Vec3>& reference) {
  if (reference.empty()) throw_invalid("nearest neighbour search over an empty cloud");
  const KdTree tree(reference);
  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = tree.nearest(queries[i]);
  return out;
}

double chamfer(const PointCloud& p, const PointCloud& q) {
  require_nonempty(p, "chamfer");
  require_nonempty(q, "chamfer");
  auto mean = [](const std::vector<double>& d) {
    double s = 0.0;
    for (double x : d) s += x;
    return s / static_cast<double>(d.size());
  };
  return mean(nearest_squared_distances(p.points, q.points)) +
         mean(nearest_squared_distances(q.points, p.points));
}

double harmonic_fscore(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

FScore fscore(const PointCloud& p, const PointCloud& q, double tau) {
  require_nonempty(p, "fscore");
  require_nonempty(q, "fscore");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw_invalid("fscore threshold tau must be > 0");
  auto fraction_within = [tau](const std::vector<double>& d) {
    std::size_t hits = 0;
    for (double x : d) hits += std::sqrt(x) <= tau ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(d.size());
  };
  FScore f;
  f.precision = fraction_within(nearest_squared_distances(p.points, q.points));
  f.recall = fraction_within(nearest_squared_distances(q.points, p.points));
  f.fscore = harmonic_fscore(f.precision, f.recall);
  return f;
}

EvalReport eval_meshes(const Mesh& a, const Mesh& b, std::size_t n, double tau,
                       std::uint64_t seed, std::uint64_t seed_b, bool normalize) {
  const Mesh ma = normalize ? normalize_to_unit_diagonal(a) : a;
  const Mesh mb = normalize ? normalize_to_unit_diagonal(b) : b;
  const PointCloud pa = sample_surface(ma, n, seed);
  const PointCloud pb = sample_surface(mb, n, seed_b);
  EvalReport r;
  r.chamfer = chamfer(pa, pb);
  const FScore f = fscore(pa, pb, tau);
  r.precision = f.precision;
  r.recall = f.recall;
  r.fscore = f.fscore;
  r.tau = tau;
  r.n_points = n;
  r.seed = seed;
  r.seed_b = seed_b;
  r.normalized = normalize;
  return r;
}

}  // namespace genrecon
