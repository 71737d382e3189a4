#include "shell/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shell/error.hpp"

namespace shell {

const char* shape_name(Shape s) { return s == Shape::Tri ? "tri" : "quad"; }

Shape parse_shape(const std::string& name) {
  if (name == "tri" || name == "triangle") return Shape::Tri;
  if (name == "quad" || name == "quadrilateral") return Shape::Quad;
  throw TopologyError("unknown element shape '" + name + "'");
}

namespace {

std::array<int, 2> sorted_pair(int a, int b) { return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a}; }

void flip(Element& e) {
  if (e.shape == Shape::Tri)
    std::swap(e.v[1], e.v[2]);
  else
    std::swap(e.v[1], e.v[3]);
}

Vec3d area_normal(const std::vector<Vec3d>& x, const Element& e) {
  // Sum of corner cross products; exact for planar polygons.
  Vec3d n{0, 0, 0};
  const int m = vertex_count(e.shape);
  for (int i = 0; i < m; ++i) n += cross(x[e.v[i]], x[e.v[(i + 1) % m]]);
  return 0.5 * n;
}

struct EdgeIndex {
  std::map<std::array<int, 2>, int> id;
  std::vector<std::array<int, 2>> pairs;
  std::vector<std::vector<Incidence>> inc;
  std::vector<std::vector<int>> element_edges;
};

EdgeIndex index_edges(const std::vector<Element>& elements) {
  EdgeIndex idx;
  idx.element_edges.resize(elements.size());
  for (int t = 0; t < static_cast<int>(elements.size()); ++t) {
    const Element& el = elements[t];
    for (int le = 0; le < el.local_edge_count(); ++le) {
      const auto [a, b] = el.local_edge(le);
      const auto key = sorted_pair(a, b);
      auto it = idx.id.find(key);
      int e;
      if (it == idx.id.end()) {
        e = static_cast<int>(idx.pairs.size());
        idx.id.emplace(key, e);
        idx.pairs.push_back(key);
        idx.inc.emplace_back();
      } else {
        e = it->second;
      }
      Incidence in;
      in.element = t;
      in.local_edge = le;
      in.same_direction = (a == key[0]);
      in.sign = in.same_direction ? -1 : 1;
      idx.inc[e].push_back(in);
      idx.element_edges[t].push_back(e);
    }
  }
  return idx;
}

// Flip elements so that every two-element edge is traversed oppositely.
void normalize(const std::vector<Vec3d>& x, std::vector<Element>& elements,
               const TopologyOptions& opt) {
  const EdgeIndex idx = index_edges(elements);
  const int n = static_cast<int>(elements.size());
  std::vector<int> flipped(n, -1), component(n, -1);
  int ncomp = 0;
  for (int seed = 0; seed < n; ++seed) {
    if (flipped[seed] >= 0) continue;
    flipped[seed] = 0;
    component[seed] = ncomp;
    std::queue<int> q;
    q.push(seed);
    while (!q.empty()) {
      const int t = q.front();
      q.pop();
      for (int le = 0; le < elements[t].local_edge_count(); ++le) {
        const int e = idx.element_edges[t][le];
        if (idx.inc[e].size() != 2) continue;
        for (const Incidence& other : idx.inc[e]) {
          if (other.element == t) continue;
          const Incidence& mine = idx.inc[e][0].element == t ? idx.inc[e][0] : idx.inc[e][1];
          // Effective directions after flips must differ.
          const bool d_mine = mine.same_direction != (flipped[t] == 1);
          const int s = other.element;
          const bool want_flip = (other.same_direction == d_mine);
          if (flipped[s] < 0) {
            flipped[s] = want_flip ? 1 : 0;
            component[s] = ncomp;
            q.push(s);
          } else if ((flipped[s] == 1) != want_flip) {
            throw OrientationError("surface is not orientable near element " + std::to_string(s));
          }
        }
      }
    }
    ++ncomp;
  }
  if (opt.up) {
    std::vector<double> score(ncomp, 0.0);
    for (int t = 0; t < n; ++t) {
      const double d = dot(area_normal(x, elements[t]), *opt.up);
      score[component[t]] += flipped[t] ? -d : d;
    }
    for (int t = 0; t < n; ++t)
      if (score[component[t]] < 0.0) flipped[t] = 1 - flipped[t];
  }
  for (int t = 0; t < n; ++t)
    if (flipped[t] == 1) flip(elements[t]);
}

}  // namespace

SurfaceMesh build_topology(const std::vector<Vec3d>& vertices,
                           const std::vector<Element>& elements_in,
                           const std::vector<BoundarySpec>& boundary_specs,
                           const TopologyOptions& options) {
  SurfaceMesh mesh;
  mesh.vertices = vertices;
  mesh.elements = elements_in;
  const int nv = static_cast<int>(vertices.size());

  std::vector<int> used(nv, 0);
  for (std::size_t t = 0; t < mesh.elements.size(); ++t) {
    const Element& el = mesh.elements[t];
    if (static_cast<int>(el.v.size()) != vertex_count(el.shape))
      throw TopologyError("element " + std::to_string(t) + " has wrong vertex count");
    std::set<int> distinct(el.v.begin(), el.v.end());
    if (distinct.size() != el.v.size())
      throw TopologyError("element " + std::to_string(t) + " repeats a vertex");
    for (int v : el.v) {
      if (v < 0 || v >= nv)
        throw TopologyError("element " + std::to_string(t) + " references invalid vertex " +
                            std::to_string(v));
      used[v] = 1;
    }
  }
  for (int v = 0; v < nv; ++v)
    if (!used[v]) throw TopologyError("dangling vertex " + std::to_string(v));

  if (options.normalize_orientation) normalize(mesh.vertices, mesh.elements, options);

  EdgeIndex idx = index_edges(mesh.elements);
  mesh.element_edges = idx.element_edges;
  mesh.edges.resize(idx.pairs.size());
  const double kink_cos = std::cos(options.kink_angle_deg * M_PI / 180.0);
  for (std::size_t e = 0; e < idx.pairs.size(); ++e) {
    Edge& ed = mesh.edges[e];
    ed.v = idx.pairs[e];
    ed.inc = idx.inc[e];
    const std::size_t m = ed.inc.size();
    ed.kind = m == 1 ? EdgeKind::Boundary : (m == 2 ? EdgeKind::Interior : EdgeKind::Branch);
    if (ed.kind == EdgeKind::Interior && ed.inc[0].same_direction == ed.inc[1].same_direction)
      throw OrientationError("elements " + std::to_string(ed.inc[0].element) + " and " +
                             std::to_string(ed.inc[1].element) +
                             " traverse their shared edge in the same direction");
    if (m >= 2) {
      // Dihedral at the edge midpoint from the elements' own normals.
      std::vector<Vec3d> normals;
      for (const Incidence& in : ed.inc) {
        const Element& el = mesh.elements[in.element];
        const auto xi = reference_edge_point(el.shape, in.local_edge, 0.5);
        normals.push_back(geometry_frame(mesh, in.element, xi).normal);
      }
      double min_cos = 1.0;
      for (std::size_t i = 0; i < normals.size(); ++i)
        for (std::size_t j = i + 1; j < normals.size(); ++j)
          min_cos = std::min(min_cos, dot(normals[i], normals[j]));
      ed.dihedral = std::acos(std::clamp(min_cos, -1.0, 1.0));
      ed.kink = ed.kind == EdgeKind::Branch || min_cos < kink_cos;
    }
  }

  for (const BoundarySpec& spec : boundary_specs) {
    auto assign = [&](int e) {
      Edge& ed = mesh.edges[e];
      if (!ed.tag.empty() && ed.tag != spec.tag)
        throw TopologyError("edge (" + std::to_string(ed.v[0]) + "," + std::to_string(ed.v[1]) +
                            ") tagged both '" + ed.tag + "' and '" + spec.tag + "'");
      ed.tag = spec.tag;
    };
    for (const auto& pr : spec.edges) {
      auto it = idx.id.find(sorted_pair(pr[0], pr[1]));
      if (it == idx.id.end())
        throw TopologyError("boundary '" + spec.tag + "' names a non-existent edge");
      if (mesh.edges[it->second].kind != EdgeKind::Boundary)
        throw TopologyError("boundary '" + spec.tag + "' names an interior edge");
      assign(it->second);
    }
    if (spec.predicate) {
      for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        const Edge& ed = mesh.edges[e];
        if (ed.kind != EdgeKind::Boundary) continue;
        const Vec3d& a = mesh.vertices[ed.v[0]];
        const Vec3d& b = mesh.vertices[ed.v[1]];
        if (spec.predicate(a) && spec.predicate(b) && spec.predicate(0.5 * (a + b)))
          assign(static_cast<int>(e));
      }
    }
  }
  return mesh;
}

SurfaceMesh rebuild(const SurfaceMesh& mesh, const TopologyOptions& options) {
  SurfaceMesh out = build_topology(mesh.vertices, mesh.elements, mesh.boundary_specs(), options);
  out.probes = mesh.probes;
  return out;
}

int SurfaceMesh::edge_between(int a, int b) const {
  const auto key = sorted_pair(a, b);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].v == key) return static_cast<int>(e);
  return -1;
}

std::vector<int> SurfaceMesh::edges_with_tag(const std::string& tag) const {
  std::vector<int> out;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].tag == tag) out.push_back(static_cast<int>(e));
  return out;
}

std::vector<int> SurfaceMesh::vertices_with_tag(const std::string& tag) const {
  std::set<int> s;
  for (int e : edges_with_tag(tag)) {
    s.insert(edges[e].v[0]);
    s.insert(edges[e].v[1]);
  }
  return {s.begin(), s.end()};
}

std::vector<std::string> SurfaceMesh::tags() const {
  std::set<std::string> s;
  for (const Edge& e : edges)
    if (!e.tag.empty()) s.insert(e.tag);
  return {s.begin(), s.end()};
}

int SurfaceMesh::nearest_vertex(const Vec3d& p) const {
  int best = -1;
  double bd = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const double d = norm(vertices[i] - p);
    if (best < 0 || d < bd - 1e-12 * (1.0 + bd)) {
      best = static_cast<int>(i);
      bd = d;
    }
  }
  return best;
}

bool SurfaceMesh::has_branch_edges() const {
  return std::any_of(edges.begin(), edges.end(),
                     [](const Edge& e) { return e.kind == EdgeKind::Branch; });
}

bool SurfaceMesh::has_kink_edges() const {
  return std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.kink; });
}

double SurfaceMesh::characteristic_length() const {
  if (edges.empty()) return 1.0;
  double s = 0.0;
  for (const Edge& e : edges) s += norm(vertices[e.v[1]] - vertices[e.v[0]]);
  return s / static_cast<double>(edges.size());
}

std::vector<BoundarySpec> SurfaceMesh::boundary_specs() const {
  std::map<std::string, BoundarySpec> specs;
  for (const Edge& e : edges) {
    if (e.tag.empty()) continue;
    auto& s = specs[e.tag];
    s.tag = e.tag;
    s.edges.push_back(e.v);
  }
  std::vector<BoundarySpec> out;
  for (auto& kv : specs) out.push_back(std::move(kv.second));
  return out;
}

// ---------------------------------------------------------------- geometry

std::array<double, 2> reference_vertex(Shape shape, int i) {
  static const std::array<double, 2> tri[3] = {{0, 0}, {1, 0}, {0, 1}};
  static const std::array<double, 2> quad[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return shape == Shape::Tri ? tri[i] : quad[i];
}

std::array<double, 2> reference_edge_point(Shape shape, int le, double s) {
  const int n = vertex_count(shape);
  const auto a = reference_vertex(shape, le);
  const auto b = reference_vertex(shape, (le + 1) % n);
  return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
}

bool inside_reference(Shape shape, const std::array<double, 2>& xi, double tol) {
  if (shape == Shape::Tri) return xi[0] >= -tol && xi[1] >= -tol && xi[0] + xi[1] <= 1.0 + tol;
  return xi[0] >= -tol && xi[1] >= -tol && xi[0] <= 1.0 + tol && xi[1] <= 1.0 + tol;
}

Vec3d map_point(Shape shape, const Vec3d* x, const std::array<double, 2>& xi) {
  const double s = xi[0], t = xi[1];
  if (shape == Shape::Tri) return (1.0 - s - t) * x[0] + s * x[1] + t * x[2];
  return ((1 - s) * (1 - t)) * x[0] + (s * (1 - t)) * x[1] + (s * t) * x[2] + ((1 - s) * t) * x[3];
}

GeometryFrame geometry_frame(Shape shape, const Vec3d* x, const std::array<double, 2>& xi) {
  GeometryFrame g;
  const double s = xi[0], t = xi[1];
  if (shape == Shape::Tri) {
    g.jac = {x[1] - x[0], x[2] - x[0]};
    g.d12 = {0, 0, 0};
  } else {
    g.jac = {(1 - t) * (x[1] - x[0]) + t * (x[2] - x[3]), (1 - s) * (x[3] - x[0]) + s * (x[2] - x[1])};
    g.d12 = x[0] - x[1] + x[2] - x[3];
  }
  g.position = map_point(shape, x, xi);
  const Vec3d n = cross(g.jac[0], g.jac[1]);
  g.weight = norm(n);
  const double scale = dot(g.jac[0], g.jac[0]) + dot(g.jac[1], g.jac[1]);
  if (!(g.weight > 1e-14 * scale) || scale == 0.0)
    throw GeometryError("degenerate element geometry (rank-deficient Jacobian)");
  g.normal = n / g.weight;
  g.projector = projector(g.normal);

  const double g11 = dot(g.jac[0], g.jac[0]);
  const double g12 = dot(g.jac[0], g.jac[1]);
  const double g22 = dot(g.jac[1], g.jac[1]);
  const double det = g11 * g22 - g12 * g12;
  g.dual[0] = (g22 / det) * g.jac[0] - (g12 / det) * g.jac[1];
  g.dual[1] = (g11 / det) * g.jac[1] - (g12 / det) * g.jac[0];

  // d_a n for n = Phi_1 x Phi_2 with Phi_11 = Phi_22 = 0.
  const std::array<Vec3d, 2> dn = {cross(g.jac[0], g.d12), cross(g.d12, g.jac[1])};
  Mat3d w;
  for (int a = 0; a < 2; ++a) {
    const Vec3d dnu = (g.projector * dn[a]) / g.weight;
    w = w + outer(dnu, g.dual[a]);
  }
  // Symmetric in exact arithmetic; remove roundoff asymmetry.
  g.weingarten = 0.5 * (w + transpose(w));

  g.frame[0] = normalized(g.jac[0]);
  g.frame[1] = cross(g.normal, g.frame[0]);
  return g;
}

GeometryFrame geometry_frame(const SurfaceMesh& mesh, int element, const std::array<double, 2>& xi) {
  const Element& el = mesh.elements.at(element);
  if (!inside_reference(el.shape, xi, 1e-12))
    throw GeometryError("reference point outside the reference element");
  std::array<Vec3d, 4> x;
  for (int i = 0; i < vertex_count(el.shape); ++i) x[i] = mesh.vertices[el.v[i]];
  return geometry_frame(el.shape, x.data(), xi);
}

std::optional<std::array<double, 2>> locate(const SurfaceMesh& mesh, int element, const Vec3d& p,
                                            double tol) {
  const Element& el = mesh.elements.at(element);
  std::array<Vec3d, 4> x;
  for (int i = 0; i < vertex_count(el.shape); ++i) x[i] = mesh.vertices[el.v[i]];
  std::array<double, 2> xi = el.shape == Shape::Tri ? std::array<double, 2>{1.0 / 3, 1.0 / 3}
                                                    : std::array<double, 2>{0.5, 0.5};
  for (int it = 0; it < 50; ++it) {
    const GeometryFrame g = geometry_frame(el.shape, x.data(), xi);
    const Vec3d r = p - g.position;
    const double d0 = dot(g.dual[0], r), d1 = dot(g.dual[1], r);
    xi[0] += d0;
    xi[1] += d1;
    if (std::abs(d0) + std::abs(d1) < 1e-15) break;
  }
  if (!inside_reference(el.shape, xi, 1e-9)) return std::nullopt;
  if (norm(map_point(el.shape, x.data(), xi) - p) > tol) return std::nullopt;
  return xi;
}

// ---------------------------------------------------------------- JSON IO

std::string mesh_to_json(const SurfaceMesh& mesh) {
  nlohmann::ordered_json j;
  j["vertices"] = nlohmann::ordered_json::array();
  for (const Vec3d& v : mesh.vertices) j["vertices"].push_back({v[0], v[1], v[2]});
  j["elements"] = nlohmann::ordered_json::array();
  for (const Element& e : mesh.elements)
    j["elements"].push_back({{"shape", shape_name(e.shape)}, {"nodes", e.v}, {"tag", e.tag}});
  j["boundaries"] = nlohmann::ordered_json::object();
  for (const BoundarySpec& s : mesh.boundary_specs()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& pr : s.edges) arr.push_back({pr[0], pr[1]});
    j["boundaries"][s.tag] = arr;
  }
  j["probes"] = nlohmann::ordered_json::object();
  for (const auto& [name, p] : mesh.probes) j["probes"][name] = {p[0], p[1], p[2]};
  return j.dump(1);
}

SurfaceMesh mesh_from_json(const std::string& text, const TopologyOptions& options) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw TopologyError(std::string("invalid mesh JSON: ") + ex.what());
  }
  try {
    std::vector<Vec3d> vertices;
    for (const auto& v : j.at("vertices")) vertices.push_back({v.at(0), v.at(1), v.at(2)});
    std::vector<Element> elements;
    for (const auto& e : j.at("elements")) {
      Element el;
      el.shape = parse_shape(e.at("shape").get<std::string>());
      el.v = e.at("nodes").get<std::vector<int>>();
      if (e.contains("tag")) el.tag = e.at("tag").get<std::string>();
      elements.push_back(std::move(el));
    }
    std::vector<BoundarySpec> specs;
    if (j.contains("boundaries")) {
      for (const auto& [tag, arr] : j.at("boundaries").items()) {
        BoundarySpec s;
        s.tag = tag;
        for (const auto& pr : arr) s.edges.push_back({pr.at(0).get<int>(), pr.at(1).get<int>()});
        specs.push_back(std::move(s));
      }
    }
    SurfaceMesh mesh = build_topology(vertices, elements, specs, options);
    if (j.contains("probes"))
      for (const auto& [name, p] : j.at("probes").items())
        mesh.probes[name] = {p.at(0), p.at(1), p.at(2)};
    return mesh;
  } catch (const nlohmann::json::exception& ex) {
    throw TopologyError(std::string("malformed mesh JSON: ") + ex.what());
  }
}

void save_mesh(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << mesh_to_json(mesh) << '\n';
}

SurfaceMesh load_mesh(const std::string& path, const TopologyOptions& options) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return mesh_from_json(ss.str(), options);
}

}  // namespace shell
