#include "shell/generators.hpp"

#include <cmath>

#include "shell/error.hpp"

namespace shell {

double GenParams::dim(const std::string& key, double fallback) const {
  auto it = dims.find(key);
  const double v = it == dims.end() ? fallback : it->second;
  if (!(v > 0.0)) throw ConfigError("dimension '" + key + "' must be positive");
  return v;
}

const std::vector<std::string>& benchmark_geometries() {
  static const std::vector<std::string> names = {"cant_shear", "cant_moment", "slit_annulus",
                                                 "hemisphere", "twisted_beam", "zsection",
                                                 "tsection",   "flat_plate"};
  return names;
}

std::vector<double> linspace(double a, double b, int cells) {
  std::vector<double> v(cells + 1);
  for (int i = 0; i <= cells; ++i) v[i] = a + (b - a) * static_cast<double>(i) / cells;
  v.back() = b;
  return v;
}

GridPatch structured_grid(const std::vector<double>& us, const std::vector<double>& vs,
                          bool triangles, const std::function<Vec3d(double, double)>& map) {
  GridPatch g;
  const int nu = static_cast<int>(us.size()), nv = static_cast<int>(vs.size());
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) g.vertices.push_back(map(us[i], vs[j]));
  auto id = [nu](int i, int j) { return j * nu + i; };
  for (int j = 0; j + 1 < nv; ++j)
    for (int i = 0; i + 1 < nu; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (triangles) {
        g.elements.push_back({Shape::Tri, {a, b, c}, ""});
        g.elements.push_back({Shape::Tri, {a, c, d}, ""});
      } else {
        g.elements.push_back({Shape::Quad, {a, b, c, d}, ""});
      }
    }
  return g;
}

namespace {

int pick(int given, int fallback) {
  if (given < 0) throw ConfigError("grid sizes must be positive");
  return given == 0 ? fallback : given;
}

std::function<bool(const Vec3d&)> near(int axis, double value, double tol) {
  return [=](const Vec3d& p) { return std::abs(p[axis] - value) <= tol; };
}

// Append a patch, welding vertices that coincide with existing ones.
void weld_into(GridPatch& dst, const GridPatch& src, const std::string& tag, double tol) {
  std::vector<int> remap(src.vertices.size());
  for (std::size_t i = 0; i < src.vertices.size(); ++i) {
    int found = -1;
    for (std::size_t k = 0; k < dst.vertices.size(); ++k)
      if (norm(dst.vertices[k] - src.vertices[i]) <= tol) {
        found = static_cast<int>(k);
        break;
      }
    if (found < 0) {
      found = static_cast<int>(dst.vertices.size());
      dst.vertices.push_back(src.vertices[i]);
    }
    remap[i] = found;
  }
  for (Element e : src.elements) {
    for (int& v : e.v) v = remap[v];
    e.tag = tag;
    dst.elements.push_back(e);
  }
}

SurfaceMesh rectangle(const GenParams& p, double L, double W, int nx0, int ny0,
                      const std::string& right_tag, const std::string& side_tag) {
  const int nx = pick(p.nx, nx0), ny = pick(p.ny, ny0);
  GridPatch g = structured_grid(linspace(0, L, nx), linspace(0, W, ny), p.triangles,
                                [](double x, double y) { return Vec3d{x, y, 0.0}; });
  const double tol = 1e-9 * L;
  std::vector<BoundarySpec> specs = {{"clamped", {}, near(0, 0.0, tol)},
                                     {right_tag, {}, near(0, L, tol)},
                                     {side_tag, {}, near(1, 0.0, tol)},
                                     {side_tag, {}, near(1, W, tol)}};
  SurfaceMesh m = build_topology(g.vertices, g.elements, specs);
  m.probes["A"] = {L, 0.0, 0.0};
  return m;
}

SurfaceMesh slit_annulus(const GenParams& p) {
  const double ri = p.dim("Ri", 6.0), ro = p.dim("Ro", 10.0);
  if (ro <= ri) throw ConfigError("slit annulus needs Ro > Ri");
  const int nr = pick(p.nx, 10), nt = pick(p.ny, 80);
  // The theta = 0 lip (loaded) comes first so that probe lookups at the slit
  // resolve to the loaded lip.
  GridPatch g = structured_grid(linspace(ri, ro, nr), linspace(0.0, 2.0 * M_PI, nt), p.triangles,
                                [](double r, double t) {
                                  return Vec3d{r * std::cos(t), r * std::sin(t), 0.0};
                                });
  const int nu = nr + 1;
  BoundarySpec load{"load", {}, {}}, clamp{"clamped", {}, {}};
  for (int i = 0; i < nr; ++i) {
    load.edges.push_back({i, i + 1});
    clamp.edges.push_back({nt * nu + i, nt * nu + i + 1});
  }
  const double tol = 1e-9 * ro;
  auto on_circle = [tol](double r) {
    return [=](const Vec3d& x) { return std::abs(std::hypot(x[0], x[1]) - r) <= tol; };
  };
  std::vector<BoundarySpec> specs = {load, clamp, {"inner", {}, on_circle(ri)},
                                     {"outer", {}, on_circle(ro)}};
  SurfaceMesh m = build_topology(g.vertices, g.elements, specs);
  m.probes["A"] = {ri, 0.0, 0.0};
  m.probes["B"] = {ro, 0.0, 0.0};
  return m;
}

SurfaceMesh hemisphere(const GenParams& p) {
  const double R = p.dim("R", 10.0);
  int n;
  if (p.h > 0.0)
    n = static_cast<int>(std::ceil(0.5 * M_PI * R / p.h - 1e-9));
  else
    n = pick(p.nx, 16);
  if (n < 1) throw ConfigError("hemisphere subdivision must be positive");
  // Quarter of the hemisphere (one octant of the sphere). Barycentric grid
  // on the spherical triangle e_x, e_y, e_z with sine warping so that the
  // three boundary arcs are subdivided uniformly.
  std::vector<Vec3d> x;
  std::vector<std::vector<int>> id(n + 1, std::vector<int>(n + 1, -1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i + j <= n; ++i) {
      const double a = static_cast<double>(n - i - j) / n, b = static_cast<double>(i) / n,
                   c = static_cast<double>(j) / n;
      Vec3d q{std::sin(0.5 * M_PI * a), std::sin(0.5 * M_PI * b), std::sin(0.5 * M_PI * c)};
      q = normalized(q);
      // Snap exact symmetry planes.
      if (i + j == n) q[0] = 0.0;
      if (i == 0) q[1] = 0.0;
      if (j == 0) q[2] = 0.0;
      id[i][j] = static_cast<int>(x.size());
      x.push_back(R * q);
    }
  std::vector<Element> els;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + j < n; ++i) {
      els.push_back({Shape::Tri, {id[i][j], id[i + 1][j], id[i][j + 1]}, ""});
      if (i + j + 2 <= n) els.push_back({Shape::Tri, {id[i + 1][j], id[i + 1][j + 1], id[i][j + 1]}, ""});
    }
  const double tol = 1e-9 * R;
  std::vector<BoundarySpec> specs = {{"sym_x", {}, near(0, 0.0, tol)},
                                     {"sym_y", {}, near(1, 0.0, tol)},
                                     {"equator", {}, near(2, 0.0, tol)}};
  SurfaceMesh m = build_topology(x, els, specs);
  m.probes["A"] = {R, 0.0, 0.0};
  m.probes["B"] = {0.0, R, 0.0};
  m.probes["C"] = {0.0, 0.0, R};
  return m;
}

SurfaceMesh twisted_beam(const GenParams& p) {
  const double L = p.dim("L", 12.0), b = p.dim("b", 1.1);
  const double twist = p.dims.count("twist") ? p.dims.at("twist") : 0.5 * M_PI;
  const int na = pick(p.nx, 4), nl = pick(p.ny, 24);
  // Axis along y; the width direction rotates from z (root) to x (tip).
  GridPatch g = structured_grid(linspace(-0.5 * b, 0.5 * b, na), linspace(0.0, L, nl), p.triangles,
                                [&](double s, double y) {
                                  const double th = twist * y / L;
                                  return Vec3d{s * std::sin(th), y, s * std::cos(th)};
                                });
  const double tol = 1e-9 * L;
  std::vector<BoundarySpec> specs = {{"clamped", {}, near(1, 0.0, tol)}, {"tip", {}, near(1, L, tol)}};
  SurfaceMesh m = build_topology(g.vertices, g.elements, specs);
  m.probes["A"] = {0.0, L, 0.0};
  return m;
}

SurfaceMesh zsection(const GenParams& p) {
  const double L = p.dim("L", 10.0), W = p.dim("W", 2.0), H = p.dim("H", 1.0);
  const int nx = pick(p.nx, 32), ns = pick(p.ny, 15);
  // Cells per flange; the web takes the rest. Default: equal thirds.
  int kf = ns / 3;
  if (p.dims.count("flange_cells")) kf = static_cast<int>(p.dims.at("flange_cells"));
  else if (ns % 3 != 0) throw ConfigError("zsection needs a cross-section count divisible by 3");
  const int kw = ns - 2 * kf;
  if (kf < 1 || kw < 1) throw ConfigError("zsection needs at least one cell per flange and web");
  // Developed coordinate: top flange [0,H], web [H,H+W], bottom flange [H+W,2H+W].
  std::vector<double> s;
  for (int j = 0; j <= kf; ++j) s.push_back(H * j / kf);
  for (int j = 1; j <= kw; ++j) s.push_back(H + W * j / kw);
  for (int j = 1; j <= kf; ++j) s.push_back(H + W + H * j / kf);
  const double zt = 0.5 * W;
  auto section = [=](double sv) -> std::pair<double, double> {
    if (sv <= H) return {H - sv, zt};
    if (sv <= H + W) return {0.0, zt - (sv - H)};
    return {-(sv - H - W), -zt};
  };
  GridPatch g = structured_grid(linspace(0.0, L, nx), s, p.triangles, [&](double x, double sv) {
    const auto [y, z] = section(sv);
    return Vec3d{x, y, z};
  });
  const double tol = 1e-9 * L;
  auto end_flange = [=](double zv) {
    return [=](const Vec3d& q) { return std::abs(q[0] - L) <= tol && std::abs(q[2] - zv) <= tol; };
  };
  std::vector<BoundarySpec> specs = {{"clamped", {}, near(0, 0.0, tol)},
                                     {"load_top", {}, end_flange(zt)},
                                     {"load_bottom", {}, end_flange(-zt)}};
  SurfaceMesh m = build_topology(g.vertices, g.elements, specs);
  // Free edge of the top flange, where the warping stress peaks.
  m.probes["A"] = {0.25 * L, H, zt};
  return m;
}

SurfaceMesh tsection(const GenParams& p) {
  const double L = p.dim("L", 1.0), W = p.dim("W", 1.0), H = p.dim("H", 1.0);
  const int nx = pick(p.nx, 4), ny = pick(p.ny, 1);
  const int nz = nx;
  GridPatch all;
  const double tol = 1e-9 * (L + W + H);
  weld_into(all,
            structured_grid(linspace(-0.5 * L, 0.0, nx), linspace(0.0, W, ny), p.triangles,
                            [=](double x, double y) { return Vec3d{x, y, H}; }),
            "left", tol);
  weld_into(all,
            structured_grid(linspace(0.0, 0.5 * L, nx), linspace(0.0, W, ny), p.triangles,
                            [=](double x, double y) { return Vec3d{x, y, H}; }),
            "right", tol);
  weld_into(all,
            structured_grid(linspace(0.0, W, ny), linspace(0.0, H, nz), p.triangles,
                            [=](double y, double z) { return Vec3d{0.0, y, z}; }),
            "web", tol);
  std::vector<BoundarySpec> specs = {{"clamped", {}, near(2, 0.0, tol)},
                                     {"load", {}, near(0, -0.5 * L, tol)}};
  SurfaceMesh m = build_topology(all.vertices, all.elements, specs);
  m.probes["A"] = {-0.5 * L, 0.0, H};
  return m;
}

SurfaceMesh flat_plate(const GenParams& p) {
  const double L = p.dim("L", 1.0), W = p.dim("W", L);
  const int nx = pick(p.nx, 4), ny = pick(p.ny, nx);
  GridPatch g = structured_grid(linspace(0, L, nx), linspace(0, W, ny), p.triangles,
                                [](double x, double y) { return Vec3d{x, y, 0.0}; });
  const double tol = 1e-9 * L;
  std::vector<BoundarySpec> specs = {{"left", {}, near(0, 0.0, tol)},
                                     {"right", {}, near(0, L, tol)},
                                     {"bottom", {}, near(1, 0.0, tol)},
                                     {"top", {}, near(1, W, tol)}};
  SurfaceMesh m = build_topology(g.vertices, g.elements, specs);
  m.probes["C"] = {0.5 * L, 0.5 * W, 0.0};
  return m;
}

}  // namespace

SurfaceMesh gen_benchmark(const std::string& name, const GenParams& p) {
  if (name == "cant_shear")
    return rectangle(p, p.dim("L", 10.0), p.dim("W", 1.0), 16, 1, "load", "side");
  if (name == "cant_moment")
    return rectangle(p, p.dim("L", 12.0), p.dim("W", 1.0), 16, 1, "load", "side");
  if (name == "slit_annulus") return slit_annulus(p);
  if (name == "hemisphere") return hemisphere(p);
  if (name == "twisted_beam") return twisted_beam(p);
  if (name == "zsection") return zsection(p);
  if (name == "tsection") return tsection(p);
  if (name == "flat_plate") return flat_plate(p);
  throw ConfigError("unknown benchmark geometry '" + name + "'");
}

}  // namespace shell
