#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "shell/mesh.hpp"

namespace shell {

struct GenParams {
  int nx = 0;  // 0 selects the case default
  int ny = 0;
  double h = 0.0;  // target mesh size (hemisphere)
  bool triangles = false;  // split grid cells into triangles
  std::map<std::string, double> dims;  // overrides: L, W, H, Ri, Ro, R, b, ...

  double dim(const std::string& key, double fallback) const;
};

// Names: cant_shear, cant_moment, slit_annulus, hemisphere, twisted_beam,
// zsection, tsection, flat_plate.
SurfaceMesh gen_benchmark(const std::string& name, const GenParams& params = {});

const std::vector<std::string>& benchmark_geometries();

// Tensor grid over parameter values us x vs mapped by `map`. Vertex (i,j)
// has index j*us.size()+i. Cells are quads or split along the
// (i,j)-(i+1,j+1) diagonal.
struct GridPatch {
  std::vector<Vec3d> vertices;
  std::vector<Element> elements;
};
GridPatch structured_grid(const std::vector<double>& us, const std::vector<double>& vs,
                          bool triangles, const std::function<Vec3d(double, double)>& map);
std::vector<double> linspace(double a, double b, int cells);

}  // namespace shell
