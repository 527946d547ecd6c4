#include "cqwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cqwave {
namespace {

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

TriangleMesh refine_n(TriangleMesh m, int level) {
  for (int i = 0; i < level; ++i) m = refine_uniform(m);
  return m;
}

}  // namespace

TriangleMesh generate_disk(double R, int level) {
  if (R <= 0.0 || level < 0)
    throw std::invalid_argument("generate_disk: R > 0, level >= 0 required");
  TriangleMesh m;
  m.circle_radius = R;
  m.vertices.push_back({0.0, 0.0});
  for (int k = 0; k < 6; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 6.0;
    m.vertices.push_back({R * std::cos(a), R * std::sin(a)});
  }
  for (int k = 0; k < 6; ++k) {
    const int a = 1 + k, b = 1 + (k + 1) % 6;
    m.triangles.push_back({0, a, b});
    m.boundary_edges.push_back({a, b});
    m.boundary_vertices.push_back(a);
  }
  return refine_n(std::move(m), level);
}

TriangleMesh generate_lshape(int level) {
  if (level < 0) throw std::invalid_argument("generate_lshape: level >= 0");
  // outline (-1,-1), (1,-1), (1,3), (-3,3), (-3,1), (-1,1); three cells of
  // side 2 at level 0, lattice key (ix, iy) at the real point (2ix-1, 2iy-1)
  TriangleMesh m;
  std::map<std::pair<long, long>, int> vid;  // integer lattice keys
  auto vertex = [&](long ix, long iy) {
    const auto key = std::make_pair(ix, iy);
    auto it = vid.find(key);
    if (it != vid.end()) return it->second;
    const int id = int(m.vertices.size());
    m.vertices.push_back({2.0 * double(ix) - 1.0, 2.0 * double(iy) - 1.0});
    vid.emplace(key, id);
    return id;
  };
  auto inside = [](long ix, long iy) {
    // cell [ix, ix+1] x [iy, iy+1] in lattice units
    const bool arm1 = ix == 0 && iy >= 0 && iy < 2;  // [-1,1]x[-1,3]
    const bool arm2 = ix == -1 && iy == 1;           // [-3,-1]x[1,3]
    return arm1 || arm2;
  };
  for (long iy = 0; iy < 2; ++iy)
    for (long ix = -1; ix < 1; ++ix) {
      if (!inside(ix, iy)) continue;
      const int v00 = vertex(ix, iy), v10 = vertex(ix + 1, iy);
      const int v11 = vertex(ix + 1, iy + 1), v01 = vertex(ix, iy + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  // boundary loop: walk the polygon corners counter-clockwise in lattice steps
  const std::vector<std::pair<long, long>> corners = {
      {0, 0}, {1, 0}, {1, 2}, {-1, 2}, {-1, 1}, {0, 1}};
  for (std::size_t c = 0; c < corners.size(); ++c) {
    auto [x0, y0] = corners[c];
    auto [x1, y1] = corners[(c + 1) % corners.size()];
    const long steps = std::max(std::labs(x1 - x0), std::labs(y1 - y0));
    const long dx = (x1 - x0) / steps, dy = (y1 - y0) / steps;
    for (long s = 0; s < steps; ++s) {
      const int a = vertex(x0 + s * dx, y0 + s * dy);
      const int b = vertex(x0 + (s + 1) * dx, y0 + (s + 1) * dy);
      m.boundary_edges.push_back({a, b});
      m.boundary_vertices.push_back(a);
    }
  }
  return refine_n(std::move(m), level);
}

TriangleMesh refine_uniform(const TriangleMesh& m) {
  TriangleMesh r;
  r.circle_radius = m.circle_radius;
  r.vertices = m.vertices;
  std::set<std::pair<int, int>> boundary_set;
  for (const auto& e : m.boundary_edges)
    boundary_set.insert(std::minmax(e[0], e[1]));
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Point2 p = {0.5 * (m.vertices[a][0] + m.vertices[b][0]),
                0.5 * (m.vertices[a][1] + m.vertices[b][1])};
    if (m.circle_radius && boundary_set.count(key)) {
      const double s = *m.circle_radius / std::hypot(p[0], p[1]);
      p = {p[0] * s, p[1] * s};
    }
    const int id = int(r.vertices.size());
    r.vertices.push_back(p);
    midpoint.emplace(key, id);
    return id;
  };
  for (const auto& t : m.triangles) {
    const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    r.triangles.push_back({t[0], m01, m20});
    r.triangles.push_back({t[1], m12, m01});
    r.triangles.push_back({t[2], m20, m12});
    r.triangles.push_back({m01, m12, m20});
  }
  for (const auto& e : m.boundary_edges) {
    const int c = mid(e[0], e[1]);
    r.boundary_edges.push_back({e[0], c});
    r.boundary_edges.push_back({c, e[1]});
    r.boundary_vertices.push_back(e[0]);
    r.boundary_vertices.push_back(c);
  }
  return r;
}

void save_mesh(const TriangleMesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
  out << m.vertices.size() << ' ' << m.triangles.size() << ' '
      << m.boundary_edges.size() << '\n';
  char buf[80];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v[0], v[1]);
    out << buf;
  }
  for (const auto& t : m.triangles)
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : m.boundary_edges) out << e[0] << ' ' << e[1] << '\n';
  if (!out) throw std::runtime_error("save_mesh: write failed for " + path);
}

TriangleMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  auto fail = [&](int line, const std::string& what) {
    throw std::runtime_error("load_mesh: " + path + " line " +
                             std::to_string(line) + ": " + what);
  };
  int lineno = 0;
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line)) fail(lineno + 1, "unexpected end of file");
    ++lineno;
  };
  next_line();
  std::size_t nv = 0, nt = 0, nb = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nt >> nb)) fail(lineno, "malformed counts line");
  }
  TriangleMesh m;
  m.vertices.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    next_line();
    std::istringstream ss(line);
    if (!(ss >> m.vertices[i][0] >> m.vertices[i][1]))
      fail(lineno, "malformed vertex");
  }
  auto check_index = [&](long v) {
    if (v < 0 || std::size_t(v) >= nv) fail(lineno, "vertex index out of range");
    return int(v);
  };
  m.triangles.resize(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    next_line();
    std::istringstream ss(line);
    long a, b, c;
    if (!(ss >> a >> b >> c)) fail(lineno, "malformed triangle");
    m.triangles[i] = {check_index(a), check_index(b), check_index(c)};
  }
  m.boundary_edges.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    next_line();
    std::istringstream ss(line);
    long a, b;
    if (!(ss >> a >> b)) fail(lineno, "malformed boundary edge");
    m.boundary_edges[i] = {check_index(a), check_index(b)};
  }
  m.boundary_vertices.reserve(nb);
  for (const auto& e : m.boundary_edges) m.boundary_vertices.push_back(e[0]);
  return m;
}

void check_mesh(const TriangleMesh& m) {
  auto fail = [](const std::string& what) {
    throw std::runtime_error("check_mesh: " + what);
  };
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : m.triangles) {
    if (signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) <= 0.0)
      fail("non-positive triangle area");
    for (int k = 0; k < 3; ++k)
      edge_count[std::minmax(t[k], t[(k + 1) % 3])] += 1;
  }
  std::set<std::pair<int, int>> bset;
  for (const auto& e : m.boundary_edges) bset.insert(std::minmax(e[0], e[1]));
  for (const auto& [edge, count] : edge_count) {
    const bool on_boundary = bset.count(edge) > 0;
    if (on_boundary && count != 1) fail("boundary edge shared by two triangles");
    if (!on_boundary && count != 2) fail("interior edge not shared by two triangles");
  }
  if (bset.size() != m.boundary_edges.size()) fail("duplicate boundary edge");
  const std::size_t nb = m.boundary_edges.size();
  for (std::size_t i = 0; i < nb; ++i) {
    if (m.boundary_edges[i][1] != m.boundary_edges[(i + 1) % nb][0])
      fail("boundary loop not consecutive");
    if (m.boundary_vertices[i] != m.boundary_edges[i][0])
      fail("boundary_vertices out of sync with boundary_edges");
  }
  // outward normal: every loop edge must run in its owning triangle's
  // (counter-clockwise) direction, putting the interior on the left
  std::set<std::pair<int, int>> directed;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) directed.insert({t[k], t[(k + 1) % 3]});
  for (const auto& e : m.boundary_edges)
    if (!directed.count({e[0], e[1]})) fail("boundary edge normal not outward");
}

double mesh_area(const TriangleMesh& m) {
  double a = 0.0;
  for (const auto& t : m.triangles)
    a += signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
  return a;
}

double min_angle_deg(const TriangleMesh& m) {
  double worst = 180.0;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      const auto& a = m.vertices[t[k]];
      const auto& b = m.vertices[t[(k + 1) % 3]];
      const auto& c = m.vertices[t[(k + 2) % 3]];
      const double ux = b[0] - a[0], uy = b[1] - a[1];
      const double vx = c[0] - a[0], vy = c[1] - a[1];
      const double ang = std::acos((ux * vx + uy * vy) /
                                   (std::hypot(ux, uy) * std::hypot(vx, vy)));
      worst = std::min(worst, ang * 180.0 / std::numbers::pi);
    }
  return worst;
}

double mesh_h(const TriangleMesh& m) {
  double h = 0.0;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      const auto& a = m.vertices[t[k]];
      const auto& b = m.vertices[t[(k + 1) % 3]];
      h = std::max(h, std::hypot(b[0] - a[0], b[1] - a[1]));
    }
  return h;
}

}  // namespace cqwave
