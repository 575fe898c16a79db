/*
   Copyright 2026 The lkspin Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "lkspin/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>

#include "lkspin/errors.hpp"

namespace lkspin {

namespace {

// Cube corner c = dx + 2 dy + 4 dz with (x, y, z) = (phi, theta, psi).
// Six tetrahedra share the diagonal 0 -> 7, one per axis ordering.
constexpr int kTets[6][4] = {
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
};

struct Corner {
    std::size_t id;
    Vec3 pos; // unwrapped chart position
    double f;
};

} // namespace

double LevelSurfaceMesh::total_area() const {
    double a = 0.0;
    for (double x : areas) a += x;
    return a;
}

double regularized_level(const EulerGrid& grid, double u) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        const bool tie = std::any_of(grid.values().begin(), grid.values().end(), [u](double v) { return v == u; });
        if (!tie) return u;
        u += 1e-12;
    }
    return u;
}

Vec3 chart_delta(const EulerPoint& a, const EulerPoint& b) {
    return Vec3(angle_diff(b.phi, a.phi), b.theta - a.theta, angle_diff(b.psi, a.psi));
}

EulerPoint triangle_centroid(const LevelSurfaceMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const EulerPoint& a = mesh.vertices[tri[0]];
    const Vec3 c = (chart_delta(a, mesh.vertices[tri[1]]) + chart_delta(a, mesh.vertices[tri[2]])) / 3.0;
    return {wrap_angle(a.phi + c(0)), a.theta + c(1), wrap_angle(a.psi + c(2))};
}

double triangle_area(const Vec3& e1, const Vec3& e2, double theta, const LeftInvariantMetric& g) {
    const Mat3 gm = gram(g, theta);
    const double g11 = e1.dot(gm * e1), g22 = e2.dot(gm * e2), g12 = e1.dot(gm * e2);
    return 0.5 * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
}

LevelSurfaceMesh extract_level_surface(const EulerGrid& grid, double u, const LeftInvariantMetric& g) {
    LevelSurfaceMesh mesh;
    u = regularized_level(grid, u);
    mesh.level = u;
    const int nphi = grid.n_phi(), nth = grid.n_theta(), npsi = grid.n_psi();
    const std::uint64_t nnodes = grid.size();
    std::unordered_map<std::uint64_t, int> edge_vertex;
    edge_vertex.reserve(1024);

    auto vertex_on_edge = [&](const Corner& a, const Corner& b) {
        const std::uint64_t lo = std::min(a.id, b.id), hi = std::max(a.id, b.id);
        const std::uint64_t key = lo * nnodes + hi;
        auto it = edge_vertex.find(key);
        const double t = (u - a.f) / (b.f - a.f);
        const Vec3 pos = a.pos + t * (b.pos - a.pos);
        if (it != edge_vertex.end()) return std::pair<int, Vec3>{it->second, pos};
        const int idx = static_cast<int>(mesh.vertices.size());
        edge_vertex.emplace(key, idx);
        mesh.vertices.push_back({wrap_angle(pos(0)), pos(1), wrap_angle(pos(2))});
        Vec3 normal = Vec3::Zero();
        if (grid.has_gradient()) {
            const Vec3 df = grid.gradient(a.id) + t * (grid.gradient(b.id) - grid.gradient(a.id));
            const Vec3 up = gram_inverse(g, pos(1)) * df;
            const double nrm = std::sqrt(std::max(0.0, df.dot(up)));
            if (nrm > 0.0) normal = -up / nrm;
        }
        mesh.normals.push_back(normal);
        return std::pair<int, Vec3>{idx, pos};
    };

    auto emit = [&](std::array<std::pair<int, Vec3>, 3> v, const Vec3& inside) {
        Vec3 e1 = v[1].second - v[0].second, e2 = v[2].second - v[0].second;
        if (e1.cross(e2).dot(inside - v[0].second) > 0.0) {
            std::swap(v[1], v[2]);
            std::swap(e1, e2);
        }
        mesh.triangles.push_back({v[0].first, v[1].first, v[2].first});
        const double th = v[0].second(1) + (e1(1) + e2(1)) / 3.0;
        mesh.areas.push_back(triangle_area(e1, e2, th, g));
    };

    const double dphi = grid.dphi(), dth = grid.dtheta(), dpsi = grid.dpsi();
    Corner c[8];
    for (int j = 0; j + 1 < nth; ++j) {
        for (int i = 0; i < nphi; ++i) {
            for (int k = 0; k < npsi; ++k) {
                int above = 0;
                for (int q = 0; q < 8; ++q) {
                    const int dx = q & 1, dy = (q >> 1) & 1, dz = (q >> 2) & 1;
                    c[q].id = grid.id(i + dx, j + dy, k + dz);
                    c[q].f = grid.value(c[q].id);
                    above += c[q].f >= u;
                }
                if (above == 0 || above == 8) continue;
                const Vec3 base(grid.phi(i), grid.theta(j), grid.psi(k));
                for (int q = 0; q < 8; ++q) {
                    c[q].pos = base + Vec3((q & 1) * dphi, ((q >> 1) & 1) * dth, ((q >> 2) & 1) * dpsi);
                }
                for (const auto& tet : kTets) {
                    int in[4], out[4], nin = 0, nout = 0;
                    for (int v : tet) {
                        if (c[v].f >= u) in[nin++] = v;
                        else out[nout++] = v;
                    }
                    if (nin == 0 || nout == 0) continue;
                    const Vec3 inside = c[in[0]].pos;
                    if (nin == 1) {
                        emit({vertex_on_edge(c[in[0]], c[out[0]]), vertex_on_edge(c[in[0]], c[out[1]]),
                              vertex_on_edge(c[in[0]], c[out[2]])}, inside);
                    } else if (nin == 3) {
                        emit({vertex_on_edge(c[in[0]], c[out[0]]), vertex_on_edge(c[in[1]], c[out[0]]),
                              vertex_on_edge(c[in[2]], c[out[0]])}, inside);
                    } else {
                        // quad a0-b0, a0-b1, a1-b1, a1-b0 split into two triangles
                        const auto p00 = vertex_on_edge(c[in[0]], c[out[0]]);
                        const auto p01 = vertex_on_edge(c[in[0]], c[out[1]]);
                        const auto p11 = vertex_on_edge(c[in[1]], c[out[1]]);
                        const auto p10 = vertex_on_edge(c[in[1]], c[out[0]]);
                        emit({p00, p01, p11}, inside);
                        emit({p00, p11, p10}, inside);
                    }
                }
            }
        }
    }
    return mesh;
}

std::vector<std::array<int, 2>> boundary_edges(const LevelSurfaceMesh& mesh) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    }
    std::vector<std::array<int, 2>> out;
    for (const auto& [edge, n] : count) {
        if (n == 1) out.push_back({edge.first, edge.second});
    }
    return out;
}

std::size_t inconsistent_edges(const LevelSurfaceMesh& mesh) {
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
    }
    std::size_t bad = 0;
    for (const auto& [edge, n] : directed) {
        // a consistently oriented manifold uses each directed edge once
        if (n > 1) ++bad;
    }
    return bad;
}

void write_off(const LevelSurfaceMesh& mesh, std::ostream& out) {
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
    out.precision(17);
    for (const auto& v : mesh.vertices) out << v.phi << ' ' << v.theta << ' ' << v.psi << '\n';
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

} // namespace lkspin
