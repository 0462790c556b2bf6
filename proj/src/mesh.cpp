#include "shapegrad/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace shapegrad {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

// Signed circular difference in (-pi, pi].
double circ_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d > kTwoPi / 2.0) d -= kTwoPi;
    if (d <= -kTwoPi / 2.0) d += kTwoPi;
    return d;
}

// Triangulates the annulus between two nested rings, both ordered
// counterclockwise and star-shaped about a common center. Handles unequal
// vertex counts by advancing whichever ring has the smaller next angle.
// The inner ring may be a single (center) vertex, giving a fan.
void stitch_rings(const std::vector<int>& outer_idx, const std::vector<double>& outer_ang,
                  const std::vector<int>& inner_idx, const std::vector<double>& inner_ang,
                  Region tag, std::vector<Triangle>& out, const std::vector<Vec2>* points = nullptr) {
    const int m = static_cast<int>(outer_idx.size());
    const int p = static_cast<int>(inner_idx.size());
    if (p == 1) {
        for (int i = 0; i < m; ++i)
            out.push_back({{outer_idx[static_cast<std::size_t>(i)],
                            outer_idx[static_cast<std::size_t>(i + 1) % static_cast<std::size_t>(m)],
                            inner_idx[0]}, tag});
        return;
    }

    // Aligned rings: split each quad along whichever diagonal gives the
    // better worst triangle (matters in the skewed cells near box corners).
    if (m == p && outer_ang == inner_ang && points != nullptr) {
        for (int i = 0; i < m; ++i) {
            const int i2 = (i + 1) % m;
            const int a = outer_idx[static_cast<std::size_t>(i)];
            const int b = outer_idx[static_cast<std::size_t>(i2)];
            const int c = inner_idx[static_cast<std::size_t>(i2)];
            const int d = inner_idx[static_cast<std::size_t>(i)];
            const Vec2 pa = (*points)[static_cast<std::size_t>(a)];
            const Vec2 pb = (*points)[static_cast<std::size_t>(b)];
            const Vec2 pc = (*points)[static_cast<std::size_t>(c)];
            const Vec2 pd = (*points)[static_cast<std::size_t>(d)];
            const double bd = std::min(triangle_quality(pa, pb, pd), triangle_quality(pb, pc, pd));
            const double ac = std::min(triangle_quality(pa, pb, pc), triangle_quality(pa, pc, pd));
            if (bd >= ac) {
                out.push_back({{a, b, d}, tag});
                out.push_back({{b, c, d}, tag});
            } else {
                out.push_back({{a, b, c}, tag});
                out.push_back({{a, c, d}, tag});
            }
        }
        return;
    }

    // Align the inner start with the first outer vertex.
    int j0 = 0;
    double best = std::numeric_limits<double>::max();
    for (int j = 0; j < p; ++j) {
        const double d = std::abs(circ_diff(inner_ang[static_cast<std::size_t>(j)], outer_ang[0]));
        if (d < best) { best = d; j0 = j; }
    }

    auto fwd_step = [](const std::vector<double>& ang, int k) {
        const int n = static_cast<int>(ang.size());
        double d = ang[static_cast<std::size_t>((k + 1) % n)] - ang[static_cast<std::size_t>(k % n)];
        d = std::fmod(d, kTwoPi);
        if (d <= 0.0) d += kTwoPi;
        return d;
    };

    double ca = outer_ang[0];
    double cb = outer_ang[0] + circ_diff(inner_ang[static_cast<std::size_t>(j0)], outer_ang[0]);
    int i = 0, j = 0;
    while (i < m || j < p) {
        const int ai = i % m;
        const int bj = (j0 + j) % p;
        const double na = ca + fwd_step(outer_ang, i % m);
        const double nb = cb + fwd_step(inner_ang, (j0 + j) % p);
        const bool advance_outer = (j == p) || (i < m && na <= nb);
        if (advance_outer) {
            out.push_back({{outer_idx[static_cast<std::size_t>(ai)],
                            outer_idx[static_cast<std::size_t>((ai + 1) % m)],
                            inner_idx[static_cast<std::size_t>(bj)]}, tag});
            ca = na;
            ++i;
        } else {
            out.push_back({{inner_idx[static_cast<std::size_t>((bj + 1) % p)],
                            inner_idx[static_cast<std::size_t>(bj)],
                            outer_idx[static_cast<std::size_t>(ai)]}, tag});
            cb = nb;
            ++j;
        }
    }
}

// First intersection of the ray center + t*dir with the boundary of
// [-H,H]^2, for center strictly inside the box.
Vec2 ray_box_hit(const Vec2& center, double theta, double H) {
    const double dx = std::cos(theta);
    const double dy = std::sin(theta);
    double t = std::numeric_limits<double>::max();
    if (dx > 1e-15) t = std::min(t, (H - center.x) / dx);
    if (dx < -1e-15) t = std::min(t, (-H - center.x) / dx);
    if (dy > 1e-15) t = std::min(t, (H - center.y) / dy);
    if (dy < -1e-15) t = std::min(t, (-H - center.y) / dy);
    return {center.x + t * dx, center.y + t * dy};
}

} // namespace

TriMesh generate_circle_in_box(double radius, Vec2 center, double box_half_width, int resolution) {
    if (!(radius > 0.0)) throw std::invalid_argument("generate_circle_in_box: radius must be positive");
    if (resolution < 4) throw std::invalid_argument("generate_circle_in_box: resolution must be >= 4");
    if (radius >= box_half_width)
        throw std::invalid_argument("generate_circle_in_box: shape must not touch the outer boundary (radius >= box)");
    if (std::abs(center.x) + radius >= box_half_width || std::abs(center.y) + radius >= box_half_width)
        throw std::invalid_argument("generate_circle_in_box: circle does not fit inside the box");

    const double R = radius;
    const double H = box_half_width;
    const int n_base = resolution;

    // Master angle set for the interface and all blended layers: the four
    // box-corner directions plus `resolution` interior rays distributed over
    // the arcs between corners in proportion to arc length (largest
    // remainder, at least one per arc). The outer boundary polyline then
    // passes exactly through the corners, the gaps are near-uniform, and the
    // ring size resolution+4 is strictly monotone in the resolution.
    const Vec2 corners[4] = {{H, H}, {-H, H}, {-H, -H}, {H, -H}};
    std::array<std::pair<double, Vec2>, 4> corner_dir;
    for (int c = 0; c < 4; ++c)
        corner_dir[static_cast<std::size_t>(c)] = {
            wrap_angle(std::atan2(corners[c].y - center.y, corners[c].x - center.x)), corners[c]};
    std::sort(corner_dir.begin(), corner_dir.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double arc_len[4];
    for (int c = 0; c < 4; ++c) {
        const double next = corner_dir[static_cast<std::size_t>((c + 1) % 4)].first;
        double d = next - corner_dir[static_cast<std::size_t>(c)].first;
        if (d <= 0.0) d += kTwoPi;
        arc_len[c] = d;
    }
    int arc_count[4];
    double frac[4];
    int assigned = 0;
    const int interior = n_base - 4 >= 0 ? n_base - 4 : 0;
    for (int c = 0; c < 4; ++c) {
        const double quota = interior * arc_len[c] / kTwoPi;
        arc_count[c] = static_cast<int>(std::floor(quota));
        frac[c] = quota - arc_count[c];
        assigned += arc_count[c];
    }
    for (int left = interior - assigned; left > 0; --left) {
        int best = 0;
        for (int c = 1; c < 4; ++c)
            if (frac[c] > frac[best]) best = c;
        ++arc_count[best];
        frac[best] = -1.0;
    }
    for (int c = 0; c < 4; ++c) ++arc_count[c]; // floor of one interior ray per arc

    std::vector<double> angles;
    std::vector<bool> is_corner;
    std::vector<Vec2> corner_pt;
    for (int c = 0; c < 4; ++c) {
        angles.push_back(corner_dir[static_cast<std::size_t>(c)].first);
        is_corner.push_back(true);
        corner_pt.push_back(corner_dir[static_cast<std::size_t>(c)].second);
        for (int i = 1; i <= arc_count[c]; ++i) {
            angles.push_back(wrap_angle(corner_dir[static_cast<std::size_t>(c)].first +
                                        arc_len[c] * i / (arc_count[c] + 1)));
            is_corner.push_back(false);
            corner_pt.push_back({0.0, 0.0});
        }
    }
    {
        // the last arc may wrap past 2*pi; keep the list ascending
        std::vector<std::size_t> order(angles.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });
        std::vector<double> sa;
        std::vector<bool> sc;
        std::vector<Vec2> sp;
        for (std::size_t k : order) {
            sa.push_back(angles[k]);
            sc.push_back(is_corner[k]);
            sp.push_back(corner_pt[k]);
        }
        angles = std::move(sa);
        is_corner = sc;
        corner_pt = std::move(sp);
    }
    const int n_c = static_cast<int>(angles.size());
    const double h_c = kTwoPi * R / n_base; // nominal interface spacing

    TriMesh mesh;
    mesh.vertices.push_back(center); // disk center, index 0

    // Concentric disk rings, vertex counts proportional to radius.
    const int n_r = std::max(1, static_cast<int>(std::lround(static_cast<double>(n_base) / kTwoPi)));
    std::vector<std::vector<int>> ring_idx;
    std::vector<std::vector<double>> ring_ang;
    ring_idx.push_back({0});
    ring_ang.push_back({0.0});
    for (int j = 1; j < n_r; ++j) {
        const double rj = R * j / n_r;
        const int nj = std::max(3, static_cast<int>(std::lround(static_cast<double>(n_base) * j / n_r)));
        std::vector<int> idx;
        std::vector<double> ang;
        for (int i = 0; i < nj; ++i) {
            const double a = kTwoPi * i / nj;
            idx.push_back(mesh.vertex_count());
            ang.push_back(a);
            mesh.vertices.push_back({center.x + rj * std::cos(a), center.y + rj * std::sin(a)});
        }
        ring_idx.push_back(std::move(idx));
        ring_ang.push_back(std::move(ang));
    }
    // Interface ring, exactly on the circle.
    std::vector<int> iface_idx;
    for (int i = 0; i < n_c; ++i) {
        iface_idx.push_back(mesh.vertex_count());
        const double a = angles[static_cast<std::size_t>(i)];
        mesh.vertices.push_back({center.x + R * std::cos(a), center.y + R * std::sin(a)});
    }
    ring_idx.push_back(iface_idx);
    ring_ang.push_back(angles);

    for (std::size_t j = 0; j + 1 < ring_idx.size(); ++j)
        stitch_rings(ring_idx[j + 1], ring_ang[j + 1], ring_idx[j], ring_ang[j], Region::IN,
                     mesh.triangles);

    // Blended layers from the interface to the box boundary, geometric
    // radial grading with the first layer matched to the interface spacing.
    std::vector<Vec2> box_pts(static_cast<std::size_t>(n_c));
    double mean_dist = 0.0;
    for (int i = 0; i < n_c; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        box_pts[si] = is_corner[si] ? corner_pt[si] : ray_box_hit(center, angles[si], H);
        mean_dist += (box_pts[si] - mesh.vertices[static_cast<std::size_t>(iface_idx[si])]).norm();
    }
    mean_dist /= n_c;

    const double grading = 1.15;
    const int n_l = std::max(
        1, static_cast<int>(std::ceil(std::log1p(mean_dist * (grading - 1.0) / h_c) / std::log(grading))));

    std::vector<int> prev = iface_idx;
    std::vector<int> outer_ring;
    const double denom = std::pow(grading, n_l) - 1.0;
    for (int j = 1; j <= n_l; ++j) {
        const double s = (j == n_l) ? 1.0 : (std::pow(grading, j) - 1.0) / denom;
        std::vector<int> layer;
        for (int i = 0; i < n_c; ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            const Vec2 a = mesh.vertices[static_cast<std::size_t>(iface_idx[si])];
            const Vec2 pt = (j == n_l) ? box_pts[si] : a + s * (box_pts[si] - a);
            layer.push_back(mesh.vertex_count());
            mesh.vertices.push_back(pt);
        }
        stitch_rings(layer, angles, prev, angles, Region::OUT, mesh.triangles, &mesh.vertices);
        prev = layer;
        if (j == n_l) outer_ring = layer;
    }

    for (int i = 0; i < n_c; ++i) {
        mesh.boundary_edges.push_back(
            {{iface_idx[static_cast<std::size_t>(i)], iface_idx[static_cast<std::size_t>((i + 1) % n_c)]},
             BoundaryMarker::INNER});
        mesh.boundary_edges.push_back(
            {{outer_ring[static_cast<std::size_t>(i)], outer_ring[static_cast<std::size_t>((i + 1) % n_c)]},
             BoundaryMarker::OUTER});
    }
    return mesh;
}

std::vector<Violation> validate_mesh(const TriMesh& mesh) {
    std::vector<Violation> out;
    const int nv = mesh.vertex_count();

    auto tri_name = [](int t) { return "triangle " + std::to_string(t); };
    auto edge_name = [](int a, int b) {
        return "edge (" + std::to_string(a) + "," + std::to_string(b) + ")";
    };

    bool indices_ok = true;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k)
            if (tri.v[static_cast<std::size_t>(k)] < 0 || tri.v[static_cast<std::size_t>(k)] >= nv) {
                out.push_back({"index-range", tri_name(t), "vertex index out of range"});
                indices_ok = false;
            }
        if (tri.v[0] == tri.v[1] || tri.v[1] == tri.v[2] || tri.v[0] == tri.v[2]) {
            out.push_back({"index-range", tri_name(t), "repeated vertex index"});
            indices_ok = false;
        }
    }
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& be = mesh.boundary_edges[e];
        if (be.v[0] < 0 || be.v[0] >= nv || be.v[1] < 0 || be.v[1] >= nv || be.v[0] == be.v[1]) {
            out.push_back({"index-range", "boundary edge " + std::to_string(e), "bad vertex index"});
            indices_ok = false;
        }
    }
    if (!indices_ok) return out;

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (!(mesh.triangle_area(t) > 0.0))
            out.push_back({"positive-orientation", tri_name(t),
                           "inverted element (signed area <= 0)"});
    }

    struct EdgeUse {
        int count = 0;
        int in_count = 0;
        int out_count = 0;
    };
    std::map<std::pair<int, int>, EdgeUse> edges;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            int a = tri.v[static_cast<std::size_t>(k)];
            int b = tri.v[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            auto& use = edges[{a, b}];
            ++use.count;
            if (tri.tag == Region::IN) ++use.in_count; else ++use.out_count;
        }
    }

    std::map<std::pair<int, int>, BoundaryMarker> marked;
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& be = mesh.boundary_edges[e];
        int a = be.v[0], b = be.v[1];
        if (a > b) std::swap(a, b);
        if (!marked.emplace(std::make_pair(a, b), be.marker).second)
            out.push_back({"conforming", "boundary edge " + std::to_string(e), "duplicate boundary entry"});
        if (edges.find({a, b}) == edges.end())
            out.push_back({"conforming", edge_name(a, b), "boundary entry is not a mesh edge"});
    }

    for (const auto& [key, use] : edges) {
        const auto it = marked.find(key);
        const bool inner = it != marked.end() && it->second == BoundaryMarker::INNER;
        const bool outer = it != marked.end() && it->second == BoundaryMarker::OUTER;
        if (use.count > 2) {
            out.push_back({"conforming", edge_name(key.first, key.second),
                           "shared by " + std::to_string(use.count) + " triangles"});
            continue;
        }
        if (use.count == 2) {
            const bool mixed = use.in_count == 1 && use.out_count == 1;
            if (mixed && !inner)
                out.push_back({"interface-pairing", edge_name(key.first, key.second),
                               "IN/OUT interface edge not marked INNER"});
            if (!mixed && inner)
                out.push_back({"interface-pairing", edge_name(key.first, key.second),
                               "INNER edge not shared by one IN and one OUT triangle"});
            if (outer)
                out.push_back({"outer-boundary", edge_name(key.first, key.second),
                               "OUTER edge shared by two triangles"});
        } else { // count == 1
            if (!outer)
                out.push_back({"outer-boundary", edge_name(key.first, key.second),
                               inner ? "INNER edge with a single triangle"
                                     : "boundary edge missing OUTER marker"});
            else if (use.out_count != 1)
                out.push_back({"outer-boundary", edge_name(key.first, key.second),
                               "OUTER edge belongs to an IN triangle"});
        }
    }

    // INNER edges must form one closed simple polyline.
    std::map<int, int> degree;
    int inner_edges = 0;
    for (const auto& be : mesh.boundary_edges) {
        if (be.marker != BoundaryMarker::INNER) continue;
        ++inner_edges;
        ++degree[be.v[0]];
        ++degree[be.v[1]];
    }
    if (inner_edges > 0) {
        bool degrees_ok = true;
        for (const auto& [v, d] : degree) {
            if (d != 2) {
                out.push_back({"inner-polyline", "vertex " + std::to_string(v),
                               "interface degree " + std::to_string(d) + ", expected 2"});
                degrees_ok = false;
            }
        }
        if (degrees_ok) {
            // Walk the undirected cycle from the lowest interface vertex.
            std::map<int, std::vector<int>> adj;
            for (const auto& be : mesh.boundary_edges)
                if (be.marker == BoundaryMarker::INNER) {
                    adj[be.v[0]].push_back(be.v[1]);
                    adj[be.v[1]].push_back(be.v[0]);
                }
            const int start = adj.begin()->first;
            int prev = -1, cur = start, steps = 0;
            do {
                const auto& nb = adj[cur];
                const int next = (nb[0] == prev) ? nb[1] : nb[0];
                prev = cur;
                cur = next;
                ++steps;
            } while (cur != start && steps <= inner_edges);
            if (steps != inner_edges)
                out.push_back({"inner-polyline", "interface",
                               "INNER edges form more than one closed loop"});
        }
    } else {
        out.push_back({"inner-polyline", "interface", "mesh has no INNER edges"});
    }

    return out;
}

QualityReport mesh_quality(const TriMesh& mesh, bool keep_per_triangle) {
    QualityReport rep;
    rep.min_quality = std::numeric_limits<double>::max();
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto p = mesh.triangle_points(t);
        const double q = triangle_quality(p[0], p[1], p[2]);
        if (keep_per_triangle) rep.per_triangle.push_back(q);
        if (q < rep.min_quality) {
            rep.min_quality = q;
            rep.worst_triangle = t;
        }
    }
    if (mesh.triangle_count() == 0) rep.min_quality = 0.0;
    return rep;
}

TriMesh displace(const TriMesh& mesh, const std::vector<Vec2>& field, double t) {
    if (field.size() != mesh.vertices.size())
        throw std::invalid_argument("displace: field must have one value per vertex");
    TriMesh out = mesh;
    for (std::size_t i = 0; i < out.vertices.size(); ++i) out.vertices[i] += t * field[i];
    return out;
}

Submesh extract_region(const TriMesh& mesh, Region tag) {
    Submesh sub;
    sub.from_parent.assign(mesh.vertices.size(), -1);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        if (tri.tag != tag) continue;
        Triangle st;
        st.tag = tag;
        for (int k = 0; k < 3; ++k) {
            const int pv = tri.v[static_cast<std::size_t>(k)];
            int& sv = sub.from_parent[static_cast<std::size_t>(pv)];
            if (sv < 0) {
                sv = sub.mesh.vertex_count();
                sub.mesh.vertices.push_back(mesh.vertices[static_cast<std::size_t>(pv)]);
                sub.to_parent.push_back(pv);
            }
            st.v[static_cast<std::size_t>(k)] = sv;
        }
        sub.mesh.triangles.push_back(st);
        sub.triangle_to_parent.push_back(t);
    }

    std::map<std::pair<int, int>, BoundaryMarker> parent_marks;
    for (const auto& be : mesh.boundary_edges) {
        int a = be.v[0], b = be.v[1];
        if (a > b) std::swap(a, b);
        parent_marks[{a, b}] = be.marker;
    }
    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : sub.mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = tri.v[static_cast<std::size_t>(k)];
            int b = tri.v[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            ++count[{a, b}];
        }
    for (const auto& [key, c] : count) {
        if (c != 1) continue;
        const int pa = sub.to_parent[static_cast<std::size_t>(key.first)];
        const int pb = sub.to_parent[static_cast<std::size_t>(key.second)];
        const auto it = parent_marks.find({std::min(pa, pb), std::max(pa, pb)});
        if (it == parent_marks.end())
            throw std::runtime_error("extract_region: submesh boundary edge without parent marker");
        sub.mesh.boundary_edges.push_back({{key.first, key.second}, it->second});
    }
    return sub;
}

namespace {

const char* region_name(Region r) { return r == Region::IN ? "IN" : "OUT"; }
const char* marker_name(BoundaryMarker m) { return m == BoundaryMarker::INNER ? "INNER" : "OUTER"; }

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error("mesh parse error at line " + std::to_string(line) + ": " + what);
}

} // namespace

void save_mesh(const TriMesh& mesh, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_mesh: cannot open " + path);
    f << "trimesh 1\n";
    f << "vertices " << mesh.vertex_count() << "\n";
    for (const auto& v : mesh.vertices) f << g17(v.x) << " " << g17(v.y) << "\n";
    f << "triangles " << mesh.triangle_count() << "\n";
    for (const auto& t : mesh.triangles)
        f << t.v[0] << " " << t.v[1] << " " << t.v[2] << " " << region_name(t.tag) << "\n";
    f << "boundary " << mesh.boundary_edges.size() << "\n";
    for (const auto& e : mesh.boundary_edges)
        f << e.v[0] << " " << e.v[1] << " " << marker_name(e.marker) << "\n";
    if (!f) throw std::runtime_error("save_mesh: write failed for " + path);
}

TriMesh load_mesh(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_mesh: cannot open " + path);

    int lineno = 0;
    std::string line;
    auto next_line = [&]() -> std::istringstream {
        if (!std::getline(f, line)) parse_fail(lineno + 1, "unexpected end of file");
        ++lineno;
        return std::istringstream(line);
    };

    {
        auto ls = next_line();
        std::string magic;
        int version = 0;
        if (!(ls >> magic >> version) || magic != "trimesh" || version != 1)
            parse_fail(lineno, "expected header 'trimesh 1'");
    }

    auto read_count = [&](const char* keyword) {
        auto ls = next_line();
        std::string kw;
        long n = -1;
        if (!(ls >> kw >> n) || kw != keyword || n < 0)
            parse_fail(lineno, std::string("expected '") + keyword + " N'");
        return n;
    };

    TriMesh mesh;
    const long nv = read_count("vertices");
    for (long i = 0; i < nv; ++i) {
        auto ls = next_line();
        double x, y;
        if (!(ls >> x >> y)) parse_fail(lineno, "expected vertex 'x y'");
        mesh.vertices.push_back({x, y});
    }
    const long nt = read_count("triangles");
    for (long i = 0; i < nt; ++i) {
        auto ls = next_line();
        int a, b, c;
        std::string tag;
        if (!(ls >> a >> b >> c >> tag)) parse_fail(lineno, "expected triangle 'i j k tag'");
        if (a < 0 || a >= nv || b < 0 || b >= nv || c < 0 || c >= nv)
            parse_fail(lineno, "triangle vertex index out of range");
        Region r;
        if (tag == "IN") r = Region::IN;
        else if (tag == "OUT") r = Region::OUT;
        else parse_fail(lineno, "unknown region tag '" + tag + "'");
        mesh.triangles.push_back({{a, b, c}, r});
    }
    const long nb = read_count("boundary");
    for (long i = 0; i < nb; ++i) {
        auto ls = next_line();
        int a, b;
        std::string mark;
        if (!(ls >> a >> b >> mark)) parse_fail(lineno, "expected boundary 'i j marker'");
        if (a < 0 || a >= nv || b < 0 || b >= nv)
            parse_fail(lineno, "boundary vertex index out of range");
        BoundaryMarker m;
        if (mark == "INNER") m = BoundaryMarker::INNER;
        else if (mark == "OUTER") m = BoundaryMarker::OUTER;
        else parse_fail(lineno, "unknown boundary marker '" + mark + "'");
        mesh.boundary_edges.push_back({{a, b}, m});
    }
    return mesh;
}

std::vector<int> inner_polyline(const TriMesh& mesh) {
    std::map<int, std::vector<int>> adj;
    for (const auto& be : mesh.boundary_edges)
        if (be.marker == BoundaryMarker::INNER) {
            adj[be.v[0]].push_back(be.v[1]);
            adj[be.v[1]].push_back(be.v[0]);
        }
    if (adj.empty()) throw std::runtime_error("inner_polyline: mesh has no INNER edges");
    std::vector<int> loop;
    const int start = adj.begin()->first;
    int prev = -1, cur = start;
    do {
        loop.push_back(cur);
        const auto it = adj.find(cur);
        if (it == adj.end() || it->second.size() != 2)
            throw std::runtime_error("inner_polyline: interface is not a simple closed loop");
        const int next = (it->second[0] == prev) ? it->second[1] : it->second[0];
        prev = cur;
        cur = next;
    } while (cur != start && loop.size() <= adj.size());
    if (cur != start || loop.size() != adj.size())
        throw std::runtime_error("inner_polyline: interface is not a single closed loop");
    return loop;
}

std::vector<int> boundary_vertices(const TriMesh& mesh, BoundaryMarker marker) {
    std::set<int> s;
    for (const auto& be : mesh.boundary_edges)
        if (be.marker == marker) {
            s.insert(be.v[0]);
            s.insert(be.v[1]);
        }
    return {s.begin(), s.end()};
}

} // namespace shapegrad
