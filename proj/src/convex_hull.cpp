#include "chordflow/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include <Eigen/Geometry>

namespace chordflow {

namespace {

struct Face {
    std::array<int, 3> v;
    std::array<int, 3> nbr;  // neighbor across edge (v[k], v[(k+1)%3])
    Eigen::Vector3d n;
    double d = 0.0;
    bool alive = true;
    std::vector<int> conflicts;
};

void compute_plane(Face& f, const std::vector<Eigen::Vector3d>& p) {
    const Eigen::Vector3d a = p[f.v[0]], b = p[f.v[1]], c = p[f.v[2]];
    f.n = (b - a).cross(c - a);
    const double len = f.n.norm();
    if (len < 1e-300) throw GeometryError("degenerate hull facet");
    f.n /= len;
    f.d = f.n.dot(a);
}

}  // namespace

std::vector<HullFacet> convex_hull_3d(const std::vector<Eigen::Vector3d>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw GeometryError("convex_hull_3d needs at least 4 points");

    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double eps = std::max(1e-12, 1e-12 * scale);

    // initial simplex: spread points
    int i0 = 0, i1 = 0;
    for (int i = 1; i < n; ++i) {
        if (pts[i].x() < pts[i0].x()) i0 = i;
        if (pts[i].x() > pts[i1].x()) i1 = i;
    }
    if (i0 == i1) i1 = (i0 + 1) % n;
    int i2 = -1;
    double best = eps;
    for (int i = 0; i < n; ++i) {
        const double d = (pts[i] - pts[i0]).cross(pts[i1] - pts[i0]).norm();
        if (d > best) {
            best = d;
            i2 = i;
        }
    }
    if (i2 < 0) throw GeometryError("convex_hull_3d: collinear input");
    Eigen::Vector3d pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
    int i3 = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(pn.dot(pts[i] - pts[i0]));
        if (d > best) {
            best = d;
            i3 = i;
        }
    }
    if (i3 < 0) throw GeometryError("convex_hull_3d: coplanar input");

    const Eigen::Vector3d centroid = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);

    std::deque<Face> faces;
    auto add_face = [&](int a, int b, int c) {
        Face f;
        f.v = {a, b, c};
        f.nbr = {-1, -1, -1};
        compute_plane(f, pts);
        if (f.n.dot(centroid) > f.d) {  // orient outward
            std::swap(f.v[1], f.v[2]);
            compute_plane(f, pts);
        }
        faces.push_back(std::move(f));
        return static_cast<int>(faces.size()) - 1;
    };

    add_face(i0, i1, i2);
    add_face(i0, i1, i3);
    add_face(i0, i2, i3);
    add_face(i1, i2, i3);

    auto link_all = [&](const std::vector<int>& ids) {
        std::map<std::pair<int, int>, std::pair<int, int>> edges;  // (a,b) -> (face, slot)
        for (int fi : ids) {
            Face& f = faces[fi];
            for (int k = 0; k < 3; ++k) {
                const int a = f.v[k], b = f.v[(k + 1) % 3];
                edges[{a, b}] = {fi, k};
            }
        }
        for (auto& [e, fs] : edges) {
            auto it = edges.find({e.second, e.first});
            if (it != edges.end()) faces[fs.first].nbr[fs.second] = it->second.first;
        }
    };
    link_all({0, 1, 2, 3});

    auto visible = [&](const Face& f, int p) { return f.n.dot(pts[p]) - f.d > eps; };

    std::deque<int> pending;
    for (int i = 0; i < n; ++i) {
        if (i == i0 || i == i1 || i == i2 || i == i3) continue;
        for (int fi = 0; fi < 4; ++fi) {
            if (visible(faces[fi], i)) {
                faces[fi].conflicts.push_back(i);
                break;
            }
        }
    }
    for (int fi = 0; fi < 4; ++fi)
        if (!faces[fi].conflicts.empty()) pending.push_back(fi);

    while (!pending.empty()) {
        const int fi = pending.front();
        pending.pop_front();
        Face& f0 = faces[fi];
        if (!f0.alive || f0.conflicts.empty()) continue;

        int apex = f0.conflicts[0];
        double dmax = f0.n.dot(pts[apex]) - f0.d;
        for (int p : f0.conflicts) {
            const double d = f0.n.dot(pts[p]) - f0.d;
            if (d > dmax) {
                dmax = d;
                apex = p;
            }
        }

        // gather visible region by BFS over neighbors
        std::vector<int> vis;
        std::vector<char> seen(faces.size(), 0);
        std::deque<int> bfs{fi};
        seen[fi] = 1;
        while (!bfs.empty()) {
            const int g = bfs.front();
            bfs.pop_front();
            if (!faces[g].alive || !visible(faces[g], apex)) continue;
            vis.push_back(g);
            for (int k = 0; k < 3; ++k) {
                const int nb = faces[g].nbr[k];
                if (nb >= 0 && !seen[nb]) {
                    seen[nb] = 1;
                    bfs.push_back(nb);
                }
            }
        }
        std::vector<char> is_vis(faces.size(), 0);
        for (int g : vis) is_vis[g] = 1;

        // horizon edges, oriented as in the visible face
        struct Horizon {
            int a, b, outside;
        };
        std::vector<Horizon> horizon;
        std::vector<int> orphan;
        for (int g : vis) {
            Face& fg = faces[g];
            for (int k = 0; k < 3; ++k) {
                const int nb = fg.nbr[k];
                if (nb < 0 || !is_vis[nb]) horizon.push_back({fg.v[k], fg.v[(k + 1) % 3], nb});
            }
            orphan.insert(orphan.end(), fg.conflicts.begin(), fg.conflicts.end());
            fg.alive = false;
            fg.conflicts.clear();
        }

        std::vector<int> fresh;
        std::map<std::pair<int, int>, std::pair<int, int>> rim;  // edge -> (face, slot)
        for (const Horizon& hz : horizon) {
            const int nf = add_face(hz.a, hz.b, apex);
            Face& f = faces[nf];
            fresh.push_back(nf);
            // locate the (a,b) slot after possible orientation flip
            for (int k = 0; k < 3; ++k) {
                const int a = f.v[k], b = f.v[(k + 1) % 3];
                if ((a == hz.a && b == hz.b) || (a == hz.b && b == hz.a)) {
                    f.nbr[k] = hz.outside;
                    if (hz.outside >= 0) {
                        Face& of = faces[hz.outside];
                        for (int j = 0; j < 3; ++j) {
                            const int oa = of.v[j], ob = of.v[(j + 1) % 3];
                            if ((oa == a && ob == b) || (oa == b && ob == a)) of.nbr[j] = nf;
                        }
                    }
                } else {
                    rim[{a, b}] = {nf, k};
                }
            }
        }
        for (auto& [e, fs] : rim) {
            auto it = rim.find({e.second, e.first});
            if (it != rim.end()) faces[fs.first].nbr[fs.second] = it->second.first;
        }

        for (int p : orphan) {
            if (p == apex) continue;
            for (int nf : fresh) {
                if (visible(faces[nf], p)) {
                    faces[nf].conflicts.push_back(p);
                    break;
                }
            }
        }
        for (int nf : fresh)
            if (!faces[nf].conflicts.empty()) pending.push_back(nf);
    }

    std::vector<HullFacet> out;
    for (const Face& f : faces) {
        if (!f.alive) continue;
        out.push_back({f.v, f.n, f.d});
    }
    return out;
}

std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector3d>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 3) throw GeometryError("convex_hull_2d needs at least 3 points");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
        return pts[a].y() < pts[b].y();
    });
    auto cross = [&](int o, int a, int b) {
        return (pts[a].x() - pts[o].x()) * (pts[b].y() - pts[o].y()) -
               (pts[a].y() - pts[o].y()) * (pts[b].x() - pts[o].x());
    };
    std::vector<int> h(2 * n);
    int k = 0;
    for (int ii = 0; ii < n; ++ii) {
        const int i = idx[ii];
        while (k >= 2 && cross(h[k - 2], h[k - 1], i) <= 0) --k;
        h[k++] = i;
    }
    const int lower = k + 1;
    for (int ii = n - 2; ii >= 0; --ii) {
        const int i = idx[ii];
        while (k >= lower && cross(h[k - 2], h[k - 1], i) <= 0) --k;
        h[k++] = i;
    }
    h.resize(k - 1);
    if (h.size() < 3) throw GeometryError("convex_hull_2d: collinear input");
    return h;
}

}  // namespace chordflow
