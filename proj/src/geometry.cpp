#include "dplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "dplab/errors.hpp"
#include "dplab/rng.hpp"
#include "dplab/union_find.hpp"

namespace dplab {

namespace {

constexpr int kSupersample = 32;

int wrap(int i, int n) { return ((i % n) + n) % n; }

int floor_div(int i, int n) { return (i >= 0) ? i / n : -((-i + n - 1) / n); }

struct Box {
    Vec2 lo;
    Vec2 hi;
};

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = (len2 > 0.0) ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

double point_box_distance(Vec2 p, const Box& box) {
    const double dx = std::max({box.lo.x - p.x, 0.0, p.x - box.hi.x});
    const double dy = std::max({box.lo.y - p.y, 0.0, p.y - box.hi.y});
    return std::hypot(dx, dy);
}

bool segment_hits_box(Vec2 a, Vec2 b, const Box& box) {
    // Liang-Barsky clipping.
    double t0 = 0.0;
    double t1 = 1.0;
    const Vec2 dir = b - a;
    const double p[4] = {-dir.x, dir.x, -dir.y, dir.y};
    const double q[4] = {a.x - box.lo.x, box.hi.x - a.x, a.y - box.lo.y, box.hi.y - a.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return false;
        } else {
            const double t = q[k] / p[k];
            if (p[k] < 0.0) t0 = std::max(t0, t);
            else t1 = std::min(t1, t);
            if (t0 > t1) return false;
        }
    }
    return true;
}

double segment_box_distance(Vec2 a, Vec2 b, const Box& box) {
    if (segment_hits_box(a, b, box)) return 0.0;
    const Vec2 corners[4] = {box.lo, {box.hi.x, box.lo.y}, box.hi, {box.lo.x, box.hi.y}};
    double best = std::min(point_box_distance(a, box), point_box_distance(b, box));
    for (const Vec2& c : corners) best = std::min(best, point_segment_distance(c, a, b));
    return best;
}

/// Signed box distance: negative when the interiors overlap.
double box_box_distance(const Box& p, const Box& q) {
    const double gx = std::max(p.lo.x - q.hi.x, q.lo.x - p.hi.x);
    const double gy = std::max(p.lo.y - q.hi.y, q.lo.y - p.hi.y);
    if (gx < 0.0 && gy < 0.0) return std::max(gx, gy);
    return std::hypot(std::max(gx, 0.0), std::max(gy, 0.0));
}

Box cell_box(const CellCluster& c, const std::array<int, 2>& cell, Vec2 off, int dim) {
    const double s = c.cell_size;
    Box b{{cell[0] * s + off.x, cell[1] * s + off.y}, {(cell[0] + 1) * s + off.x, (cell[1] + 1) * s + off.y}};
    if (dim == 1) {
        b.lo.y = 0.0;
        b.hi.y = 0.0;
    }
    return b;
}

Box bounding_box(const Shape& s, int dim) {
    Box b;
    if (const auto* d = std::get_if<Disc>(&s)) {
        b = {{d->center.x - d->radius, d->center.y - d->radius}, {d->center.x + d->radius, d->center.y + d->radius}};
    } else if (const auto* c = std::get_if<Capsule>(&s)) {
        b = {{std::min(c->a.x, c->b.x) - c->width, std::min(c->a.y, c->b.y) - c->width},
             {std::max(c->a.x, c->b.x) + c->width, std::max(c->a.y, c->b.y) + c->width}};
    } else {
        const auto& cl = std::get<CellCluster>(s);
        b = {{1e300, 1e300}, {-1e300, -1e300}};
        for (const auto& cell : cl.cells) {
            const Box cb = cell_box(cl, cell, {}, 2);
            b.lo.x = std::min(b.lo.x, cb.lo.x);
            b.lo.y = std::min(b.lo.y, cb.lo.y);
            b.hi.x = std::max(b.hi.x, cb.hi.x);
            b.hi.y = std::max(b.hi.y, cb.hi.y);
        }
    }
    if (dim == 1) {
        b.lo.y = 0.0;
        b.hi.y = 0.0;
    }
    return b;
}

Vec2 translate_point(Vec2 p, Vec2 off) { return p + off; }

/// Distance between `a` and `b` translated by `off`.
double distance_with_offset(const Shape& a, const Shape& b, Vec2 off, int dim) {
    if (std::holds_alternative<CellCluster>(a) && !std::holds_alternative<CellCluster>(b)) {
        return distance_with_offset(b, a, -1.0 * off, dim);
    }
    if (std::holds_alternative<Capsule>(a) && std::holds_alternative<Disc>(b)) {
        return distance_with_offset(b, a, -1.0 * off, dim);
    }
    if (const auto* da = std::get_if<Disc>(&a)) {
        if (const auto* db = std::get_if<Disc>(&b)) {
            return norm(da->center - translate_point(db->center, off)) - da->radius - db->radius;
        }
        if (const auto* cb = std::get_if<Capsule>(&b)) {
            return point_segment_distance(da->center, cb->a + off, cb->b + off) - da->radius - cb->width;
        }
        const auto& clb = std::get<CellCluster>(b);
        double best = 1e300;
        for (const auto& cell : clb.cells) {
            best = std::min(best, point_box_distance(da->center, cell_box(clb, cell, off, dim)));
        }
        return best - da->radius;
    }
    if (const auto* ca = std::get_if<Capsule>(&a)) {
        if (const auto* cb = std::get_if<Capsule>(&b)) {
            return segment_segment_distance(ca->a, ca->b, cb->a + off, cb->b + off) - ca->width - cb->width;
        }
        const auto& clb = std::get<CellCluster>(b);
        double best = 1e300;
        for (const auto& cell : clb.cells) {
            best = std::min(best, segment_box_distance(ca->a, ca->b, cell_box(clb, cell, off, dim)));
        }
        return best - ca->width;
    }
    const auto& cla = std::get<CellCluster>(a);
    const auto& clb = std::get<CellCluster>(b);
    double best = 1e300;
    for (const auto& p : cla.cells) {
        const Box pb = cell_box(cla, p, {}, dim);
        for (const auto& q : clb.cells) best = std::min(best, box_box_distance(pb, cell_box(clb, q, off, dim)));
    }
    return best;
}

std::vector<Vec2> lattice_shifts(int dim, double period, int reach) {
    std::vector<Vec2> shifts;
    for (int j = (dim == 2 ? -reach : 0); j <= (dim == 2 ? reach : 0); ++j) {
        for (int i = -reach; i <= reach; ++i) shifts.push_back({i * period, j * period});
    }
    return shifts;
}

bool all_clusters(const InclusionSet& set) {
    return !set.inclusions.empty() && std::all_of(set.inclusions.begin(), set.inclusions.end(), [](const Inclusion& inc) {
        return std::holds_alternative<CellCluster>(inc.shape);
    });
}

bool cluster_edge_connected(const CellCluster& c) {
    if (c.cells.empty()) return false;
    std::set<std::array<int, 2>> remaining(c.cells.begin(), c.cells.end());
    std::deque<std::array<int, 2>> queue{*remaining.begin()};
    remaining.erase(remaining.begin());
    while (!queue.empty()) {
        const auto cur = queue.front();
        queue.pop_front();
        const std::array<int, 2> nbrs[4] = {
            {cur[0] + 1, cur[1]}, {cur[0] - 1, cur[1]}, {cur[0], cur[1] + 1}, {cur[0], cur[1] - 1}};
        for (const auto& nb : nbrs) {
            if (auto it = remaining.find(nb); it != remaining.end()) {
                queue.push_back(nb);
                remaining.erase(it);
            }
        }
    }
    return remaining.empty();
}

/// Lattice-window nearest-distance scan for sets made of clusters on one integer lattice.
std::vector<double> cluster_nearest_distances(const InclusionSet& set) {
    const auto& first = std::get<CellCluster>(set.inclusions.front().shape);
    const double cs = first.cell_size;
    const int L = static_cast<int>(std::lround(set.period / cs));
    std::vector<std::int32_t> owner(static_cast<std::size_t>(L) * L, -1);
    for (std::size_t k = 0; k < set.inclusions.size(); ++k) {
        for (const auto& c : std::get<CellCluster>(set.inclusions[k].shape).cells) {
            owner[static_cast<std::size_t>(wrap(c[1], L)) * L + wrap(c[0], L)] = static_cast<std::int32_t>(k);
        }
    }
    std::vector<double> rho(set.inclusions.size(), 1e300);
    for (std::size_t k = 0; k < set.inclusions.size(); ++k) {
        double best = 1e300;
        for (const auto& c : std::get<CellCluster>(set.inclusions[k].shape).cells) {
            for (int r = 1; r <= L / 2; ++r) {
                if (r - 1 >= best / cs) break;
                for (int dy = -r; dy <= r; ++dy) {
                    for (int dx = -r; dx <= r; ++dx) {
                        if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
                        const auto o = owner[static_cast<std::size_t>(wrap(c[1] + dy, L)) * L + wrap(c[0] + dx, L)];
                        if (o < 0 || o == static_cast<std::int32_t>(k)) continue;
                        const double gx = std::max(std::abs(dx) - 1, 0);
                        const double gy = std::max(std::abs(dy) - 1, 0);
                        best = std::min(best, cs * std::hypot(gx, gy));
                    }
                }
            }
        }
        rho[k] = best;
    }
    return rho;
}

double boundary_distance(const Shape& s, double box, int dim) {
    const Box b = bounding_box(s, dim);
    double d = std::min(b.lo.x, box - b.hi.x);
    if (dim == 2) d = std::min({d, b.lo.y, box - b.hi.y});
    return d;
}

InclusionSet make_set(int dim, double period, std::uint64_t seed, GeometryModel model) {
    if (dim != 1 && dim != 2) throw GeometryError("dimension must be 1 or 2");
    if (!(period > 0.0)) throw GeometryError("period must be positive");
    InclusionSet set;
    set.dim = dim;
    set.period = period;
    set.seed = seed;
    set.model = model;
    return set;
}

}  // namespace

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

std::string to_string(GeometryModel model) {
    switch (model) {
        case GeometryModel::PeriodicLattice: return "periodic_lattice";
        case GeometryModel::HardDiscsRSA: return "hard_discs_rsa";
        case GeometryModel::PoissonHalfGap: return "poisson_halfgap";
        case GeometryModel::ChessPercolation: return "chess_percolation";
        case GeometryModel::Custom: return "custom";
    }
    return "custom";
}

GeometryModel geometry_model_from_string(const std::string& name) {
    if (name == "periodic_lattice" || name == "lattice") return GeometryModel::PeriodicLattice;
    if (name == "hard_discs_rsa" || name == "rsa") return GeometryModel::HardDiscsRSA;
    if (name == "poisson_halfgap" || name == "poisson") return GeometryModel::PoissonHalfGap;
    if (name == "chess_percolation" || name == "chess") return GeometryModel::ChessPercolation;
    if (name == "custom") return GeometryModel::Custom;
    throw GeometryError("unknown geometry model '" + name + "'");
}

std::size_t IndicatorGrid::count() const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

double IndicatorGrid::volume_fraction() const {
    return cells.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(cells.size());
}

double shape_distance(const Shape& a, const Shape& b, int dim, std::optional<double> period) {
    if (!period) return distance_with_offset(a, b, {}, dim);
    double best = 1e300;
    for (const Vec2& off : lattice_shifts(dim, *period, 2)) best = std::min(best, distance_with_offset(a, b, off, dim));
    return best;
}

double shape_diameter(const Shape& s) {
    if (const auto* d = std::get_if<Disc>(&s)) return 2.0 * d->radius;
    if (const auto* c = std::get_if<Capsule>(&s)) return norm(c->b - c->a) + 2.0 * c->width;
    const auto& cl = std::get<CellCluster>(s);
    int best2 = 0;
    for (std::size_t p = 0; p < cl.cells.size(); ++p) {
        for (std::size_t q = p; q < cl.cells.size(); ++q) {
            const int dx = std::abs(cl.cells[p][0] - cl.cells[q][0]) + 1;
            const int dy = std::abs(cl.cells[p][1] - cl.cells[q][1]) + 1;
            best2 = std::max(best2, dx * dx + dy * dy);
        }
    }
    return cl.cell_size * std::sqrt(static_cast<double>(best2));
}

std::array<Vec2, 2> shape_bounds(const Shape& s, int dim) {
    const Box b = bounding_box(s, dim);
    return {b.lo, b.hi};
}

bool shape_contains(const Shape& s, Vec2 p, int dim) {
    if (const auto* d = std::get_if<Disc>(&s)) {
        if (dim == 1) return std::abs(p.x - d->center.x) < d->radius;
        return norm(p - d->center) < d->radius;
    }
    if (const auto* c = std::get_if<Capsule>(&s)) return point_segment_distance(p, c->a, c->b) < c->width;
    const auto& cl = std::get<CellCluster>(s);
    const int i = static_cast<int>(std::floor(p.x / cl.cell_size));
    const int j = (dim == 2) ? static_cast<int>(std::floor(p.y / cl.cell_size)) : 0;
    return std::find(cl.cells.begin(), cl.cells.end(), std::array<int, 2>{i, j}) != cl.cells.end();
}

void check_inclusion_set(const InclusionSet& set) {
    const double tol = 1e-12 * set.period;
    std::optional<double> period;
    if (set.periodic) period = set.period;
    for (const auto& inc : set.inclusions) {
        if (const auto* d = std::get_if<Disc>(&inc.shape)) {
            if (!(d->radius > 0.0)) throw GeometryError("disc radius must be positive");
        } else if (const auto* c = std::get_if<Capsule>(&inc.shape)) {
            if (set.dim != 2) throw GeometryError("capsules require dim = 2");
            if (!(c->width > 0.0)) throw GeometryError("capsule width must be positive");
        } else {
            const auto& cl = std::get<CellCluster>(inc.shape);
            if (!cluster_edge_connected(cl)) throw GeometryError("cell cluster is not edge-connected");
        }
        const double diam = shape_diameter(inc.shape);
        if (set.periodic) {
            if (diam >= set.period) throw GeometryError("inclusion does not fit in the fundamental cell");
            for (const Vec2& off : lattice_shifts(set.dim, set.period, 1)) {
                if (off.x == 0.0 && off.y == 0.0) continue;
                if (distance_with_offset(inc.shape, inc.shape, off, set.dim) < -tol) {
                    throw GeometryError("inclusion overlaps its own periodic image");
                }
            }
        } else if (boundary_distance(inc.shape, set.period, set.dim) < -tol) {
            throw GeometryError("inclusion leaves the bounding box");
        }
    }
    if (all_clusters(set)) {
        const double cs = std::get<CellCluster>(set.inclusions.front().shape).cell_size;
        const int L = static_cast<int>(std::lround(set.period / cs));
        std::set<std::array<int, 2>> seen;
        for (const auto& inc : set.inclusions) {
            for (const auto& c : std::get<CellCluster>(inc.shape).cells) {
                const std::array<int, 2> key = set.periodic ? std::array<int, 2>{wrap(c[0], L), wrap(c[1], L)} : c;
                if (!seen.insert(key).second) throw GeometryError("cell clusters overlap");
            }
        }
        return;
    }
    for (std::size_t p = 0; p < set.inclusions.size(); ++p) {
        for (std::size_t q = p + 1; q < set.inclusions.size(); ++q) {
            if (shape_distance(set.inclusions[p].shape, set.inclusions[q].shape, set.dim, period) < -tol) {
                throw GeometryError("inclusions " + std::to_string(set.inclusions[p].id) + " and " +
                                    std::to_string(set.inclusions[q].id) + " overlap");
            }
        }
    }
}

InclusionSet sample_periodic_lattice(double radius, double period, int dim) {
    InclusionSet set = make_set(dim, period, 0, GeometryModel::PeriodicLattice);
    if (!(radius > 0.0)) throw GeometryError("lattice radius must be positive");
    if (radius >= 0.5 * period) throw GeometryError("lattice radius must be below period/2 (inclusions would overlap)");
    const Vec2 center{0.5 * period, dim == 2 ? 0.5 * period : 0.0};
    set.inclusions.push_back({Disc{center, radius}, 0});
    return set;
}

InclusionSet sample_hard_discs_rsa(const RsaParams& params) {
    InclusionSet set = make_set(params.dim, params.period, params.seed, GeometryModel::HardDiscsRSA);
    if (params.margin < 0.0) throw GeometryError("separation margin must be non-negative");
    if (!(params.radii.r_min > 0.0) || params.radii.r_max < params.radii.r_min) {
        throw GeometryError("radius law must have 0 < r_min <= r_max");
    }
    const int target = params.target_count.value_or(
        static_cast<int>(std::llround(params.intensity * std::pow(params.period, params.dim))));
    if (target < 0) throw GeometryError("target count must be non-negative");
    const long budget = 64L * target;
    Random rng(params.seed);
    long rejections = 0;
    std::vector<Disc> discs;
    const auto shifts = lattice_shifts(params.dim, params.period, 1);
    while (static_cast<int>(discs.size()) < target && rejections < budget) {
        Disc cand;
        cand.center.x = rng.uniform(0.0, params.period);
        cand.center.y = params.dim == 2 ? rng.uniform(0.0, params.period) : 0.0;
        cand.radius = params.radii.r_min == params.radii.r_max ? params.radii.r_min
                                                               : rng.uniform(params.radii.r_min, params.radii.r_max);
        bool ok = params.period - 2.0 * cand.radius >= params.margin * cand.radius;
        for (const Disc& other : discs) {
            if (!ok) break;
            const double need = params.margin * std::max(cand.radius, other.radius);
            for (const Vec2& off : shifts) {
                const double gap = norm(cand.center - (other.center + off)) - cand.radius - other.radius;
                if (gap < need) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) discs.push_back(cand);
        else ++rejections;
    }
    for (std::size_t k = 0; k < discs.size(); ++k) set.inclusions.push_back({discs[k], static_cast<int>(k)});
    set.saturated = static_cast<int>(discs.size()) < target;
    if (set.saturated) {
        set.warnings.push_back("RSA saturated: placed " + std::to_string(discs.size()) + " of " +
                               std::to_string(target) + " inclusions");
    }
    return set;
}

InclusionSet poisson_halfgap_from_points(std::span<const Vec2> points, double period, int dim) {
    InclusionSet set = make_set(dim, period, 0, GeometryModel::PoissonHalfGap);
    if (points.size() < 2) throw GeometryError("half-gap radii need at least two points");
    const auto shifts = lattice_shifts(dim, period, 1);
    for (std::size_t n = 0; n < points.size(); ++n) {
        double nearest = 1e300;
        for (std::size_t m = 0; m < points.size(); ++m) {
            for (const Vec2& off : shifts) {
                if (m == n && off.x == 0.0 && off.y == 0.0) continue;
                nearest = std::min(nearest, norm(points[n] - (points[m] + off)));
            }
        }
        if (!(nearest > 0.0)) throw GeometryError("coincident Poisson points");
        Vec2 c = points[n];
        if (dim == 1) c.y = 0.0;
        set.inclusions.push_back({Disc{c, 0.5 * nearest}, static_cast<int>(n)});
    }
    return set;
}

InclusionSet sample_poisson_halfgap(double intensity, double period, std::uint64_t seed, int dim) {
    if (!(intensity > 0.0)) throw GeometryError("Poisson intensity must be positive");
    Random rng(seed);
    const auto count = rng.poisson(intensity * std::pow(period, dim));
    std::vector<Vec2> pts;
    for (std::int64_t k = 0; k < count; ++k) {
        Vec2 p;
        p.x = rng.uniform(0.0, period);
        p.y = dim == 2 ? rng.uniform(0.0, period) : 0.0;
        pts.push_back(p);
    }
    if (pts.size() < 2) {
        throw GeometryError("Poisson sample has " + std::to_string(pts.size()) + " points; radii undefined");
    }
    InclusionSet set = poisson_halfgap_from_points(pts, period, dim);
    set.seed = seed;
    return set;
}

InclusionSet chess_from_pattern(std::span<const std::uint8_t> black, int lattice_size) {
    const int L = lattice_size;
    if (L < 2 || black.size() != static_cast<std::size_t>(L) * L) throw GeometryError("chess pattern size mismatch");
    InclusionSet set = make_set(2, static_cast<double>(L), 0, GeometryModel::ChessPercolation);
    const auto idx = [L](int i, int j) { return static_cast<std::size_t>(wrap(j, L)) * L + wrap(i, L); };

    // White clusters.
    UnionFind uf(black.size());
    for (int j = 0; j < L; ++j) {
        for (int i = 0; i < L; ++i) {
            if (black[idx(i, j)]) continue;
            if (!black[idx(i + 1, j)]) uf.unite(idx(i, j), idx(i + 1, j));
            if (!black[idx(i, j + 1)]) uf.unite(idx(i, j), idx(i, j + 1));
        }
    }
    std::size_t largest_root = black.size();
    std::size_t largest = 0;
    for (std::size_t c = 0; c < black.size(); ++c) {
        if (black[c]) continue;
        const std::size_t r = uf.find(c);
        const std::size_t sz = uf.component_size(r);
        if (sz > largest || (sz == largest && r < largest_root)) {
            largest = sz;
            largest_root = r;
        }
    }
    if (largest == 0) throw ResampleSignal("chess sample has no white cells");

    // Winding of the largest white cluster: unwrap by BFS and look for inconsistent revisits.
    std::vector<std::array<int, 2>> unwrapped(black.size(), {0, 0});
    std::vector<std::uint8_t> seen(black.size(), 0);
    bool wraps_x = false;
    bool wraps_y = false;
    {
        const std::size_t start = largest_root;
        std::deque<std::size_t> queue{start};
        seen[start] = 1;
        unwrapped[start] = {static_cast<int>(start % L), static_cast<int>(start / L)};
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            const auto u = unwrapped[cur];
            const std::array<int, 2> steps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (const auto& st : steps) {
                const std::array<int, 2> v{u[0] + st[0], u[1] + st[1]};
                const std::size_t nb = idx(v[0], v[1]);
                if (black[nb]) continue;
                if (!seen[nb]) {
                    seen[nb] = 1;
                    unwrapped[nb] = v;
                    queue.push_back(nb);
                } else {
                    if (unwrapped[nb][0] != v[0]) wraps_x = true;
                    if (unwrapped[nb][1] != v[1]) wraps_y = true;
                }
            }
        }
    }
    if (!(wraps_x && wraps_y)) throw ResampleSignal("no spanning white cluster on the chess lattice");

    // F = complement of the spanning white cluster; its edge-connected components.
    std::vector<std::uint8_t> in_f(black.size(), 0);
    for (std::size_t c = 0; c < black.size(); ++c) in_f[c] = (black[c] || uf.find(c) != uf.find(largest_root)) ? 1 : 0;
    std::vector<std::uint8_t> done(black.size(), 0);
    int next_id = 0;
    for (std::size_t c0 = 0; c0 < black.size(); ++c0) {
        if (!in_f[c0] || done[c0]) continue;
        CellCluster cluster;
        std::map<std::size_t, std::array<int, 2>> pos;
        std::deque<std::size_t> queue{c0};
        done[c0] = 1;
        pos[c0] = {static_cast<int>(c0 % L), static_cast<int>(c0 / L)};
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            const auto u = pos[cur];
            cluster.cells.push_back(u);
            const std::array<int, 2> steps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (const auto& st : steps) {
                const std::array<int, 2> v{u[0] + st[0], u[1] + st[1]};
                const std::size_t nb = idx(v[0], v[1]);
                if (!in_f[nb]) continue;
                if (!done[nb]) {
                    done[nb] = 1;
                    pos[nb] = v;
                    queue.push_back(nb);
                } else if (pos[nb] != v) {
                    throw ResampleSignal("an inclusion cluster wraps around the torus");
                }
            }
        }
        // Normalize so the lower-left corner lies in the fundamental cell.
        int mi = 1 << 30;
        int mj = 1 << 30;
        for (const auto& c : cluster.cells) {
            mi = std::min(mi, c[0]);
            mj = std::min(mj, c[1]);
        }
        const int si = wrap(mi, L) - mi;
        const int sj = wrap(mj, L) - mj;
        for (auto& c : cluster.cells) {
            c[0] += si;
            c[1] += sj;
        }
        std::sort(cluster.cells.begin(), cluster.cells.end(),
                  [](const auto& a, const auto& b) { return a[1] != b[1] ? a[1] < b[1] : a[0] < b[0]; });
        set.inclusions.push_back({std::move(cluster), next_id++});
    }
    return set;
}

InclusionSet sample_chess_percolation(double mu, int lattice_size, std::uint64_t seed) {
    if (!(mu >= 0.0 && mu < 1.0)) throw GeometryError("chess probability must lie in [0, 1)");
    Random rng(seed);
    std::vector<std::uint8_t> black(static_cast<std::size_t>(lattice_size) * lattice_size, 0);
    for (auto& b : black) b = rng.bernoulli(mu) ? 1 : 0;
    InclusionSet set = chess_from_pattern(black, lattice_size);
    set.seed = seed;
    if (mu >= 0.41) {
        set.warnings.push_back("mu = " + std::to_string(mu) + " is not below the critical value 0.41");
    }
    return set;
}

IndicatorGrid rasterize(const InclusionSet& set, int resolution, RasterRule rule) {
    return rasterize(set, resolution, rule, nullptr);
}

namespace {

IndicatorGrid rasterize_raw(const InclusionSet& set, int resolution, RasterRule rule, LabelGrid* labels) {
    if (resolution < 4) throw GeometryError("resolution must be at least 4");
    const int n = resolution;
    const int dim = set.dim;
    const std::size_t total = dim == 2 ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n);
    IndicatorGrid grid;
    grid.dim = dim;
    grid.n = n;
    grid.period = set.period;
    grid.periodic = set.periodic;
    grid.cells.assign(total, 0);
    grid.model = set.model;
    grid.seed = set.seed;
    grid.inclusion_count = set.inclusions.size();
    std::vector<double> best(total, 0.0);
    if (labels) {
        labels->label.assign(total, -1);
        labels->translate.assign(total, {0, 0});
    }
    const double h = set.period / n;

    const auto claim = [&](int ci, int cj, double value, std::size_t owner) {
        if (!set.periodic && (ci < 0 || ci >= n || cj < 0 || cj >= (dim == 2 ? n : 1))) return;
        const int wi = wrap(ci, n);
        const int wj = dim == 2 ? wrap(cj, n) : 0;
        const std::size_t c = static_cast<std::size_t>(wj) * n + wi;
        const bool inside = rule == RasterRule::CenterSample ? value > 0.5 : value >= 0.5;
        if (!inside || value <= best[c]) return;
        best[c] = value;
        grid.cells[c] = 1;
        if (labels) {
            labels->label[c] = static_cast<std::int32_t>(owner);
            labels->translate[c] = {-floor_div(ci, n), dim == 2 ? -floor_div(cj, n) : 0};
        }
    };

    for (std::size_t k = 0; k < set.inclusions.size(); ++k) {
        const Shape& shape = set.inclusions[k].shape;
        if (const auto* cl = std::get_if<CellCluster>(&shape)) {
            // Exact overlap areas of lattice squares with grid cells.
            std::unordered_map<long long, double> frac;
            const auto key = [](int i, int j) { return (static_cast<long long>(i) << 32) ^ static_cast<unsigned>(j); };
            for (const auto& cell : cl->cells) {
                const Box b = cell_box(*cl, cell, {}, dim);
                const int i0 = static_cast<int>(std::floor(b.lo.x / h));
                const int i1 = static_cast<int>(std::ceil(b.hi.x / h)) - 1;
                const int j0 = dim == 2 ? static_cast<int>(std::floor(b.lo.y / h)) : 0;
                const int j1 = dim == 2 ? static_cast<int>(std::ceil(b.hi.y / h)) - 1 : 0;
                for (int cj = j0; cj <= j1; ++cj) {
                    for (int ci = i0; ci <= i1; ++ci) {
                        const double ox = std::min(b.hi.x, (ci + 1) * h) - std::max(b.lo.x, ci * h);
                        const double oy = dim == 2 ? std::min(b.hi.y, (cj + 1) * h) - std::max(b.lo.y, cj * h) : h;
                        if (ox <= 0.0 || oy <= 0.0) continue;
                        if (rule == RasterRule::CenterSample) {
                            const double cx = (ci + 0.5) * h;
                            const double cy = (cj + 0.5) * h;
                            const bool in = cx >= b.lo.x && cx < b.hi.x && (dim == 1 || (cy >= b.lo.y && cy < b.hi.y));
                            if (in) frac[key(ci, cj)] = 1.0;
                        } else {
                            frac[key(ci, cj)] += ox * oy / (dim == 2 ? h * h : h);
                        }
                    }
                }
            }
            // Deterministic claim order.
            std::vector<std::pair<long long, double>> ordered(frac.begin(), frac.end());
            std::sort(ordered.begin(), ordered.end());
            for (const auto& [kk, v] : ordered) {
                const int ci = static_cast<int>(kk >> 32);
                const int cj = static_cast<int>(static_cast<std::int32_t>(kk & 0xffffffffLL));
                claim(ci, cj, std::min(v, 1.0), k);
            }
            continue;
        }

        const Box bb = bounding_box(shape, dim);
        const int i0 = static_cast<int>(std::floor(bb.lo.x / h));
        const int i1 = static_cast<int>(std::floor(bb.hi.x / h));
        const int j0 = dim == 2 ? static_cast<int>(std::floor(bb.lo.y / h)) : 0;
        const int j1 = dim == 2 ? static_cast<int>(std::floor(bb.hi.y / h)) : 0;

        double radius = 0.0;
        if (const auto* d = std::get_if<Disc>(&shape)) radius = d->radius;
        else radius = std::get<Capsule>(shape).width;
        const auto core_distance = [&](Vec2 p) {
            if (const auto* d = std::get_if<Disc>(&shape)) return dim == 1 ? std::abs(p.x - d->center.x) : norm(p - d->center);
            const auto& c = std::get<Capsule>(shape);
            return point_segment_distance(p, c.a, c.b);
        };
        const auto core_box_distance = [&](const Box& b) {
            if (const auto* d = std::get_if<Disc>(&shape)) return point_box_distance(d->center, b);
            const auto& c = std::get<Capsule>(shape);
            return segment_box_distance(c.a, c.b, b);
        };

        for (int cj = j0; cj <= j1; ++cj) {
            for (int ci = i0; ci <= i1; ++ci) {
                const Box cellb{{ci * h, dim == 2 ? cj * h : 0.0}, {(ci + 1) * h, dim == 2 ? (cj + 1) * h : 0.0}};
                double value = 0.0;
                if (rule == RasterRule::CenterSample) {
                    const Vec2 c{(ci + 0.5) * h, dim == 2 ? (cj + 0.5) * h : 0.0};
                    value = core_distance(c) < radius ? 1.0 : 0.0;
                } else if (dim == 1) {
                    const auto& d = std::get<Disc>(shape);
                    const double ov = std::min(cellb.hi.x, d.center.x + d.radius) - std::max(cellb.lo.x, d.center.x - d.radius);
                    value = std::max(ov, 0.0) / h;
                } else {
                    const Vec2 corners[4] = {cellb.lo, {cellb.hi.x, cellb.lo.y}, cellb.hi, {cellb.lo.x, cellb.hi.y}};
                    bool all_in = true;
                    for (const Vec2& c : corners) all_in = all_in && core_distance(c) <= radius;
                    if (all_in) {
                        value = 1.0;
                    } else if (core_box_distance(cellb) >= radius) {
                        value = 0.0;
                    } else {
                        int hits = 0;
                        for (int b = 0; b < kSupersample; ++b) {
                            for (int a = 0; a < kSupersample; ++a) {
                                const Vec2 p{cellb.lo.x + (a + 0.5) * h / kSupersample, cellb.lo.y + (b + 0.5) * h / kSupersample};
                                if (core_distance(p) < radius) ++hits;
                            }
                        }
                        value = static_cast<double>(hits) / (kSupersample * kSupersample);
                    }
                }
                if (value > 0.0) claim(ci, cj, value, k);
            }
        }
    }
    return grid;
}

}  // namespace

IndicatorGrid rasterize(const InclusionSet& set, int resolution, RasterRule rule, LabelGrid* labels) {
    IndicatorGrid grid = rasterize_raw(set, resolution, rule, labels);
    check_complement_connected(grid);
    return grid;
}

IndicatorGrid rasterize_filled(const InclusionSet& set, int resolution, std::size_t* filled) {
    IndicatorGrid grid = rasterize_raw(set, resolution, RasterRule::AreaThreshold, nullptr);
    const std::size_t k = fill_complement_pockets(grid);
    if (filled) *filled = k;
    check_complement_connected(grid);
    return grid;
}

IndicatorGrid rasterize_separated(const InclusionSet& set, int resolution, std::size_t* cleared, std::size_t* filled) {
    LabelGrid labels;
    IndicatorGrid grid = rasterize_raw(set, resolution, RasterRule::AreaThreshold, &labels);
    const int n = grid.n;
    const int ny = grid.dim == 2 ? n : 1;
    std::size_t k = 0;
    const auto clash = [&](std::size_t a, std::size_t b) {
        if (!grid.cells[a] || !grid.cells[b] || labels.label[a] == labels.label[b]) return;
        const std::size_t c = labels.label[a] > labels.label[b] ? a : b;
        grid.cells[c] = 0;
        labels.label[c] = -1;
        ++k;
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * n + i;
            if (i + 1 < n || grid.periodic) clash(c, static_cast<std::size_t>(j) * n + (i + 1) % n);
            if (grid.dim == 2 && (j + 1 < n || grid.periodic)) clash(c, static_cast<std::size_t>((j + 1) % n) * n + i);
        }
    }
    const std::size_t f = fill_complement_pockets(grid);
    if (cleared) *cleared = k;
    if (filled) *filled = f;
    check_complement_connected(grid);
    return grid;
}

std::size_t fill_complement_pockets(IndicatorGrid& grid) {
    const int n = grid.n;
    const int ny = grid.dim == 2 ? n : 1;
    UnionFind uf(grid.cells.size());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * n + i;
            if (grid.cells[c]) continue;
            if (i + 1 < n || grid.periodic) {
                const std::size_t r = static_cast<std::size_t>(j) * n + (i + 1) % n;
                if (!grid.cells[r]) uf.unite(c, r);
            }
            if (grid.dim == 2 && (j + 1 < n || grid.periodic)) {
                const std::size_t u = static_cast<std::size_t>((j + 1) % n) * n + i;
                if (!grid.cells[u]) uf.unite(c, u);
            }
        }
    }
    std::size_t best = 0;
    std::size_t root = 0;
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        if (grid.cells[c]) continue;
        const std::size_t r = uf.find(c);
        if (uf.component_size(r) > best) {
            best = uf.component_size(r);
            root = r;
        }
    }
    std::size_t filled = 0;
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        if (!grid.cells[c] && uf.find(c) != root) {
            grid.cells[c] = 1;
            ++filled;
        }
    }
    return filled;
}

int complement_components(const IndicatorGrid& grid) {
    const int n = grid.n;
    const int ny = grid.dim == 2 ? n : 1;
    UnionFind uf(grid.cells.size());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * n + i;
            if (grid.cells[c]) continue;
            if (i + 1 < n || grid.periodic) {
                const std::size_t r = static_cast<std::size_t>(j) * n + (i + 1) % n;
                if (!grid.cells[r]) uf.unite(c, r);
            }
            if (grid.dim == 2 && (j + 1 < n || grid.periodic)) {
                const std::size_t u = static_cast<std::size_t>((j + 1) % n) * n + i;
                if (!grid.cells[u]) uf.unite(c, u);
            }
        }
    }
    std::set<std::size_t> roots;
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        if (!grid.cells[c]) roots.insert(uf.find(c));
    }
    return static_cast<int>(roots.size());
}

void check_complement_connected(const IndicatorGrid& grid) {
    const int comps = complement_components(grid);
    if (comps == 0) throw ConnectivityError("inclusions cover the whole cell (volume fraction 1)", 0);
    if (comps > 1) {
        throw ConnectivityError("complement of the inclusions splits into " + std::to_string(comps) + " components",
                                comps);
    }
}

double SeparationReport::moment_at(double a) const {
    double sum = 0.0;
    for (double v : nu) {
        if (v <= 0.0) return std::numeric_limits<double>::infinity();
        sum += std::pow(v, -a);
    }
    return sum / cell_volume;
}

SeparationReport separation_moments(const InclusionSet& set, double alpha) {
    if (set.inclusions.size() < 2) throw GeometryError("separation moments need at least two inclusions");
    SeparationReport rep;
    rep.alpha = alpha;
    rep.cell_volume = std::pow(set.period, set.dim);
    const std::size_t count = set.inclusions.size();
    std::optional<double> period;
    if (set.periodic) period = set.period;

    std::vector<double> rho(count, 1e300);
    if (all_clusters(set) && set.periodic) {
        rho = cluster_nearest_distances(set);
    } else {
        for (std::size_t p = 0; p < count; ++p) {
            for (std::size_t q = p + 1; q < count; ++q) {
                const double d = shape_distance(set.inclusions[p].shape, set.inclusions[q].shape, set.dim, period);
                rho[p] = std::min(rho[p], d);
                rho[q] = std::min(rho[q], d);
            }
            if (set.periodic) {
                for (const Vec2& off : lattice_shifts(set.dim, set.period, 1)) {
                    if (off.x == 0.0 && off.y == 0.0) continue;
                    rho[p] = std::min(rho[p], distance_with_offset(set.inclusions[p].shape, set.inclusions[p].shape, off, set.dim));
                }
            }
        }
    }
    for (std::size_t k = 0; k < count; ++k) {
        const Shape& s = set.inclusions[k].shape;
        const double r = std::max(rho[k], 0.0);
        const double diam = shape_diameter(s);
        rep.ids.push_back(set.inclusions[k].id);
        rep.rho.push_back(r);
        rep.diameter.push_back(diam);
        rep.nu.push_back(std::min(r / diam, 1.0));
        if (const auto* c = std::get_if<Capsule>(&s)) rep.mu.push_back(std::min(r / c->width, 1.0));
        else rep.mu.push_back(std::numeric_limits<double>::quiet_NaN());
        rep.boundary_distance.push_back(set.periodic ? std::numeric_limits<double>::quiet_NaN()
                                                     : boundary_distance(s, set.period, set.dim));
    }
    rep.moment = rep.moment_at(alpha);
    rep.infinite = std::isinf(rep.moment);
    return rep;
}

}  // namespace dplab
