#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dplab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a);

/// Open ball. In one dimension this is the interval (center.x - radius, center.x + radius).
struct Disc {
    Vec2 center;
    double radius = 0.0;
};

/// Open set of points closer than `width` to the segment [a, b] (a cylinder
/// of cross-section radius `width` with rounded caps).
struct Capsule {
    Vec2 a;
    Vec2 b;
    double width = 0.0;
};

/// Edge-connected union of lattice squares [i, i+1) x [j, j+1), scaled by
/// `cell_size`. Coordinates are unwrapped: a cluster straddling the period
/// boundary keeps contiguous indices.
struct CellCluster {
    std::vector<std::array<int, 2>> cells;
    double cell_size = 1.0;
};

using Shape = std::variant<Disc, Capsule, CellCluster>;

struct Inclusion {
    Shape shape;
    int id = 0;
};

enum class GeometryModel { PeriodicLattice, HardDiscsRSA, PoissonHalfGap, ChessPercolation, Custom };

std::string to_string(GeometryModel model);
GeometryModel geometry_model_from_string(const std::string& name);

/// Inclusions in one fundamental cell [0, period)^dim of a periodic tiling,
/// or inside the box [0, period]^dim when `periodic` is false.
struct InclusionSet {
    int dim = 2;
    double period = 1.0;
    bool periodic = true;
    std::uint64_t seed = 0;
    GeometryModel model = GeometryModel::Custom;
    std::vector<Inclusion> inclusions;
    bool saturated = false;  ///< RSA ran out of its rejection budget
    std::vector<std::string> warnings;
};

/// Binary cell-wise indicator of F on a uniform grid with n cells per axis.
struct IndicatorGrid {
    int dim = 2;
    int n = 0;
    double period = 1.0;
    bool periodic = true;
    std::vector<std::uint8_t> cells;  ///< row-major, x fastest; 1 = inside F

    // provenance
    GeometryModel model = GeometryModel::Custom;
    std::uint64_t seed = 0;
    std::size_t inclusion_count = 0;

    std::size_t size() const { return cells.size(); }
    double h() const { return period / n; }
    bool inside(int i, int j = 0) const { return cells[static_cast<std::size_t>(j) * n + i] != 0; }
    std::size_t count() const;
    double volume_fraction() const;
};

enum class RasterRule { CenterSample, AreaThreshold };

/// Owner of every F cell: index into InclusionSet::inclusions and the
/// lattice translate of the copy that covers the cell (-1 label outside F).
struct LabelGrid {
    std::vector<std::int32_t> label;
    std::vector<std::array<int, 2>> translate;
};

struct RadiusLaw {
    double r_min = 0.0;
    double r_max = 0.0;
    static RadiusLaw fixed(double r) { return {r, r}; }
    static RadiusLaw uniform(double lo, double hi) { return {lo, hi}; }
};

struct RsaParams {
    double intensity = 0.0;  ///< expected inclusions per unit volume
    RadiusLaw radii;
    double margin = 0.0;  ///< required gap as a fraction of the larger radius
    double period = 1.0;
    std::uint64_t seed = 0;
    int dim = 2;
    std::optional<int> target_count;  ///< overrides intensity * period^dim
};

InclusionSet sample_periodic_lattice(double radius, double period, int dim = 2);
InclusionSet sample_hard_discs_rsa(const RsaParams& params);
InclusionSet sample_poisson_halfgap(double intensity, double period, std::uint64_t seed, int dim = 2);
InclusionSet poisson_halfgap_from_points(std::span<const Vec2> points, double period, int dim = 2);
InclusionSet sample_chess_percolation(double mu, int lattice_size, std::uint64_t seed);
/// Chess structure from an explicit black/white pattern (1 = black).
InclusionSet chess_from_pattern(std::span<const std::uint8_t> black, int lattice_size);

/// Throws GeometryError unless the inclusions are pairwise disjoint open sets
/// that fit in the fundamental cell.
void check_inclusion_set(const InclusionSet& set);

/// Exact distance between two shapes (periodic minimum over lattice images
/// when `period` is given). Negative when they overlap.
double shape_distance(const Shape& a, const Shape& b, int dim, std::optional<double> period);
double shape_diameter(const Shape& s);
bool shape_contains(const Shape& s, Vec2 p, int dim);
/// Tight axis-aligned bounding box {lower, upper}; the y range is 0 in one dimension.
std::array<Vec2, 2> shape_bounds(const Shape& s, int dim);

IndicatorGrid rasterize(const InclusionSet& set, int resolution, RasterRule rule = RasterRule::AreaThreshold);
IndicatorGrid rasterize(const InclusionSet& set, int resolution, RasterRule rule, LabelGrid* labels);

/// Rasterize without the connectivity check, then move every complement
/// component but the largest into F. `filled` receives the moved cell count.
IndicatorGrid rasterize_filled(const InclusionSet& set, int resolution, std::size_t* filled = nullptr);
std::size_t fill_complement_pockets(IndicatorGrid& grid);
/// Like rasterize_filled, but first returns to the complement one cell of
/// every face-adjacent pair owned by different inclusions, so that distinct
/// inclusions stay disjoint on the grid.
IndicatorGrid rasterize_separated(const InclusionSet& set, int resolution, std::size_t* cleared = nullptr,
                                  std::size_t* filled = nullptr);

/// Number of face-connected components of the complement (periodic wrap when the grid is periodic).
int complement_components(const IndicatorGrid& grid);

/// Throws ConnectivityError unless the complement is one non-empty component.
void check_complement_connected(const IndicatorGrid& grid);

struct SeparationReport {
    std::vector<int> ids;
    std::vector<double> rho;       ///< distance to the nearest other inclusion
    std::vector<double> diameter;
    std::vector<double> nu;        ///< min(rho / diameter, 1)
    std::vector<double> mu;        ///< min(rho / width, 1) for capsules, NaN otherwise
    std::vector<double> boundary_distance;  ///< bounded mode only, NaN when periodic
    double cell_volume = 1.0;
    double alpha = 1.0;
    double moment = 0.0;           ///< |cell|^-1 sum nu^-alpha
    bool infinite = false;         ///< some nu vanished

    /// Recompute the moment for another exponent.
    double moment_at(double alpha) const;
};

SeparationReport separation_moments(const InclusionSet& set, double alpha);

}  // namespace dplab
