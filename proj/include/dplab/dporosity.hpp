#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dplab/cell.hpp"
#include "dplab/geometry.hpp"
#include "dplab/linalg.hpp"
#include "dplab/mesh.hpp"

namespace dplab {

using ScalarFunction = std::function<double(double, double)>;

/// Cell-center samples of `fn`.
GridFunction sample_function(const Grid& grid, const ScalarFunction& fn, BoundaryKind bc);

/// D = (0, extent)^dim, either a box with homogeneous Dirichlet data or a torus.
struct Domain {
    double extent = 1.0;
    bool periodic = false;
    int dim = 2;
};

struct EpsProblem {
    Domain domain;
    double eps = 0.0;
    int resolution = 0;       ///< cells per axis on D
    int cell_resolution = 0;  ///< cells per axis of one eps-scaled period
    int copies = 0;           ///< periods per axis of D
    InclusionSet geometry;    ///< unit-scale periodic cell
    IndicatorGrid cell_chi;   ///< cell pattern at cell_resolution
    IndicatorGrid chi_eps;    ///< F_eps(D) on D
    std::vector<std::int32_t> instance;  ///< inclusion copy owning each F cell, -1 outside
    int instance_count = 0;
    GridFunction f;
    std::vector<std::string> warnings;

    Grid grid() const { return grid_of(chi_eps); }
    BoundaryKind bc() const { return domain.periodic ? BoundaryKind::Periodic : BoundaryKind::DirichletZero; }
};

/// Tile the cell geometry at scale eps over D. Only copies wholly inside D
/// enter F_eps(D) (all of them on the torus). The number of periods per
/// axis, |D| / (eps * period), and resolution / copies must be integers.
EpsProblem build_eps_problem(const InclusionSet& cell_geometry, const Domain& domain, double eps,
                             const ScalarFunction& f, int resolution);

struct EpsSolution {
    GridFunction u;
    int iterations = 0;
    double energy_defect = 0.0;  ///< |int f u - (int u^2 + sum T (du)^2)| / int f u
    double l2_u = 0.0;
    double l2_f = 0.0;
};

/// u - div((1 - chi + eps^2 chi) grad u) = f.
EpsSolution solve_eps_problem(const EpsProblem& p, const CgOptions& cg = {});

struct AuxiliarySolution {
    GridFunction v;
    int iterations = 0;
    double max_abs = 0.0;
    double rhs_max_abs = 0.0;
};

/// v - eps^2 lap v = rhs in F_eps(D), v = 0 on its boundary, zero outside.
AuxiliarySolution solve_auxiliary(const EpsProblem& p, const GridFunction& rhs, const CgOptions& cg = {});

/// Matrix of (1 - mean_v) u - div(a_bar grad u) scaled by h^dim; the cross
/// term uses centered differences with odd reflection across box faces.
SparseOperator assemble_homogenized(const Grid& grid, const Matrix2& a_bar, double mass);

struct HomogenizedSolution {
    GridFunction u;
    int iterations = 0;
};

HomogenizedSolution solve_homogenized(const Matrix2& a_bar, double mean_v, const GridFunction& f, const CgOptions& cg = {});
HomogenizedSolution solve_homogenized(const HomogenizedData& hd, const GridFunction& f, const CgOptions& cg = {});

struct CoupledSolution {
    GridFunction u_bar;
    GridFunction w;
    int iterations = 0;
    double max_asymmetry = 0.0;
    double bound_ratio = 0.0;  ///< (||u_bar||_H1 + ||w||_L2) / ||f||_L2
};

/// Coupled two-scale system on the torus:
/// u + w - div(a_bar grad u) = f, u + w - eps^2 lap w = f in eps F, w = 0 on its boundary.
CoupledSolution solve_coupled_two_scale(const Matrix2& a_bar, const EpsProblem& p, const CgOptions& cg = {});

/// Unknowns of the coupled block system and its matrix (exposed for tests).
SparseOperator assemble_coupled(const Matrix2& a_bar, const EpsProblem& p);

struct TwoScaleFields {
    GridFunction u_smooth;  ///< u_bar, or its mollification
    GridFunction outside;   ///< u_s + eps phi_i(./eps) d_i u_s
    GridFunction inside;    ///< u_s + v(./eps) (f - u_s)
    std::array<GridFunction, 2> grad_smooth;  ///< centered cell gradient of u_s
};

/// Separable mollification of u 1_D with a cos^2 kernel of half-width `width`.
GridFunction mollify(const GridFunction& u, double width);
/// Centered differences; one-sided at box faces.
std::array<GridFunction, 2> cell_gradient(const GridFunction& u);

TwoScaleFields two_scale_expansion(const GridFunction& u_bar, const HomogenizedData& cell, const EpsProblem& p,
                                   std::optional<double> mollifier_width = std::nullopt);

struct ErrorRow {
    double eps = 0.0;
    double h1_outside = 0.0;  ///< H1 norm of u_eps - outside field over D minus F_eps(D)
    double l2_inside = 0.0;   ///< L2(D) norm of u_eps - inside field
    double grad_defect = 0.0;
    double combined() const { return h1_outside + l2_inside; }
};

ErrorRow error_report(const GridFunction& u_eps, const TwoScaleFields& ex, const HomogenizedData& cell, const EpsProblem& p);

struct TestFunction {
    int k = 0;
    int l = 0;
    std::string name;
    ScalarFunction psi;
    ScalarFunction grad_norm_sq;  ///< |grad psi|^2, for normalization
};

/// psi = 1 plus sin(k pi x) sin(l pi y) (box) or sin(2 pi k x + 1) sin(2 pi l y + 2) (torus), 1 <= k, l <= kmax.
std::vector<TestFunction> sine_battery(const Domain& domain, int kmax = 4);

struct InsideDiagnostics {
    double left = 0.0;   ///< ||u_eps - u_bar - v_eps||_L2(F_eps)
    double right = 0.0;  ///< ||u_eps - u_bar||_L2(D minus F_eps) + eps ||f||_L2
    double ratio = 0.0;
    double hminus1_defect = 0.0;  ///< max over the battery of |<1_F e, psi>| / ||grad psi||
};

InsideDiagnostics inside_error_diagnostics(const GridFunction& u_eps, const GridFunction& u_bar, const GridFunction& v_eps,
                                           const EpsProblem& p);

struct WeakLimitSample {
    double eps = 0.0;
    GridFunction u_eps;
    GridFunction u_bar;
    Matrix2 a_bar{};
    double mean_v = 0.0;
    IndicatorGrid chi_eps;
    GridFunction f;
};

struct WeakLimitRow {
    std::string psi;
    std::vector<double> state;  ///< per eps
    std::vector<double> flux;   ///< per eps, summed over directions
    bool decreasing = false;    ///< last < first for both pairings
};

std::vector<WeakLimitRow> verify_weak_limit(const std::vector<WeakLimitSample>& samples, const std::vector<TestFunction>& battery);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
    bool dropped_largest = false;
    bool defined = false;
};

/// Least squares of log(error) on log(eps). With four or more points the
/// largest eps is dropped when its residual from the fit of the remaining
/// points exceeds 3x their RMS residual.
SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& err);

struct SweepSpec {
    InclusionSet cell_geometry;
    Domain domain;
    std::vector<double> eps;
    int resolution = 256;
    ScalarFunction f;
    bool coupled = false;
    bool inside = false;
    std::optional<double> mollifier_factor;  ///< mollifier width = factor * eps
    CgOptions cg;
    CellOptions cell;
};

struct SweepRow {
    double eps = 0.0;
    int cell_resolution = 0;
    ErrorRow errors;
    double coupled_error = 0.0;
    InsideDiagnostics inside;
    Matrix2 a_bar{};
    double mean_v = 0.0;
    int iterations = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    SlopeFit combined;
    SlopeFit h1_outside;
    SlopeFit l2_inside;
    SlopeFit coupled;
    std::vector<std::string> warnings;
};

/// Homogenized data for each distinct cell resolution, computed once.
class CellCache {
public:
    explicit CellCache(const InclusionSet& geometry, CellOptions opt = {}) : geometry_(geometry), opt_(opt) {}
    const HomogenizedData& get(int resolution);

private:
    InclusionSet geometry_;
    CellOptions opt_;
    std::map<int, HomogenizedData> cache_;
};

SweepReport run_sweep(const SweepSpec& spec);

}  // namespace dplab
