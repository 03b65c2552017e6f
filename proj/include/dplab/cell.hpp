#pragma once

#include <array>
#include <vector>

#include "dplab/geometry.hpp"
#include "dplab/linalg.hpp"
#include "dplab/mesh.hpp"

namespace dplab {

using Matrix2 = std::array<std::array<double, 2>, 2>;

enum class CorrectorVariant { SoftRestricted, Massive, DirichletDomain };

struct CorrectorSet {
    CorrectorVariant variant = CorrectorVariant::SoftRestricted;
    double eps = 0.0;
    std::vector<GridFunction> phi;     ///< one per direction
    std::vector<FaceField> grad_phi;
    std::vector<int> iterations;
    std::vector<double> residuals;
};

struct CellOptions {
    /// Cell correctors feed identities checked at 1e-8 and isotropy at 1e-10.
    CgOptions cg{1e-12, 0, false};
};

struct ResonantCell {
    GridFunction v;
    double mean_v = 0.0;
    int iterations = 0;
};

/// v - lap v = 1 in F, v = 0 on the boundary of F, extended by zero.
ResonantCell solve_resonant_cell(const IndicatorGrid& chi, const CellOptions& opt = {});

/// Correctors of the soft-inclusion problem on the complement, for every direction.
CorrectorSet solve_corrector_soft(const IndicatorGrid& chi, const CellOptions& opt = {});
/// Massive approximate correctors: eps^2 phi - div((1 - chi + eps^2 chi)(e_i + grad phi)) = 0 on the torus.
CorrectorSet solve_corrector_massive(const IndicatorGrid& chi, double eps, const CellOptions& opt = {});
/// Same operator on a box with homogeneous Dirichlet data; `chi` is a non-periodic grid of D/eps.
CorrectorSet solve_corrector_dirichlet(const IndicatorGrid& chi, double eps, const CellOptions& opt = {});

/// Right-hand side h^dim div(a_face e_i) of the corrector equation for coefficient `coeff`.
std::vector<double> corrector_rhs(const CoeffField& coeff, BoundaryKind bc, std::span<const std::uint8_t> active, int direction);

/// 1 on faces whose two cells lie outside F.
FaceField complement_face_indicator(const IndicatorGrid& chi);

struct AbarResult {
    Matrix2 a_bar{};       ///< symmetrized flux form
    Matrix2 energy_form{};
    Matrix2 flux_form{};
    double disagreement = 0.0;  ///< max relative entry difference energy vs flux
};

/// Both cell formulas for the homogenized matrix; throws InvariantError above 1e-6.
AbarResult homogenized_matrix(const CorrectorSet& corr, const IndicatorGrid& chi);

struct FluxCorrector {
    /// sigma[j * dim + k] on nodes (sigma_ijk for fixed i).
    std::vector<GridFunction> sigma;
    double residual = 0.0;  ///< L2 norm of grad_k sigma_ijk - (q_i)_j over faces
    double q_mean_defect = 0.0;
};

/// q_i = 1_c (e_i + grad phi_i) - a_bar e_i on faces.
FaceField flux_defect(const CorrectorSet& corr, const IndicatorGrid& chi, const Matrix2& a_bar, int i);

/// Skew potential of q_i; mean of q_i is subtracted first. Throws InvariantError
/// when the identity residual exceeds 1e-6 ||q||.
FluxCorrector solve_flux_corrector(const FaceField& q_i, const CellOptions& opt = {});

struct InclusionCorrector {
    FaceField theta;  ///< theta_i on i-faces
    double residual = 0.0;  ///< L2 norm of div theta - (v - mean v)
};

InclusionCorrector solve_inclusion_corrector(const GridFunction& v, const CellOptions& opt = {});

struct HomogenizedData {
    int dim = 2;
    Matrix2 a_bar{};
    double mean_v = 0.0;
    double vol_frac = 0.0;
    GridFunction v;
    CorrectorSet phi;
    std::vector<FaceField> q;
    std::vector<FluxCorrector> sigma;  ///< per i
    InclusionCorrector theta;
    AbarResult abar_detail;
};

struct HomogenizedOptions {
    CellOptions cell;
    bool flux_correctors = true;
    bool inclusion_corrector = true;
};

HomogenizedData compute_homogenized_data(const IndicatorGrid& chi, const HomogenizedOptions& opt = {});

struct MomentReport {
    double phi_max = 0.0;    ///< grid max of |phi|^2
    double sigma_max = 0.0;
    double theta_max = 0.0;
    double phi_mean = 0.0;   ///< grid mean of |phi|^2
    double sigma_mean = 0.0;
    double theta_mean = 0.0;
};

MomentReport corrector_moment_report(const HomogenizedData& hd);

/// ||1_c (grad phi_a - grad phi_b)||_L2 summed over directions, on faces with both cells outside F.
double corrector_gradient_distance(const CorrectorSet& a, const CorrectorSet& b, const IndicatorGrid& chi);

/// Rotate a 2-D indicator grid by 90 degrees counterclockwise.
IndicatorGrid rotate90(const IndicatorGrid& chi);

}  // namespace dplab
