#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dplab/geometry.hpp"
#include "dplab/linalg.hpp"
#include "dplab/mesh.hpp"

namespace dplab {

/// Energy-minimizing extension of the complement values of `u` into F:
/// unit-weight graph Laplace equation on F cells with the adjacent
/// complement cells as Dirichlet data. Complement values are copied.
GridFunction harmonic_extension(const GridFunction& u, const IndicatorGrid& chi, const CgOptions& cg = {1e-12, 0, false});

/// Per-cell |grad u| from the face differences, sqrt(sum_k (g_-^2 + g_+^2) / 2).
std::vector<double> gradient_magnitude(const GridFunction& u);

/// ||grad u||_L2 over faces whose two cells lie outside F.
double complement_gradient_norm(const GridFunction& u, const IndicatorGrid& chi);

/// ||grad Pu||_Lp(torus) / ||grad u||_L2(complement).
double extension_ratio(const GridFunction& pu, const IndicatorGrid& chi, double p);

/// `count` random fields sum_{|k|_inf <= kmax} a_k cos(2 pi k.x / L) + b_k sin(2 pi k.x / L).
std::vector<GridFunction> fourier_trial_fields(const Grid& g, std::uint64_t seed, int count = 16, int kmax = 3);

struct WorstField {
    GridFunction u;  ///< extended field
    double rayleigh = 0.0;  ///< ||grad Pu||^2 / ||grad u||^2_L2(complement)
    int iterations = 0;
};

/// Power iteration for the field with the largest L2 extension ratio. A
/// coarser `start` field whose resolution divides the grid is prolonged as
/// the initial iterate.
WorstField worst_extension_field(const IndicatorGrid& chi, std::uint64_t seed, int iterations = 30,
                                 const GridFunction* start = nullptr);

struct SurveyOptions {
    std::vector<double> p{1.0, 1.2, 4.0 / 3.0, 1.5, 2.0};
    int fields = 16;
    std::uint64_t seed = 1;
    bool worst_case = true;
    int power_iterations = 30;
    bool separate_inclusions = true;  ///< see rasterize_separated
};

struct SurveyRow {
    std::string family;
    double p = 2.0;
    int n = 0;
    double constant = 0.0;         ///< max over all trial fields
    double random_constant = 0.0;  ///< max over the Fourier battery
    double worst_constant = 0.0;   ///< ratio of the power-iteration field
    std::size_t filled_cells = 0;  ///< enclosed complement pockets moved into F
    std::size_t cleared_cells = 0; ///< cells returned to the complement between distinct inclusions
};

/// Extension constants of one geometry for every p and resolution. Complement
/// pockets cut off by rasterization (near-tangent inclusions) are filled.
std::vector<SurveyRow> extension_constant_survey(const std::string& family, const InclusionSet& set,
                                                 const std::vector<int>& resolutions, const SurveyOptions& opt = {});

struct TrendReport {
    double c2_coarse = 0.0;
    double c2_fine = 0.0;
    double cp_coarse = 0.0;
    double cp_fine = 0.0;
    double growth2 = 0.0;    ///< C(2) fine / coarse - 1
    double change_p = 0.0;   ///< |C(p) fine / coarse - 1|
    bool pass = false;       ///< growth2 >= 0.25 and change_p <= 0.25
};

/// Two-resolution trend of C(2) against C(p) from survey rows of one family.
TrendReport extension_trend(const std::vector<SurveyRow>& rows, double p, int coarse, int fine);

}  // namespace dplab
