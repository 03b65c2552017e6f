#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dplab/cell.hpp"
#include "dplab/geometry.hpp"

namespace dplab {

/// Random geometry model, realization count and seeds of an ensemble.
struct EnsembleConfig {
    GeometryModel model = GeometryModel::HardDiscsRSA;
    double period = 1.0;  ///< cell period L (lattice size for the chess model)
    int realizations = 1;
    std::uint64_t base_seed = 0;
    /// Explicit per-realization seeds; derived from base_seed when empty.
    std::vector<std::uint64_t> seeds;
    int max_retries = 8;

    // model parameters
    double radius = 0.25;     ///< lattice
    double intensity = 40.0;  ///< RSA and Poisson half-gap, per unit volume
    double r_min = 0.02;      ///< RSA
    double r_max = 0.08;
    double margin = 0.5;
    double mu = 0.3;          ///< chess

    /// Seeds of realizations 0..R-1; throws ConfigError when R < 1 or seeds repeat.
    std::vector<std::uint64_t> realization_seeds() const;
    void validate() const;
};

/// One realization of the model on the L-torus.
InclusionSet sample_realization(const EnsembleConfig& cfg, std::uint64_t seed, double period);

/// Sample with resampling: retry seeds are derived from `seed`; rejected
/// attempts are added to `rejections`.
InclusionSet sample_with_retries(const EnsembleConfig& cfg, std::uint64_t seed, double period, int resolution,
                                 int& rejections, int& attempts);

struct EnsembleStat {
    double mean = 0.0;
    double stderr_ = 0.0;  ///< sample standard deviation / sqrt(R); 0 for R = 1
};

struct RealizationSummary {
    std::uint64_t seed = 0;
    Matrix2 a_bar{};
    double mean_v = 0.0;
    double vol_frac = 0.0;
};

struct EnsembleResult {
    std::array<std::array<EnsembleStat, 2>, 2> a_bar{};
    EnsembleStat mean_v;
    EnsembleStat vol_frac;
    int realizations = 0;
    int rejections = 0;
    int attempts = 0;
    std::vector<RealizationSummary> samples;  ///< sorted by seed
};

EnsembleStat mean_and_stderr(const std::vector<double>& x);

/// Cell quantities averaged over the ensemble. Realizations run on `threads`
/// workers; the reduction is ordered by seed.
EnsembleResult ensemble_cell_run(const EnsembleConfig& cfg, int resolution, const CellOptions& cell = {}, int threads = 1);

enum class ErgodicQuantity { VolFrac, MeanV };

struct ErgodicRow {
    double period = 0.0;
    int resolution = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< across seeds, of the spatial average
};

struct ErgodicReport {
    std::vector<ErgodicRow> rows;
    bool nonincreasing = true;  ///< var(L_k+1) <= 1.5 var(L_k)
};

/// Across-seed variance of a spatial average for each period in `periods`,
/// with `cells_per_unit` grid cells per unit length.
ErgodicReport ergodic_average_check(const EnsembleConfig& cfg, ErgodicQuantity quantity, const std::vector<double>& periods,
                                    int cells_per_unit, const CellOptions& cell = {});

}  // namespace dplab
