#include "dplab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "dplab/errors.hpp"
#include "dplab/rng.hpp"

namespace dplab {

std::vector<std::uint64_t> EnsembleConfig::realization_seeds() const {
    validate();
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    for (int i = 0; i < realizations; ++i) out.push_back(derive_seed(base_seed, static_cast<std::uint64_t>(i)));
    return out;
}

void EnsembleConfig::validate() const {
    if (realizations < 1) throw ConfigError("realizations must be >= 1");
    if (!seeds.empty()) {
        if (static_cast<int>(seeds.size()) != realizations) throw ConfigError("seed list length differs from realizations");
        std::set<std::uint64_t> s(seeds.begin(), seeds.end());
        if (s.size() != seeds.size()) throw ConfigError("per-realization seeds must be pairwise distinct");
    }
    if (!(period > 0.0)) throw ConfigError("period must be positive");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

InclusionSet sample_realization(const EnsembleConfig& cfg, std::uint64_t seed, double period) {
    switch (cfg.model) {
        case GeometryModel::PeriodicLattice: {
            InclusionSet s = sample_periodic_lattice(cfg.radius, 1.0);
            // L x L copies of the unit lattice.
            const int k = static_cast<int>(std::lround(period));
            InclusionSet out = s;
            out.period = period;
            out.inclusions.clear();
            int id = 0;
            for (int j = 0; j < k; ++j) {
                for (int i = 0; i < k; ++i) {
                    Disc d = std::get<Disc>(s.inclusions.front().shape);
                    d.center = d.center + Vec2{static_cast<double>(i), static_cast<double>(j)};
                    out.inclusions.push_back({d, id++});
                }
            }
            out.seed = seed;
            return out;
        }
        case GeometryModel::HardDiscsRSA: {
            RsaParams p;
            p.intensity = cfg.intensity;
            p.radii = RadiusLaw::uniform(cfg.r_min, cfg.r_max);
            p.margin = cfg.margin;
            p.period = period;
            p.seed = seed;
            return sample_hard_discs_rsa(p);
        }
        case GeometryModel::PoissonHalfGap:
            return sample_poisson_halfgap(cfg.intensity, period, seed);
        case GeometryModel::ChessPercolation:
            return sample_chess_percolation(cfg.mu, static_cast<int>(std::lround(period)), seed);
        default:
            throw ConfigError("model " + to_string(cfg.model) + " has no sampler");
    }
}

InclusionSet sample_with_retries(const EnsembleConfig& cfg, std::uint64_t seed, double period, int resolution,
                                 int& rejections, int& attempts) {
    for (int r = 0; r <= cfg.max_retries; ++r) {
        const std::uint64_t s = r == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(r));
        ++attempts;
        try {
            InclusionSet set = sample_realization(cfg, s, period);
            if (set.saturated) throw ResampleSignal("RSA saturated");
            if (resolution > 0) check_complement_connected(rasterize(set, resolution));
            return set;
        } catch (const ResampleSignal&) {
        } catch (const ConnectivityError&) {
        } catch (const GeometryError&) {
        }
        ++rejections;
    }
    throw Error("model infeasible: no admissible realization after " + std::to_string(cfg.max_retries + 1) + " attempts");
}

EnsembleStat mean_and_stderr(const std::vector<double>& x) {
    EnsembleStat s;
    if (x.empty()) return s;
    const double n = static_cast<double>(x.size());
    for (double v : x) s.mean += v;
    s.mean /= n;
    if (x.size() > 1) {
        double var = 0.0;
        for (double v : x) var += (v - s.mean) * (v - s.mean);
        var /= n - 1.0;
        s.stderr_ = std::sqrt(var / n);
    }
    return s;
}

EnsembleResult ensemble_cell_run(const EnsembleConfig& cfg, int resolution, const CellOptions& cell, int threads) {
    const std::vector<std::uint64_t> seeds = cfg.realization_seeds();
    const std::size_t R = seeds.size();
    std::vector<RealizationSummary> out(R);
    std::vector<int> rej(R, 0);
    std::vector<int> att(R, 0);
    std::vector<std::exception_ptr> errs(R);
    HomogenizedOptions opt;
    opt.cell = cell;
    opt.flux_correctors = false;
    opt.inclusion_corrector = false;

    const auto work = [&](std::size_t k) {
        try {
            const InclusionSet set = sample_with_retries(cfg, seeds[k], cfg.period, resolution, rej[k], att[k]);
            const HomogenizedData hd = compute_homogenized_data(rasterize(set, resolution), opt);
            out[k] = {seeds[k], hd.a_bar, hd.mean_v, hd.vol_frac};
        } catch (...) {
            errs[k] = std::current_exception();
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(R)));
    if (nt == 1) {
        for (std::size_t k = 0; k < R; ++k) work(k);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t k = static_cast<std::size_t>(t); k < R; k += static_cast<std::size_t>(nt)) work(k);
            });
        }
        for (auto& th : pool) th.join();
    }
    EnsembleResult res;
    for (std::size_t k = 0; k < R; ++k) {
        res.rejections += rej[k];
        res.attempts += att[k];
    }
    if (res.attempts > 0 && 2 * res.rejections > res.attempts) {
        throw Error("model infeasible: " + std::to_string(res.rejections) + " of " + std::to_string(res.attempts) +
                    " realizations rejected");
    }
    for (auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
    std::vector<double> x;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            x.clear();
            for (const auto& s : out) x.push_back(s.a_bar[i][j]);
            res.a_bar[i][j] = mean_and_stderr(x);
        }
    }
    x.clear();
    for (const auto& s : out) x.push_back(s.mean_v);
    res.mean_v = mean_and_stderr(x);
    x.clear();
    for (const auto& s : out) x.push_back(s.vol_frac);
    res.vol_frac = mean_and_stderr(x);
    res.realizations = static_cast<int>(R);
    res.samples = std::move(out);
    return res;
}

ErgodicReport ergodic_average_check(const EnsembleConfig& cfg, ErgodicQuantity quantity, const std::vector<double>& periods,
                                    int cells_per_unit, const CellOptions& cell) {
    if (periods.size() < 2) throw Error("ergodic check needs at least two periods");
    const std::vector<std::uint64_t> seeds = cfg.realization_seeds();
    ErgodicReport rep;
    for (double L : periods) {
        const int n = static_cast<int>(std::lround(L * cells_per_unit));
        std::vector<std::pair<std::uint64_t, double>> vals;
        int rej = 0;
        int att = 0;
        for (std::uint64_t s : seeds) {
            const InclusionSet set = sample_with_retries(cfg, s, L, n, rej, att);
            const IndicatorGrid chi = rasterize(set, n);
            double q = chi.volume_fraction();
            if (quantity == ErgodicQuantity::MeanV) q = solve_resonant_cell(chi, cell).mean_v;
            vals.emplace_back(s, q);
        }
        std::sort(vals.begin(), vals.end());
        std::vector<double> x;
        for (const auto& v : vals) x.push_back(v.second);
        const EnsembleStat st = mean_and_stderr(x);
        ErgodicRow row;
        row.period = L;
        row.resolution = n;
        row.mean = st.mean;
        row.variance = st.stderr_ * st.stderr_ * static_cast<double>(x.size());
        rep.rows.push_back(row);
    }
    for (std::size_t k = 1; k < rep.rows.size(); ++k) {
        if (rep.rows[k].variance > 1.5 * rep.rows[k - 1].variance + 1e-300) rep.nonincreasing = false;
    }
    return rep;
}

}  // namespace dplab
