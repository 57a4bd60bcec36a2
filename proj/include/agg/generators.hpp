#ifndef AGG_GENERATORS_HPP
#define AGG_GENERATORS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "agg/dataset.hpp"
#include "agg/errors.hpp"
#include "agg/random.hpp"

namespace agg {

// Two-class mixture in R^dim: with probability (1 - mixing) the point is
// uniform on the centered cube with the given half-width and labeled 1, else
// uniform on the same cube translated by (shift, ..., shift) and labeled 0.
struct HighDimSpec {
    int dim = 150;
    double mixing = 1.0 / 6.0;   // prior of class 0
    double shift = 0.25;         // translation per coordinate
    double half_width = 2.0;

    void check_valid() const {
        if (dim < 1) throw config_error("highdim spec: dim must be >= 1");
        if (!(mixing > 0.0 && mixing < 1.0)) throw config_error("highdim spec: mixing in (0,1)");
        if (!(half_width > 0.0)) throw config_error("highdim spec: half-width > 0");
    }
};

inline Dataset gen_highdim(const HighDimSpec& spec, Eigen::Index count, Rng& rng) {
    spec.check_valid();
    if (count < 1) throw config_error("gen_highdim: count must be >= 1");
    Dataset out;
    out.points.resize(spec.dim, count);
    out.labels.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const double z = rng.uniform();
        const double offset = z > spec.mixing ? 0.0 : spec.shift;
        out.labels(i) = z > spec.mixing ? 1 : 0;
        for (int d = 0; d < spec.dim; ++d) {
            out.points(d, i) = rng.uniform(-spec.half_width + offset, spec.half_width + offset);
        }
    }
    return out;
}

// j-th sine harmonic of the orthonormal basis on [0,1].
inline double sine_basis(int j, double t) {
    return std::numbers::sqrt2 * std::sin(std::numbers::pi * j * t);
}

enum class ThetaForm { exponential, inverse_square };

// Two-population curve models: mean = low-order sine expansion, error = 40
// sine harmonics with independent N(0,1) coefficients scaled by sqrt(theta_j).
struct FunctionalSpec {
    Eigen::VectorXd mean1;
    Eigen::VectorXd mean2;
    Eigen::VectorXd thetas;                         // 40 eigenvalues, all > 0
    Eigen::VectorXd grid;                           // curve sampling grid in [0,1]

    static constexpr int kErrorHarmonics = 40;

    static Eigen::VectorXd standard_grid() { return Eigen::VectorXd::LinSpaced(101, 0.0, 1.0); }

    static FunctionalSpec model_I() {
        FunctionalSpec s;
        s.mean1.resize(6);
        s.mean1 << 0.0, -0.5, 1.0, -0.5, 1.0, -0.5;
        s.mean2.resize(6);
        s.mean2 << 0.0, -0.75, 0.75, -0.15, 1.4, 0.1;
        s.thetas.resize(kErrorHarmonics);
        for (int j = 1; j <= kErrorHarmonics; ++j) s.thetas(j - 1) = 1.0 / (static_cast<double>(j) * j);
        s.grid = standard_grid();
        return s;
    }

    static FunctionalSpec model_II(ThetaForm form = ThetaForm::exponential) {
        FunctionalSpec s;
        s.mean1.resize(3);
        s.mean1 << 0.75, -0.75, 0.75;
        s.mean2 = Eigen::VectorXd::Zero(3);
        s.thetas.resize(kErrorHarmonics);
        for (int j = 1; j <= kErrorHarmonics; ++j) {
            if (form == ThetaForm::exponential) {
                const double u = 2.1 - (j - 1) / 20.0;
                s.thetas(j - 1) = std::exp(-u * u);
            } else {
                s.thetas(j - 1) = 1.0 / (static_cast<double>(j) * j);
            }
        }
        s.grid = standard_grid();
        return s;
    }

    void check_valid() const {
        if (grid.size() < 2) throw config_error("functional spec: grid too short");
        if (thetas.size() < 1 || (thetas.array() <= 0.0).any()) {
            throw config_error("functional spec: eigenvalues must be positive");
        }
    }

    // Analytic mean curve of population p (1 or 2) on the grid.
    Eigen::VectorXd mean_curve(int population) const {
        const Eigen::VectorXd& mu = population == 1 ? mean1 : mean2;
        Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
        for (int j = 1; j <= mu.size(); ++j) {
            for (Eigen::Index i = 0; i < grid.size(); ++i) {
                out(i) += mu(j - 1) * sine_basis(j, grid(i));
            }
        }
        return out;
    }
};

// Draws count_per_pop curves from each population; population 1 first
// (label 1), then population 2 (label 0). Curves come already discretized
// on the spec grid.
inline Dataset gen_functional(const FunctionalSpec& spec, Eigen::Index count_per_pop, Rng& rng) {
    spec.check_valid();
    if (count_per_pop < 1) throw config_error("gen_functional: count must be >= 1 per population");
    const Eigen::Index g = spec.grid.size();
    // basis matrix: row i, col j-1 = phi_j(t_i)
    Eigen::MatrixXd phi(g, FunctionalSpec::kErrorHarmonics);
    for (int j = 1; j <= FunctionalSpec::kErrorHarmonics; ++j) {
        for (Eigen::Index i = 0; i < g; ++i) phi(i, j - 1) = sine_basis(j, spec.grid(i));
    }
    const Eigen::VectorXd sqrt_theta = spec.thetas.array().sqrt();
    Dataset out;
    out.points.resize(g, 2 * count_per_pop);
    out.labels.resize(2 * count_per_pop);
    Eigen::VectorXd coeffs(FunctionalSpec::kErrorHarmonics);
    for (int p = 1; p <= 2; ++p) {
        const Eigen::VectorXd mean = spec.mean_curve(p);
        for (Eigen::Index i = 0; i < count_per_pop; ++i) {
            for (int j = 0; j < FunctionalSpec::kErrorHarmonics; ++j) {
                coeffs(j) = sqrt_theta(j) * rng.normal();
            }
            const Eigen::Index col = (p - 1) * count_per_pop + i;
            out.points.col(col) = mean + phi * coeffs;
            out.labels(col) = p == 1 ? 1 : 0;
        }
    }
    return out;
}

// Random reordering of a dataset; the positional train split needs the two
// populations interleaved at random.
inline Dataset shuffle_dataset(const Dataset& data, Rng& rng) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    rng.shuffle(order);
    Dataset out;
    out.points.resize(data.dim(), data.size());
    out.labels.resize(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.points.col(static_cast<Eigen::Index>(i)) = data.points.col(order[i]);
        out.labels(static_cast<Eigen::Index>(i)) = data.labels(order[i]);
    }
    return out;
}

}  // namespace agg

#endif
