#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace sppost {

/// Response and design with the Gram quantities the solvers need.
/// Immutable after construction.
class Dataset {
public:
    /// Validates and precomputes gram = XᵀX/n, xty = XᵀY/n, yty = YᵀY.
    /// Throws DimensionMismatch or NonFiniteInput.
    Dataset(Eigen::MatrixXd X, Eigen::VectorXd Y);

    Eigen::Index n() const noexcept { return X_.rows(); }
    Eigen::Index p() const noexcept { return X_.cols(); }
    const Eigen::MatrixXd& X() const noexcept { return X_; }
    const Eigen::VectorXd& Y() const noexcept { return Y_; }
    /// C_n = XᵀX / n.
    const Eigen::MatrixXd& gram() const noexcept { return gram_; }
    /// XᵀY / n.
    const Eigen::VectorXd& xty() const noexcept { return xty_; }
    /// YᵀY (unnormalized).
    double yty() const noexcept { return yty_; }

private:
    Eigen::MatrixXd X_;
    Eigen::VectorXd Y_;
    Eigen::MatrixXd gram_;
    Eigen::VectorXd xty_;
    double yty_ = 0.0;
};

Dataset validate_dataset(Eigen::MatrixXd X, Eigen::VectorXd Y);

/// θ | σ ~ N(0, σ² a_n⁻¹ I), σ⁻² ~ Ga(b1, b2). b1 = b2 = 0 is the
/// non-informative choice.
struct PriorConfig {
    double a_n = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;

    void validate() const;
};

struct FitConfig {
    /// Projection penalty λ_n; empty means choose by cross-validation.
    std::optional<double> lambda_n;
    std::size_t draws = 2000;
    std::uint64_t seed = 1;
    /// Requested credibility 1−γ. Ignored when target_coverage is set.
    double level = 0.95;
    /// Intended asymptotic coverage; when set the credibility level is
    /// calibrated from it.
    std::optional<double> target_coverage;
    std::size_t cv_folds = 10;
    std::size_t cv_grid_size = 100;

    void validate() const;
};

struct PosteriorDraw {
    Eigen::VectorXd theta;
    double sigma = 1.0;
};

struct SparseDraw {
    Eigen::VectorXd theta_star;
    /// Indices j with theta_star[j] != 0, ascending.
    std::vector<Eigen::Index> support;
    double kkt_residual = 0.0;
};

/// Gauge selecting the geometry of a credible region. Indices are 0-based.
class NormSelector {
public:
    enum class Kind { MaxNorm, EuclideanNorm, L1Norm, Component, Rectangle };

    static NormSelector max_norm() { return NormSelector(Kind::MaxNorm, {}); }
    static NormSelector euclidean() { return NormSelector(Kind::EuclideanNorm, {}); }
    static NormSelector l1() { return NormSelector(Kind::L1Norm, {}); }
    static NormSelector component(Eigen::Index j);
    /// Throws InvalidArgument for an empty set or repeated indices.
    static NormSelector rectangle(std::vector<Eigen::Index> indices);

    Kind kind() const noexcept { return kind_; }
    /// Component index for Component, the coordinate set for Rectangle.
    const std::vector<Eigen::Index>& indices() const noexcept { return indices_; }

    /// Throws InvalidArgument if any index is outside [0, p).
    void check_dimension(Eigen::Index p) const;

private:
    NormSelector(Kind kind, std::vector<Eigen::Index> indices)
        : kind_(kind), indices_(std::move(indices)) {}

    Kind kind_;
    std::vector<Eigen::Index> indices_;
};

struct CredibleRegion {
    NormSelector selector = NormSelector::max_norm();
    Eigen::VectorXd center;
    /// r_{1−α} on the √n scale.
    double radius = 0.0;
    double level = 0.95;
    /// One (lo, hi) per coordinate the selector constrains.
    std::vector<std::pair<double, double>> intervals;
    /// True when more than `level` of the draws sit exactly on the center.
    bool degenerate = false;
};

}  // namespace sppost
