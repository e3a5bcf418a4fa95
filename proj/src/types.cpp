#include "sppost/types.hpp"

#include "sppost/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sppost {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DegenerateDiagonal: return "DegenerateDiagonal";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd Y) : X_(std::move(X)), Y_(std::move(Y)) {
    if (X_.rows() != Y_.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "X has " + std::to_string(X_.rows()) + " rows but Y has " +
                        std::to_string(Y_.size()) + " entries");
    }
    if (X_.rows() < 1 || X_.cols() < 1) {
        throw Error(ErrorKind::DimensionMismatch, "dataset needs n >= 1 and p >= 1");
    }
    if (!X_.allFinite() || !Y_.allFinite()) {
        throw Error(ErrorKind::NonFiniteInput, "X and Y must contain only finite values");
    }
    const double n = static_cast<double>(X_.rows());
    gram_ = Eigen::MatrixXd::Zero(X_.cols(), X_.cols());
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(X_.transpose());
    gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
    gram_ /= n;
    xty_ = X_.transpose() * Y_ / n;
    yty_ = Y_.squaredNorm();
}

Dataset validate_dataset(Eigen::MatrixXd X, Eigen::VectorXd Y) {
    return Dataset(std::move(X), std::move(Y));
}

void PriorConfig::validate() const {
    if (!(a_n >= 0.0) || !(b1 >= 0.0) || !(b2 >= 0.0) || !std::isfinite(a_n) ||
        !std::isfinite(b1) || !std::isfinite(b2)) {
        throw Error(ErrorKind::InvalidArgument, "prior hyperparameters must be finite and >= 0");
    }
}

void FitConfig::validate() const {
    if (lambda_n && !(*lambda_n > 0.0 && std::isfinite(*lambda_n))) {
        throw Error(ErrorKind::InvalidArgument, "lambda_n must be positive");
    }
    if (draws < 2) throw Error(ErrorKind::InvalidArgument, "draws must be >= 2");
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "level must lie in (0, 1)");
    }
    if (target_coverage && !(*target_coverage > 0.0 && *target_coverage < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "target coverage must lie in (0, 1)");
    }
    if (cv_folds < 2) throw Error(ErrorKind::InvalidArgument, "cv folds must be >= 2");
    if (cv_grid_size < 1) throw Error(ErrorKind::InvalidArgument, "cv grid must be nonempty");
}

NormSelector NormSelector::component(Eigen::Index j) {
    if (j < 0) throw Error(ErrorKind::InvalidArgument, "component index must be >= 0");
    return NormSelector(Kind::Component, {j});
}

NormSelector NormSelector::rectangle(std::vector<Eigen::Index> indices) {
    if (indices.empty()) throw Error(ErrorKind::InvalidArgument, "rectangle needs an index");
    auto sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorKind::InvalidArgument, "rectangle indices must be distinct");
    }
    if (sorted.front() < 0) throw Error(ErrorKind::InvalidArgument, "negative rectangle index");
    return NormSelector(Kind::Rectangle, std::move(indices));
}

void NormSelector::check_dimension(Eigen::Index p) const {
    for (auto j : indices_) {
        if (j < 0 || j >= p) {
            throw Error(ErrorKind::InvalidArgument,
                        "selector index " + std::to_string(j) + " outside [0, " +
                            std::to_string(p) + ")");
        }
    }
}

}  // namespace sppost
