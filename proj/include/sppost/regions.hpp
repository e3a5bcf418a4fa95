#pragma once

#include "sppost/types.hpp"

#include <Eigen/Dense>

#include <map>
#include <utility>
#include <vector>

namespace sppost {

/// Projected posterior draws together with the LASSO center they are
/// measured against.
struct ProjectedSample {
    std::vector<SparseDraw> draws;
    Eigen::VectorXd center;
    Eigen::Index n = 1;
    double level = 0.95;

    void validate() const;
};

double minkowski_norm(const Eigen::VectorXd& x, const NormSelector& selector);

/// Smallest observed value d with #{d_i ≤ d}/size ≥ level.
double empirical_quantile(std::vector<double> distances, double level);

/// r_{1−α}: the empirical `level`-quantile of ‖√n(θ*_i − center)‖_K.
double radius_quantile(const ProjectedSample& sample, const NormSelector& selector);
double radius_quantile(const ProjectedSample& sample, const NormSelector& selector, double level);

/// center_j ± r/√n with r the Component(j) radius at the sample's level.
std::pair<double, double> component_interval(const ProjectedSample& sample, Eigen::Index j);
std::pair<double, double> component_interval(const ProjectedSample& sample, Eigen::Index j,
                                             double level);

/// Full region for a selector, including per-coordinate intervals for
/// Component / Rectangle selectors.
CredibleRegion credible_region(const ProjectedSample& sample, const NormSelector& selector);

/// Per-component credibility for a k-dimensional hyper-rectangle with joint
/// credibility `joint_level`: joint_level^(1/k).
double rectangle_level(int k, double joint_level);

/// Empirical frequency of each distinct support among the draws.
std::map<std::vector<Eigen::Index>, double> model_probabilities(const ProjectedSample& sample);

}  // namespace sppost
