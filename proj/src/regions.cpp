#include "sppost/regions.hpp"

#include "sppost/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sppost {

void ProjectedSample::validate() const {
    if (draws.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 draws");
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "level must lie in (0, 1)");
    }
    for (const auto& d : draws) {
        if (d.theta_star.size() != center.size()) {
            throw Error(ErrorKind::DimensionMismatch, "draw length differs from center");
        }
    }
}

double minkowski_norm(const Eigen::VectorXd& x, const NormSelector& selector) {
    selector.check_dimension(x.size());
    switch (selector.kind()) {
        case NormSelector::Kind::MaxNorm: return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
        case NormSelector::Kind::EuclideanNorm: return x.norm();
        case NormSelector::Kind::L1Norm: return x.cwiseAbs().sum();
        case NormSelector::Kind::Component: return std::abs(x[selector.indices().front()]);
        case NormSelector::Kind::Rectangle: {
            double m = 0.0;
            for (auto j : selector.indices()) m = std::max(m, std::abs(x[j]));
            return m;
        }
    }
    return 0.0;
}

double empirical_quantile(std::vector<double> distances, double level) {
    if (distances.empty()) throw Error(ErrorKind::InvalidArgument, "no distances");
    if (!(level > 0.0 && level <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "level must lie in (0, 1]");
    }
    const std::size_t R = distances.size();
    // Smallest k with k/R >= level; the slack absorbs rounding in level·R.
    auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(R) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, R);
    std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     distances.end());
    return distances[k - 1];
}

double radius_quantile(const ProjectedSample& sample, const NormSelector& selector, double level) {
    sample.validate();
    selector.check_dimension(sample.center.size());
    const double root_n = std::sqrt(static_cast<double>(sample.n));
    std::vector<double> d;
    d.reserve(sample.draws.size());
    for (const auto& draw : sample.draws) {
        d.push_back(minkowski_norm(root_n * (draw.theta_star - sample.center), selector));
    }
    return empirical_quantile(std::move(d), level);
}

double radius_quantile(const ProjectedSample& sample, const NormSelector& selector) {
    return radius_quantile(sample, selector, sample.level);
}

std::pair<double, double> component_interval(const ProjectedSample& sample, Eigen::Index j,
                                             double level) {
    const double r = radius_quantile(sample, NormSelector::component(j), level);
    const double half = r / std::sqrt(static_cast<double>(sample.n));
    return {sample.center[j] - half, sample.center[j] + half};
}

std::pair<double, double> component_interval(const ProjectedSample& sample, Eigen::Index j) {
    return component_interval(sample, j, sample.level);
}

CredibleRegion credible_region(const ProjectedSample& sample, const NormSelector& selector) {
    CredibleRegion region;
    region.selector = selector;
    region.center = sample.center;
    region.level = sample.level;
    region.radius = radius_quantile(sample, selector);
    region.degenerate = region.radius == 0.0;
    const double half = region.radius / std::sqrt(static_cast<double>(sample.n));
    if (selector.kind() == NormSelector::Kind::Component ||
        selector.kind() == NormSelector::Kind::Rectangle) {
        for (auto j : selector.indices()) {
            region.intervals.emplace_back(sample.center[j] - half, sample.center[j] + half);
        }
    }
    return region;
}

double rectangle_level(int k, double joint_level) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (!(joint_level > 0.0 && joint_level < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "joint level must lie in (0, 1)");
    }
    return std::pow(joint_level, 1.0 / k);
}

std::map<std::vector<Eigen::Index>, double> model_probabilities(const ProjectedSample& sample) {
    std::map<std::vector<Eigen::Index>, std::size_t> counts;
    for (const auto& d : sample.draws) ++counts[d.support];
    std::map<std::vector<Eigen::Index>, double> probs;
    const double R = static_cast<double>(sample.draws.size());
    for (const auto& [support, c] : counts) probs[support] = static_cast<double>(c) / R;
    return probs;
}

}  // namespace sppost
