#include "ddechart/hermite.hpp"

#include <algorithm>
#include <cmath>

#include "ddechart/error.hpp"

namespace ddechart {

HermiteSeries::HermiteSeries(std::vector<double> nodes, std::vector<double> values,
                             std::vector<double> derivs)
    : nodes_(std::move(nodes)), values_(std::move(values)), derivs_(std::move(derivs)) {
    if (nodes_.size() < 2)
        fail("invalid-domain", "HermiteSeries needs at least two nodes");
    if (nodes_.size() != values_.size() || nodes_.size() != derivs_.size())
        fail("invalid-domain", "HermiteSeries node/value/deriv sizes differ");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
        if (!(nodes_[i] < nodes_[i + 1]))
            fail("invalid-domain", "HermiteSeries nodes must be strictly increasing");
    for (double x : values_)
        if (!std::isfinite(x)) fail("invalid-domain", "non-finite value sample");
    for (double x : derivs_)
        if (!std::isfinite(x)) fail("invalid-domain", "non-finite derivative sample");
}

std::size_t HermiteSeries::locate(double t) const {
    // Panel index i with nodes_[i] <= t <= nodes_[i+1], clamped at the ends.
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    if (it == nodes_.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(i, nodes_.size() - 2);
}

double HermiteSeries::value(double t) const {
    std::size_t i = locate(t);
    if (t == nodes_[i]) return values_[i];
    if (t == nodes_[i + 1]) return values_[i + 1];
    const double dt = nodes_[i + 1] - nodes_[i];
    const double s = (t - nodes_[i]) / dt;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * values_[i] + h10 * dt * derivs_[i] + h01 * values_[i + 1] +
           h11 * dt * derivs_[i + 1];
}

double HermiteSeries::deriv(double t) const {
    std::size_t i = locate(t);
    if (t == nodes_[i]) return derivs_[i];
    if (t == nodes_[i + 1]) return derivs_[i + 1];
    const double dt = nodes_[i + 1] - nodes_[i];
    const double s = (t - nodes_[i]) / dt;
    const double s2 = s * s;
    const double g00 = (6 * s2 - 6 * s) / dt;
    const double g10 = 3 * s2 - 4 * s + 1;
    const double g01 = (-6 * s2 + 6 * s) / dt;
    const double g11 = 3 * s2 - 2 * s;
    return g00 * values_[i] + g10 * derivs_[i] + g01 * values_[i + 1] + g11 * derivs_[i + 1];
}

void HermiteSeries::append(double t, double value, double deriv) {
    if (!(t > nodes_.back()))
        fail("invalid-domain", "HermiteSeries::append requires increasing time");
    nodes_.push_back(t);
    values_.push_back(value);
    derivs_.push_back(deriv);
}

}  // namespace ddechart
