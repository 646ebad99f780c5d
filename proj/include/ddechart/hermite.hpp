#pragma once

#include <cstddef>
#include <vector>

namespace ddechart {

// Piecewise cubic Hermite data on an arbitrary strictly increasing node set.
// Each panel interpolates (value, derivative) at both ends, so the represented
// function is C^1 across nodes by construction. Shared engine behind
// IntervalFunction (domain [-h,0]) and Trajectory histories (domain [-h,t_end]).
class HermiteSeries {
public:
    HermiteSeries() = default;
    HermiteSeries(std::vector<double> nodes, std::vector<double> values,
                  std::vector<double> derivs);

    double front_time() const { return nodes_.front(); }
    double back_time() const { return nodes_.back(); }
    std::size_t size() const { return nodes_.size(); }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& derivs() const { return derivs_; }

    // Interpolated value / derivative at t in [front_time, back_time].
    // Exact at nodes (stored data is returned directly).
    double value(double t) const;
    double deriv(double t) const;

    void append(double t, double value, double deriv);

private:
    std::size_t locate(double t) const;

    std::vector<double> nodes_, values_, derivs_;
};

}  // namespace ddechart
