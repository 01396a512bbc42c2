#pragma once

#include <vector>

namespace fqlems {

/// Piecewise-linear 1-D table, held constant beyond its end points.
class LookupTable {
public:
    LookupTable() = default;
    LookupTable(std::vector<double> xs, std::vector<double> ys);

    static LookupTable constant(double value) { return LookupTable({0.0}, {value}); }

    double operator()(double x) const;

    const std::vector<double>& xs() const noexcept { return xs_; }
    const std::vector<double>& ys() const noexcept { return ys_; }
    bool empty() const noexcept { return xs_.empty(); }
    bool non_decreasing() const;
    double min_value() const;

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

}  // namespace fqlems
