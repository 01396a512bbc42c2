#include "fqlems/lookup_table.hpp"

#include <algorithm>
#include <cmath>

#include "fqlems/errors.hpp"

namespace fqlems {

LookupTable::LookupTable(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.empty() || xs_.size() != ys_.size()) {
        throw ConfigError("lookup table needs matching, non-empty x and y columns");
    }
    for (std::size_t k = 0; k < xs_.size(); ++k) {
        if (!std::isfinite(xs_[k]) || !std::isfinite(ys_[k])) {
            throw ConfigError("lookup table contains a non-finite entry");
        }
        if (k > 0 && !(xs_[k] > xs_[k - 1])) {
            throw ConfigError("lookup table x column must be strictly increasing");
        }
    }
}

double LookupTable::operator()(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return ys_[lo] + w * (ys_[hi] - ys_[lo]);
}

bool LookupTable::non_decreasing() const {
    return std::is_sorted(ys_.begin(), ys_.end());
}

double LookupTable::min_value() const {
    return *std::min_element(ys_.begin(), ys_.end());
}

}  // namespace fqlems
