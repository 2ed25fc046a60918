#include "flowcast/types.hpp"

#include <array>
#include <cmath>

namespace flowcast {

void checkObjective(const Objective& objective) {
    const std::array<double, 3> weights{objective.timeWeight, objective.costWeight,
                                        objective.energyWeight};
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw Error("objective weights must be finite and nonnegative");
        }
    }
    if (objective.timeWeight == 0.0 && objective.costWeight == 0.0 &&
        objective.energyWeight == 0.0) {
        throw Error("objective weights must not all be zero");
    }
}

std::string formatDouble(double value) {
    std::array<char, 64> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) return "0";
    return std::string(buf.data(), ptr);
}

}  // namespace flowcast
