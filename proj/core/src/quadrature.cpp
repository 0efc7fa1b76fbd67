#include "fbmm/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace fbmm::quadrature {

namespace {
using Rule = boost::math::quadrature::gauss<double, 20>;
}

std::span<const double> gauss_nodes() {
    static const auto& nodes = Rule::abscissa();
    return {nodes.data(), nodes.size()};
}

std::span<const double> gauss_weights() {
    static const auto& weights = Rule::weights();
    return {weights.data(), weights.size()};
}

}  // namespace fbmm::quadrature
