#include <cmath>

#include "forkent/entropy/kernels.hpp"

namespace forkent::entropy::kernels {

void accumulate_scalar(const double* l1, std::size_t count, double gamma, CompensatedSum& acc) {
    for (std::size_t i = 0; i < count; ++i) {
        acc.add(1.0 - std::exp(-gamma * l1[i]));
    }
}

}  // namespace forkent::entropy::kernels
