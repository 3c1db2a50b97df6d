#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace forkent::entropy {

// Kahan (compensated) summation. Pair-distance sums must be stable under
// row permutations to 1e-12, which plain accumulation does not guarantee
// once populations reach a few thousand forks.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

namespace kernels {

// Accumulates sum over the batch of 1 - exp(-gamma * l1[i]). Every variant
// adds terms to `acc` in array order, so variants differ only in the
// rounding of the exp evaluation itself (< 1 ulp), never in summation
// order.
using BatchFn = void (*)(const double* l1, std::size_t count, double gamma,
                         CompensatedSum& acc);

// Reference implementation: libm exp, one term at a time.
void accumulate_scalar(const double* l1, std::size_t count, double gamma, CompensatedSum& acc);

#if FORKENT_HAVE_AVX2
// 4-wide AVX2+FMA variant with a polynomial double-precision exp.
void accumulate_avx2(const double* l1, std::size_t count, double gamma, CompensatedSum& acc);
#endif

// Currently dispatched kernel (auto-detected on first use).
BatchFn active();
std::string_view active_name();

// Forces a kernel: "auto", "scalar" or "avx2". Returns false when the
// requested variant is not available on this build/CPU. Not thread-safe;
// call during startup, before compute work begins.
bool select(std::string_view name);

// Variant names usable with select() on this machine.
std::vector<std::string> available();

}  // namespace kernels
}  // namespace forkent::entropy
