#pragma once

#include <cstdint>
#include <string>

#include "forkent/entropy/matrix.hpp"

namespace forkent::entropy {

inline constexpr double kDefaultGamma = 1.0;

// Rao's quadratic entropy of a file modification matrix under the
// Laplacian-kernel distance 1 - exp(-gamma * L1). Values live in [0, 1).
struct EntropyResult {
    std::string snapshot_ref;
    std::size_t fork_count = 0;   // m
    std::size_t file_count = 0;   // n
    double gamma = kDefaultGamma;
    double value = 0.0;
};

enum class ForkLabel { redundant, distinctive, neutral };

std::string_view to_string(ForkLabel label);

// What adding one more fork would do to a population's entropy.
// `delta` uses the exact update (2m*mean - (2m+1)*before) / (m+1)^2;
// `delta_approx` is the 1/(m+0.5) ~= 1/m shortcut, kept for comparison
// because it can carry the wrong sign near the boundary.
struct NewForkAssessment {
    double mean_distance = 0.0;  // average kernel distance to existing rows
    double entropy_before = 0.0;
    double entropy_after = 0.0;
    double delta = 0.0;
    double delta_approx = 0.0;
    ForkLabel label = ForkLabel::neutral;
};

// Kernel distance 1 - exp(-gamma * l1_distance(a, b)) in [0, 1).
// gamma must be finite and > 0.
double pair_distance(const FileModVector& a, const FileModVector& b, double gamma);

// (1/m^2) * sum over all ordered row pairs of pair_distance. The diagonal
// contributes zero; unordered pairs are computed once and doubled.
EntropyResult quadratic_entropy(const FileModificationMatrix& m, double gamma = kDefaultGamma);

// Sum of kernel distances from every existing row to `new_row`.
double sum_distances_to_population(const FileModificationMatrix& m, const FileModVector& new_row,
                                   double gamma = kDefaultGamma);

// Mean kernel distance from the population to `new_row`.
double mean_distance_to_population(const FileModificationMatrix& m, const FileModVector& new_row,
                                   double gamma = kDefaultGamma);

// Entropy of the (m+1)-row matrix, from the m-row entropy and the sum of
// the new row's distances: m^2/(m+1)^2 * before + 2/(m+1)^2 * sum.
// Exactly equals direct recomputation on the extended matrix.
double entropy_after_add(double entropy_before, std::size_t m, double sum_new_distances);

NewForkAssessment classify_new_fork(const FileModificationMatrix& m, const FileModVector& new_row,
                                    double gamma = kDefaultGamma);

}  // namespace forkent::entropy
