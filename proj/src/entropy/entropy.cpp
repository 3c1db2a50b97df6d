#include "forkent/entropy/entropy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "forkent/entropy/kernels.hpp"

namespace forkent::entropy {

namespace {

constexpr std::size_t kBatch = 1024;

void require_valid_gamma(double gamma) {
    if (!std::isfinite(gamma) || gamma <= 0.0) {
        throw std::invalid_argument("gamma must be a finite positive real");
    }
}

class BatchAccumulator {
 public:
    explicit BatchAccumulator(double gamma) : gamma_(gamma), fn_(kernels::active()) {
        buffer_.reserve(kBatch);
    }

    void push(std::uint64_t l1) {
        buffer_.push_back(static_cast<double>(l1));
        if (buffer_.size() == kBatch) {
            flush();
        }
    }

    double finish() {
        flush();
        return acc_.value();
    }

 private:
    void flush() {
        if (!buffer_.empty()) {
            fn_(buffer_.data(), buffer_.size(), gamma_, acc_);
            buffer_.clear();
        }
    }

    double gamma_;
    kernels::BatchFn fn_;
    std::vector<double> buffer_;
    CompensatedSum acc_;
};

}  // namespace

std::string_view to_string(ForkLabel label) {
    switch (label) {
        case ForkLabel::redundant:
            return "redundant";
        case ForkLabel::distinctive:
            return "distinctive";
        case ForkLabel::neutral:
            return "neutral";
    }
    return "neutral";
}

double pair_distance(const FileModVector& a, const FileModVector& b, double gamma) {
    require_valid_gamma(gamma);
    return 1.0 - std::exp(-gamma * static_cast<double>(l1_distance(a, b)));
}

EntropyResult quadratic_entropy(const FileModificationMatrix& m, double gamma) {
    require_valid_gamma(gamma);
    std::span<const FileModVector> rows = m.rows();
    const std::size_t n = rows.size();

    BatchAccumulator acc(gamma);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            acc.push(l1_distance(rows[i], rows[j]));
        }
    }
    double pair_sum = acc.finish();

    EntropyResult result;
    result.snapshot_ref = m.snapshot_ref();
    result.fork_count = n;
    result.file_count = m.file_count();
    result.gamma = gamma;
    result.value = 2.0 * pair_sum / (static_cast<double>(n) * static_cast<double>(n));
    return result;
}

double sum_distances_to_population(const FileModificationMatrix& m, const FileModVector& new_row,
                                   double gamma) {
    require_valid_gamma(gamma);
    BatchAccumulator acc(gamma);
    for (const FileModVector& row : m.rows()) {
        acc.push(l1_distance(row, new_row));
    }
    return acc.finish();
}

double mean_distance_to_population(const FileModificationMatrix& m, const FileModVector& new_row,
                                   double gamma) {
    return sum_distances_to_population(m, new_row, gamma) /
           static_cast<double>(m.fork_count());
}

double entropy_after_add(double entropy_before, std::size_t m, double sum_new_distances) {
    if (m < 1) {
        throw std::invalid_argument("entropy_after_add: m must be >= 1");
    }
    if (!(sum_new_distances >= 0.0)) {
        throw std::invalid_argument("entropy_after_add: distance sum must be >= 0");
    }
    const double md = static_cast<double>(m);
    const double denom = (md + 1.0) * (md + 1.0);
    return md * md / denom * entropy_before + 2.0 / denom * sum_new_distances;
}

NewForkAssessment classify_new_fork(const FileModificationMatrix& m, const FileModVector& new_row,
                                    double gamma) {
    const double before = quadratic_entropy(m, gamma).value;
    const double sum = sum_distances_to_population(m, new_row, gamma);
    const double md = static_cast<double>(m.fork_count());
    const double mean = sum / md;
    const double denom = (md + 1.0) * (md + 1.0);

    NewForkAssessment out;
    out.mean_distance = mean;
    out.entropy_before = before;
    out.entropy_after = entropy_after_add(before, m.fork_count(), sum);
    out.delta = (2.0 * md * mean - (2.0 * md + 1.0) * before) / denom;
    out.delta_approx = (2.0 * md + 1.0) / denom * (mean - before);
    if (mean < before) {
        out.label = ForkLabel::redundant;
    } else if (mean > before) {
        out.label = ForkLabel::distinctive;
    } else {
        out.label = ForkLabel::neutral;
    }
    return out;
}

}  // namespace forkent::entropy
