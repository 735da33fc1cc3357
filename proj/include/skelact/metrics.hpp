#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skelact/keypoints.hpp"

namespace skelact {

/// counts[truth][prediction].
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(LabelMap labels);

    void add(std::size_t truth, std::size_t prediction);

    const LabelMap& labels() const { return labels_; }
    std::size_t num_classes() const { return labels_.size(); }
    std::size_t at(std::size_t truth, std::size_t prediction) const;
    std::size_t total() const { return total_; }
    std::size_t trace() const;
    std::size_t row_sum(std::size_t truth) const;
    std::size_t column_sum(std::size_t prediction) const;
    const std::vector<std::vector<std::size_t>>& counts() const { return counts_; }

private:
    LabelMap labels_;
    std::vector<std::vector<std::size_t>> counts_;
    std::size_t total_ = 0;
};

/// Throws UnknownLabel if any index is outside the label map.
ConfusionMatrix confusion(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                          const LabelMap& labels);

/// trace / total. Throws EmptyMatrix on a matrix with no entries.
double accuracy(const ConfusionMatrix& cm);

/// Entry i is counts[i][i] / row_sum(i); nullopt when class i never occurs as
/// ground truth.
std::vector<std::optional<double>> per_class_accuracy(const ConfusionMatrix& cm);

struct MetricsReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    std::vector<std::optional<double>> per_class;
};

MetricsReport make_report(ConfusionMatrix cm);

/// Header row of label names, then one row per truth class.
std::string to_csv(const ConfusionMatrix& cm);
/// {"labels", "confusion", "accuracy", "per_class_accuracy"}; undefined
/// per-class entries are null.
std::string to_json(const MetricsReport& report);

} // namespace skelact
