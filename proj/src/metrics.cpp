#include "skelact/metrics.hpp"

#include <sstream>

#include <json.hpp>

#include "skelact/error.hpp"

namespace skelact {

ConfusionMatrix::ConfusionMatrix(LabelMap labels)
    : labels_(std::move(labels)),
      counts_(labels_.size(), std::vector<std::size_t>(labels_.size(), 0))
{
}

void ConfusionMatrix::add(std::size_t truth, std::size_t prediction)
{
    if (truth >= num_classes() || prediction >= num_classes())
        throw UnknownLabel("confusion pair (" + std::to_string(truth) + ", " +
                           std::to_string(prediction) + ") outside a " +
                           std::to_string(num_classes()) + "-class label map");
    ++counts_[truth][prediction];
    ++total_;
}

std::size_t ConfusionMatrix::at(std::size_t truth, std::size_t prediction) const
{
    return counts_.at(truth).at(prediction);
}

std::size_t ConfusionMatrix::trace() const
{
    std::size_t s = 0;
    for (std::size_t i = 0; i < num_classes(); ++i)
        s += counts_[i][i];
    return s;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const
{
    std::size_t s = 0;
    for (auto c : counts_.at(truth))
        s += c;
    return s;
}

std::size_t ConfusionMatrix::column_sum(std::size_t prediction) const
{
    std::size_t s = 0;
    for (const auto& row : counts_)
        s += row.at(prediction);
    return s;
}

ConfusionMatrix confusion(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                          const LabelMap& labels)
{
    ConfusionMatrix cm(labels);
    for (const auto& [t, p] : pairs)
        cm.add(t, p);
    return cm;
}

double accuracy(const ConfusionMatrix& cm)
{
    if (cm.total() == 0)
        throw EmptyMatrix("accuracy of an empty confusion matrix is undefined");
    return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

std::vector<std::optional<double>> per_class_accuracy(const ConfusionMatrix& cm)
{
    std::vector<std::optional<double>> out(cm.num_classes());
    for (std::size_t i = 0; i < cm.num_classes(); ++i) {
        const auto n = cm.row_sum(i);
        if (n > 0)
            out[i] = static_cast<double>(cm.at(i, i)) / static_cast<double>(n);
    }
    return out;
}

MetricsReport make_report(ConfusionMatrix cm)
{
    const double acc = accuracy(cm);
    auto per_class = per_class_accuracy(cm);
    return {std::move(cm), acc, std::move(per_class)};
}

std::string to_csv(const ConfusionMatrix& cm)
{
    std::ostringstream os;
    os << "truth\\predicted";
    for (const auto& n : cm.labels().names())
        os << ',' << n;
    os << '\n';
    for (std::size_t t = 0; t < cm.num_classes(); ++t) {
        os << cm.labels().name_of(t);
        for (std::size_t p = 0; p < cm.num_classes(); ++p)
            os << ',' << cm.at(t, p);
        os << '\n';
    }
    return os.str();
}

std::string to_json(const MetricsReport& report)
{
    nlohmann::json j;
    j["labels"] = report.confusion.labels().names();
    j["confusion"] = report.confusion.counts();
    j["accuracy"] = report.accuracy;
    j["total"] = report.confusion.total();
    auto per = nlohmann::json::array();
    for (const auto& v : report.per_class)
        per.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    j["per_class_accuracy"] = per;
    return j.dump(2) + "\n";
}

} // namespace skelact
