#include "urbantherm/segeval.hpp"

#include <fmt/format.h>

#include "urbantherm/errors.hpp"

namespace urbantherm {

ConfusionMatrix confusion_matrix(const LabelMask& gt, const LabelMask& pred) {
    if (!gt.same_shape(pred))
        throw DimensionError(fmt::format("ground truth is {}x{}, prediction is {}x{}", gt.width(), gt.height(),
                                         pred.width(), pred.height()));
    ConfusionMatrix m{};
    const auto g = gt.raster().pixels();
    const auto p = pred.raster().pixels();
    for (std::size_t i = 0; i < g.size(); ++i)
        ++m[g[i]][p[i]];
    return m;
}

IoUReport report_from_confusion(const ConfusionMatrix& confusion) {
    IoUReport r;
    r.confusion = confusion;
    std::array<std::uint64_t, kClassCount> row{}, col{};
    std::uint64_t total = 0, correct = 0;
    for (std::size_t g = 0; g < kClassCount; ++g)
        for (std::size_t p = 0; p < kClassCount; ++p) {
            row[g] += confusion[g][p];
            col[p] += confusion[g][p];
            total += confusion[g][p];
        }
    double sum = 0.0;
    for (std::size_t c = 0; c < kClassCount; ++c) {
        correct += confusion[c][c];
        const std::uint64_t inter = confusion[c][c];
        const std::uint64_t uni = row[c] + col[c] - inter;
        if (uni == 0)
            continue;
        const double iou = static_cast<double>(inter) / static_cast<double>(uni);
        r.per_class_iou[c] = iou;
        sum += iou;
        ++r.k_effective;
    }
    if (r.k_effective == 0 || total == 0)
        throw DegenerateResultError("no class is present in either mask; mIoU is undefined");
    r.miou = sum / static_cast<double>(r.k_effective);
    r.pixel_accuracy = static_cast<double>(correct) / static_cast<double>(total);
    return r;
}

IoUReport evaluate(const LabelMask& gt, const LabelMask& pred) {
    return report_from_confusion(confusion_matrix(gt, pred));
}

BatchReport aggregate_by_view(std::span<const std::pair<int, double>> view_miou, std::span<const int> expected_views) {
    if (view_miou.empty())
        throw EmptyInputError("batch evaluation needs at least one mask pair");
    BatchReport out;
    std::map<int, double> sums;
    for (const auto& [view, miou] : view_miou) {
        sums[view] += miou;
        ++out.per_view[view].image_count;
    }
    for (auto& [view, score] : out.per_view)
        score.mean_miou = sums[view] / static_cast<double>(score.image_count);
    for (int v : expected_views)
        if (!out.per_view.contains(v))
            out.warnings.push_back(fmt::format("view {} has no mask pairs; excluded from the mean", v));
    double total = 0.0;
    for (const auto& [view, score] : out.per_view)
        total += score.mean_miou;
    out.overall_miou = total / static_cast<double>(out.per_view.size());
    return out;
}

BatchReport evaluate_batch(std::span<const EvalPair> pairs, std::span<const int> expected_views) {
    std::vector<std::pair<int, double>> scores;
    scores.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (!p.gt || !p.pred)
            throw EmptyInputError(fmt::format("pair '{}' is missing a mask", p.image_id));
        scores.emplace_back(p.view_id, evaluate(*p.gt, *p.pred).miou);
    }
    return aggregate_by_view(scores, expected_views);
}

}  // namespace urbantherm
