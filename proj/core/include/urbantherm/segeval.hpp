#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbantherm/mask.hpp"

namespace urbantherm {

/// Rows are ground-truth classes, columns predicted classes.
using ConfusionMatrix = std::array<std::array<std::uint64_t, kClassCount>, kClassCount>;

struct IoUReport {
    /// nullopt where the class is absent from both masks.
    std::array<std::optional<double>, kClassCount> per_class_iou{};
    double miou = 0.0;
    double pixel_accuracy = 0.0;
    ConfusionMatrix confusion{};
    std::size_t k_effective = 0;
};

ConfusionMatrix confusion_matrix(const LabelMask& gt, const LabelMask& pred);

/// IoU per class present in either mask, mIoU averaged over those classes only,
/// pixel accuracy over all pixels (background included).
IoUReport evaluate(const LabelMask& gt, const LabelMask& pred);
IoUReport report_from_confusion(const ConfusionMatrix& confusion);

struct EvalPair {
    std::string image_id;
    int view_id = 0;
    const LabelMask* gt = nullptr;
    const LabelMask* pred = nullptr;
};

struct ViewScore {
    double mean_miou = 0.0;
    std::size_t image_count = 0;
};

struct BatchReport {
    std::map<int, ViewScore> per_view;
    /// Unweighted mean of the per-view means.
    double overall_miou = 0.0;
    std::vector<std::string> warnings;
};

/// Views listed in `expected_views` that receive no pairs are excluded and
/// reported as warnings. Throws EmptyInputError when there are no pairs at all.
BatchReport evaluate_batch(std::span<const EvalPair> pairs, std::span<const int> expected_views = {});

/// Same aggregation from already computed per-image mIoU values.
BatchReport aggregate_by_view(std::span<const std::pair<int, double>> view_miou,
                              std::span<const int> expected_views = {});

}  // namespace urbantherm
