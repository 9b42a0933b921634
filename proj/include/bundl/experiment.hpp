// Subject-disjoint cross-validation: the outer loop splits subjects into
// folds, an inner subject split tunes the learning rate and the operating
// threshold on noisy labels only, and the held-out fold is scored against
// the requested evaluation labels (clean ones, for simulated corpora).

#pragma once

#include "bundl/container.hpp"
#include "bundl/eval.hpp"
#include "bundl/train.hpp"

namespace bundl {

// Throws std::invalid_argument when folds < 2, folds exceed the subject
// count, or a fold leaves no training subject after the inner split. One
// line per completed fold goes to *progress when given.
MetricsReport cross_validate(const CorpusView& corpus, const LabelSet& train_labels,
                             const LabelSet& eval_labels, const TrainConfig& base,
                             const CvConfig& cv, std::ostream* progress = nullptr);

// Mean and population standard deviation, ignoring NaN entries.
Aggregate aggregate(std::span<const double> values);

}  // namespace bundl
