#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace codemix::metrics {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes = 0)
      : n_classes_(n_classes), counts_(n_classes * n_classes, 0) {}

  std::size_t n_classes() const noexcept { return n_classes_; }
  std::size_t at(std::size_t truth, std::size_t pred) const {
    return counts_[truth * n_classes_ + pred];
  }
  std::size_t& at(std::size_t truth, std::size_t pred) {
    return counts_[truth * n_classes_ + pred];
  }
  std::size_t total() const noexcept;
  std::size_t support(std::size_t k) const;     // row sum
  std::size_t predicted(std::size_t k) const;   // column sum

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_classes_;
  std::vector<std::size_t> counts_;
};

ConfusionMatrix confusion(std::span<const std::size_t> preds,
                          std::span<const std::size_t> labels, std::size_t n_classes);

struct ClassScores {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct WeightedReport {
  std::vector<ClassScores> per_class;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t total = 0;
};

// Per-class P/R/F1 with the zero-division convention (an undefined ratio is
// 0), averaged with weights support_k / total. Throws a data error when the
// matrix is empty. Label names default to the class indices.
WeightedReport weighted_prf(const ConfusionMatrix& m,
                            std::span<const std::string> label_names = {});

nlohmann::json to_json(const WeightedReport& report);
WeightedReport report_from_json(const nlohmann::json& j);

// Fixed-width table, scores rounded to 2 decimals:
//   <first_header>  W-Precision  W-Recall  W-F1 Score
std::string format_table(std::span<const std::pair<std::string, WeightedReport>> rows,
                         const std::string& first_header = "Dataset Distribution");

}  // namespace codemix::metrics
