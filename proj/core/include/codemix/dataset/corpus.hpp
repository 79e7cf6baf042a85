#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace codemix::dataset {

struct LabeledExample {
  std::string id;
  std::string text;
  std::size_t label = 0;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// Ordered examples plus label names. class_counts() is kept in sync with the
// examples on every mutation.
class LabeledCorpus {
 public:
  LabeledCorpus() = default;
  explicit LabeledCorpus(std::vector<std::string> label_names);
  LabeledCorpus(std::vector<std::string> label_names,
                std::vector<LabeledExample> examples);

  void add(LabeledExample example);

  const std::vector<LabeledExample>& examples() const noexcept { return examples_; }
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }
  const std::vector<std::size_t>& class_counts() const noexcept { return class_counts_; }
  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }
  std::size_t num_classes() const noexcept { return label_names_.size(); }
  const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }

  std::vector<std::string> texts() const;
  std::vector<std::size_t> labels() const;

  friend bool operator==(const LabeledCorpus&, const LabeledCorpus&) = default;

 private:
  void check_label(std::size_t label) const;

  std::vector<std::string> label_names_;
  std::vector<LabeledExample> examples_;
  std::vector<std::size_t> class_counts_;
};

// Order-preserving; label names must match exactly.
LabeledCorpus concat(const LabeledCorpus& a, const LabeledCorpus& b);

}  // namespace codemix::dataset
