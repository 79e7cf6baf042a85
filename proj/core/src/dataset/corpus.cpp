#include "codemix/dataset/corpus.hpp"

#include "codemix/error.hpp"

namespace codemix::dataset {

LabeledCorpus::LabeledCorpus(std::vector<std::string> label_names)
    : label_names_(std::move(label_names)),
      class_counts_(label_names_.size(), 0) {}

LabeledCorpus::LabeledCorpus(std::vector<std::string> label_names,
                             std::vector<LabeledExample> examples)
    : LabeledCorpus(std::move(label_names)) {
  examples_.reserve(examples.size());
  for (auto& e : examples) add(std::move(e));
}

void LabeledCorpus::check_label(std::size_t label) const {
  if (label >= label_names_.size()) {
    fail(ErrorKind::kData, "corpus: label index " + std::to_string(label) +
                               " out of range for " +
                               std::to_string(label_names_.size()) + " classes");
  }
}

void LabeledCorpus::add(LabeledExample example) {
  check_label(example.label);
  ++class_counts_[example.label];
  examples_.push_back(std::move(example));
}

std::vector<std::string> LabeledCorpus::texts() const {
  std::vector<std::string> out;
  out.reserve(examples_.size());
  for (const auto& e : examples_) out.push_back(e.text);
  return out;
}

std::vector<std::size_t> LabeledCorpus::labels() const {
  std::vector<std::size_t> out;
  out.reserve(examples_.size());
  for (const auto& e : examples_) out.push_back(e.label);
  return out;
}

LabeledCorpus concat(const LabeledCorpus& a, const LabeledCorpus& b) {
  if (a.label_names() != b.label_names()) {
    fail(ErrorKind::kSchema, "concat: label_names differ between corpora");
  }
  LabeledCorpus out(a.label_names());
  for (const auto& e : a.examples()) out.add(e);
  for (const auto& e : b.examples()) out.add(e);
  return out;
}

}  // namespace codemix::dataset
