#include "codemix/metrics/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "codemix/error.hpp"

namespace codemix::metrics {

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t n = 0;
  for (const auto c : counts_) n += c;
  return n;
}

std::size_t ConfusionMatrix::support(std::size_t k) const {
  std::size_t n = 0;
  for (std::size_t p = 0; p < n_classes_; ++p) n += at(k, p);
  return n;
}

std::size_t ConfusionMatrix::predicted(std::size_t k) const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < n_classes_; ++t) n += at(t, k);
  return n;
}

ConfusionMatrix confusion(std::span<const std::size_t> preds,
                          std::span<const std::size_t> labels, std::size_t n_classes) {
  if (preds.size() != labels.size()) {
    fail(ErrorKind::kData, "confusion: " + std::to_string(preds.size()) +
                               " predictions vs " + std::to_string(labels.size()) +
                               " labels");
  }
  ConfusionMatrix m(n_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] >= n_classes || labels[i] >= n_classes) {
      fail(ErrorKind::kData, "confusion: class index out of range at position " +
                                 std::to_string(i));
    }
    ++m.at(labels[i], preds[i]);
  }
  return m;
}

WeightedReport weighted_prf(const ConfusionMatrix& m,
                            std::span<const std::string> label_names) {
  const std::size_t total = m.total();
  if (total == 0) fail(ErrorKind::kData, "weighted_prf: empty confusion matrix");

  WeightedReport report;
  report.total = total;
  for (std::size_t k = 0; k < m.n_classes(); ++k) {
    ClassScores s;
    s.label = k < label_names.size() ? label_names[k] : std::to_string(k);
    const double tp = static_cast<double>(m.at(k, k));
    const std::size_t predicted = m.predicted(k);
    s.support = m.support(k);
    s.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    s.recall = s.support ? tp / static_cast<double>(s.support) : 0.0;
    const double pr = s.precision + s.recall;
    s.f1 = pr > 0.0 ? 2.0 * s.precision * s.recall / pr : 0.0;

    const double w = static_cast<double>(s.support) / static_cast<double>(total);
    report.precision += w * s.precision;
    report.recall += w * s.recall;
    report.f1 += w * s.f1;
    report.per_class.push_back(std::move(s));
  }
  return report;
}

nlohmann::json to_json(const WeightedReport& report) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& s : report.per_class) {
    per_class.push_back({{"label", s.label},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support}});
  }
  return {{"per_class", per_class},
          {"weighted",
           {{"precision", report.precision}, {"recall", report.recall}, {"f1", report.f1}}},
          {"total", report.total}};
}

WeightedReport report_from_json(const nlohmann::json& j) {
  WeightedReport report;
  for (const auto& c : j.at("per_class")) {
    report.per_class.push_back(ClassScores{c.at("label").get<std::string>(),
                                           c.at("precision").get<double>(),
                                           c.at("recall").get<double>(),
                                           c.at("f1").get<double>(),
                                           c.at("support").get<std::size_t>()});
  }
  const auto& w = j.at("weighted");
  report.precision = w.at("precision").get<double>();
  report.recall = w.at("recall").get<double>();
  report.f1 = w.at("f1").get<double>();
  report.total = j.at("total").get<std::size_t>();
  return report;
}

std::string format_table(std::span<const std::pair<std::string, WeightedReport>> rows,
                         const std::string& first_header) {
  std::size_t width = first_header.size();
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  const int w = static_cast<int>(width);

  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %11s  %8s  %10s\n", w, first_header.c_str(),
                "W-Precision", "W-Recall", "W-F1 Score");
  out += line;
  out += std::string(width + 2 + 11 + 2 + 8 + 2 + 10, '-') + "\n";
  for (const auto& [name, r] : rows) {
    std::snprintf(line, sizeof line, "%-*s  %11.2f  %8.2f  %10.2f\n", w, name.c_str(),
                  r.precision, r.recall, r.f1);
    out += line;
  }
  return out;
}

}  // namespace codemix::metrics
