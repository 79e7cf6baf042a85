#include "codemix/dataset/tsv.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include "codemix/error.hpp"

namespace codemix::dataset {
namespace {

std::optional<std::size_t> column_index(const std::vector<std::string>& header,
                                        const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::size_t require_column(const std::vector<std::string>& header,
                           const std::string& name,
                           const std::filesystem::path& path) {
  const auto idx = column_index(header, name);
  if (!idx) {
    fail(ErrorKind::kSchema,
         path.string() + ": header has no column '" + name + "'");
  }
  return *idx;
}

bool is_nan_text(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  return text.empty() || text == "nan" || text == "NaN" || text == "NAN";
}

bool getline_any(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      out.emplace_back(line.substr(pos));
      return out;
    }
    out.emplace_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

LabeledCorpus load_tsv(const std::filesystem::path& path, const TsvSchema& schema,
                       const textprep::CleanRules& rules, LoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());

  std::string line;
  if (!getline_any(in, line)) {
    fail(ErrorKind::kSchema, path.string() + ": missing header row");
  }
  const auto header = split_tabs(line);
  const std::size_t text_idx = require_column(header, schema.text_col, path);
  const std::size_t label_idx = require_column(header, schema.label_col, path);
  std::optional<std::size_t> id_idx;
  if (!schema.id_col.empty()) id_idx = require_column(header, schema.id_col, path);

  LoadStats local;
  LabeledCorpus corpus(schema.label_names);
  std::size_t row = 0;
  while (getline_any(in, line)) {
    ++row;
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    ++local.rows_in;
    const auto fields = split_tabs(line);
    auto field = [&](std::size_t idx) -> std::string_view {
      return idx < fields.size() ? std::string_view(fields[idx]) : std::string_view();
    };

    const auto label = field(label_idx);
    if (label.empty()) {
      ++local.dropped_no_label;
      continue;
    }
    const auto raw_text = field(text_idx);
    if (is_nan_text(raw_text)) {
      ++local.dropped_nan;
      continue;
    }
    const auto it = std::find(schema.label_names.begin(), schema.label_names.end(), label);
    if (it == schema.label_names.end()) {
      fail(ErrorKind::kData, path.string() + ": row " + std::to_string(row) +
                                 ": unknown label '" + std::string(label) + "'");
    }
    std::string text = textprep::clean_text(raw_text, rules);
    if (text.empty()) {
      ++local.dropped_empty_after_clean;
      continue;
    }
    LabeledExample example;
    example.id = id_idx ? std::string(field(*id_idx)) : std::to_string(row);
    example.text = std::move(text);
    example.label = static_cast<std::size_t>(it - schema.label_names.begin());
    corpus.add(std::move(example));
  }
  local.rows_out = corpus.size();
  if (stats) *stats = local;
  return corpus;
}

void save_tsv(const LabeledCorpus& corpus, const std::filesystem::path& path,
              const TsvSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  const std::string id_col = schema.id_col.empty() ? "id" : schema.id_col;
  out << id_col << '\t' << schema.text_col << '\t' << schema.label_col << '\n';
  for (const auto& e : corpus.examples()) {
    out << e.id << '\t' << e.text << '\t' << corpus.label_names()[e.label] << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace codemix::dataset
