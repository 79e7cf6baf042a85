#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "codemix/dataset/corpus.hpp"
#include "codemix/textprep/clean.hpp"

namespace codemix::dataset {

struct TsvSchema {
  std::string text_col = "text";
  std::string label_col = "label";
  std::string id_col;  // empty: ids are 1-based data row numbers
  std::vector<std::string> label_names = {"NOT", "HOF"};
};

struct LoadStats {
  std::size_t rows_in = 0;   // data rows, header excluded
  std::size_t rows_out = 0;
  std::size_t dropped_no_label = 0;
  std::size_t dropped_nan = 0;   // empty or literal nan/NaN text
  std::size_t dropped_empty_after_clean = 0;
};

// Header row required; \n and \r\n line endings both accepted; no quoting.
LabeledCorpus load_tsv(const std::filesystem::path& path, const TsvSchema& schema,
                       const textprep::CleanRules& rules, LoadStats* stats = nullptr);

// Writes id, text, label-name columns with a header row.
void save_tsv(const LabeledCorpus& corpus, const std::filesystem::path& path,
              const TsvSchema& schema);

std::vector<std::string> split_tabs(std::string_view line);

}  // namespace codemix::dataset
