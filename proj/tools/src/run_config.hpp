#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codemix/dataset/tsv.hpp"
#include "codemix/model/config.hpp"
#include "codemix/textprep/clean.hpp"
#include "codemix/training/config.hpp"

namespace codemix::cli {

// Every knob the CLI understands, flat. The JSON config file uses exactly
// these field names; each also has a --kebab-case flag.
struct RunConfig {
  // Inputs. train_files are concatenated in order (e.g. train then dev).
  std::vector<std::string> train_files;
  std::string test_file;
  std::string text_col = "text";
  std::string label_col = "label";
  std::string id_col;
  std::vector<std::string> label_names = {"NOT", "HOF"};

  // Cleaning. An empty stopwords_file selects the embedded English list.
  bool remove_urls = true;
  bool remove_mentions = true;
  bool remove_emoji = true;
  bool remove_punct = true;
  bool remove_stopwords = true;
  bool lowercase_latin = true;
  std::string stopwords_file;

  // Vocabulary.
  std::size_t vocab_max_size = 8000;
  std::size_t vocab_min_freq = 2;

  // Encoder and head (desk scale).
  std::size_t d_model = 64;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t d_ff = 128;
  std::size_t model_max_seq_len = 128;
  std::string pooler_kind = "attention";
  double encoder_dropout = 0.1;
  bool pool_include_cls = true;
  double init_std = 0.02;

  // Fine-tuning recipe.
  double lr = 2e-5;
  std::size_t max_seq_len = 512;
  std::size_t batch_size = 8;
  std::size_t epochs = 5;
  double weight_decay = 0.01;
  double dropout = 0.5;
  double adam_eps = 1e-6;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::uint64_t seed = 42;
  bool balance = true;
  std::string balance_mode = "oversample";
  std::size_t warmup_steps = 0;
  double max_grad_norm = 0.0;

  // Artifacts. Empty paths resolve inside output_dir.
  std::string output_dir = "out";
  std::string train_tsv;        // prepared training corpus
  std::string eval_tsv;         // optional prepared corpus scored every epoch
  std::string vocab_file;
  std::string checkpoint_file;
  std::string input_file;       // eval: labeled TSV; predict: TSV, or stdin if empty
  std::string output_file;

  std::filesystem::path out_path(const std::string& explicit_path,
                                 const std::string& default_name) const;

  textprep::CleanRules clean_rules() const;
  dataset::TsvSchema raw_schema() const;
  model::ModelConfig model_config() const;
  training::TrainConfig train_config() const;

  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
void from_json(const nlohmann::json& j, RunConfig& cfg);

// Overlays `overrides` onto the current values; unknown keys and
// wrongly-typed values are config errors.
RunConfig merge(const RunConfig& base, const nlohmann::json& overrides);

// Parses a flag value according to the type of the existing JSON value:
// booleans accept true/false/1/0, arrays are comma-separated strings.
nlohmann::json parse_flag_value(const nlohmann::json& current, const std::string& key,
                                const std::string& text);

std::string kebab_case(const std::string& snake);

// Schema of the files written by `prepare`.
dataset::TsvSchema prepared_schema(const std::vector<std::string>& label_names);

}  // namespace codemix::cli
