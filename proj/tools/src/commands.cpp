#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "codemix/dataset/sampling.hpp"
#include "codemix/error.hpp"
#include "codemix/random.hpp"
#include "codemix/metrics/metrics.hpp"
#include "codemix/training/checkpoint.hpp"
#include "codemix/training/trainer.hpp"

namespace codemix::cli {
namespace {

using nlohmann::json;

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

json stats_json(const dataset::LoadStats& s) {
  return {{"rows_in", s.rows_in},
          {"rows_out", s.rows_out},
          {"dropped_no_label", s.dropped_no_label},
          {"dropped_nan", s.dropped_nan},
          {"dropped_empty_after_clean", s.dropped_empty_after_clean}};
}

void accumulate(dataset::LoadStats& total, const dataset::LoadStats& s) {
  total.rows_in += s.rows_in;
  total.rows_out += s.rows_out;
  total.dropped_no_label += s.dropped_no_label;
  total.dropped_nan += s.dropped_nan;
  total.dropped_empty_after_clean += s.dropped_empty_after_clean;
}

json counts_json(const dataset::LabeledCorpus& c) {
  json j = json::object();
  for (std::size_t k = 0; k < c.num_classes(); ++k) j[c.label_names()[k]] = c.class_counts()[k];
  return j;
}

// Same stream the trainer uses for balancing, so the reported counts are
// the ones training sees.
dataset::LabeledCorpus balanced(const dataset::LabeledCorpus& c,
                                const training::TrainConfig& t) {
  if (!t.balance) return c;
  return dataset::uniform_sample(c, derive_seed(t.seed, {2}), t.balance_mode);
}

std::size_t effective_seq_len(const training::Checkpoint& ckpt) {
  return std::min(ckpt.train_config.max_seq_len, ckpt.model_config.max_seq_len);
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string report_row_name(const std::filesystem::path& p) { return p.stem().string(); }

}  // namespace

void cmd_prepare(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.train_files.empty()) fail(ErrorKind::kConfig, "prepare: train_files is empty");
  const auto rules = cfg.clean_rules();
  const auto schema = cfg.raw_schema();
  const auto tcfg = cfg.train_config();

  dataset::LabeledCorpus train(cfg.label_names);
  dataset::LoadStats train_total;
  json per_file = json::array();
  for (const auto& file : cfg.train_files) {
    dataset::LoadStats s;
    dataset::LabeledCorpus part = dataset::load_tsv(file, schema, rules, &s);
    if (cfg.id_col.empty() && cfg.train_files.size() > 1) {
      // Row numbers restart in every file; keep ids unique after concat.
      std::vector<dataset::LabeledExample> renamed = part.examples();
      for (auto& e : renamed) e.id = std::filesystem::path(file).stem().string() + ":" + e.id;
      part = dataset::LabeledCorpus(cfg.label_names, std::move(renamed));
    }
    train = dataset::concat(train, part);
    accumulate(train_total, s);
    per_file.push_back({{"file", file}, {"stats", stats_json(s)}});
  }
  if (train.empty()) fail(ErrorKind::kData, "prepare: no training rows survived cleaning");

  std::filesystem::create_directories(cfg.output_dir);
  const auto pschema = prepared_schema(cfg.label_names);
  const auto train_path = cfg.out_path(cfg.train_tsv, "train.tsv");
  dataset::save_tsv(train, train_path, pschema);

  const auto texts = train.texts();
  const auto vocab = textprep::build_vocab(texts, cfg.vocab_max_size, cfg.vocab_min_freq);
  const auto vocab_path = cfg.out_path(cfg.vocab_file, "vocab.txt");
  vocab.save(vocab_path);

  json report = {{"config", cfg},
                 {"train",
                  {{"files", per_file},
                   {"stats", stats_json(train_total)},
                   {"class_counts",
                    {{"before_balance", counts_json(train)},
                     {"after_balance", counts_json(balanced(train, tcfg))}}}}},
                 {"vocab_size", vocab.size()}};
  out << "train: " << train_total.rows_in << " rows in, " << train_total.rows_out
      << " rows out -> " << train_path.string() << '\n';

  if (!cfg.test_file.empty()) {
    dataset::LoadStats s;
    const auto test = dataset::load_tsv(cfg.test_file, schema, rules, &s);
    const auto test_path = std::filesystem::path(cfg.output_dir) / "test.tsv";
    dataset::save_tsv(test, test_path, pschema);
    report["test"] = {{"file", cfg.test_file},
                      {"stats", stats_json(s)},
                      {"class_counts", counts_json(test)}};
    out << "test: " << s.rows_in << " rows in, " << s.rows_out << " rows out -> "
        << test_path.string() << '\n';
  }
  out << "vocab: " << vocab.size() << " entries -> " << vocab_path.string() << '\n';
  write_json(std::filesystem::path(cfg.output_dir) / "prepare_stats.json", report);
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto vocab = textprep::Vocab::load(cfg.out_path(cfg.vocab_file, "vocab.txt"));
  const auto rules = cfg.clean_rules();
  const auto pschema = prepared_schema(cfg.label_names);
  // Prepared files are already clean; load them without re-cleaning.
  textprep::CleanRules keep;
  keep.remove_urls = keep.remove_mentions = keep.remove_emoji = false;
  keep.remove_punct = keep.remove_stopwords = keep.lowercase_latin = false;
  const auto train_path = cfg.out_path(cfg.train_tsv, "train.tsv");
  if (!std::filesystem::exists(train_path)) {
    fail(ErrorKind::kIo, "prepared corpus not found: " + train_path.string());
  }
  const auto train = dataset::load_tsv(train_path, pschema, keep);
  if (train.empty()) fail(ErrorKind::kData, "train: " + train_path.string() + " has no rows");
  std::optional<dataset::LabeledCorpus> eval;
  if (!cfg.eval_tsv.empty()) eval = dataset::load_tsv(cfg.eval_tsv, pschema, keep);

  training::Trainer trainer(cfg.model_config(), cfg.train_config(), vocab, rules, train, eval);
  const std::size_t epochs = cfg.epochs;
  while (!trainer.finished()) {
    const auto& rec = trainer.run_epoch();
    out << "epoch " << rec.epoch << "/" << epochs << "  loss " << fixed6(rec.loss)
        << "  train W-F1 " << fixed6(rec.train.f1);
    if (rec.eval) out << "  eval W-F1 " << fixed6(rec.eval->f1);
    out << '\n';
  }
  const auto ckpt_path = cfg.out_path(cfg.checkpoint_file, "model.cmcx");
  if (ckpt_path.has_parent_path()) std::filesystem::create_directories(ckpt_path.parent_path());
  training::save_checkpoint(trainer.checkpoint(), ckpt_path);

  json history = json::array();
  for (const auto& rec : trainer.history()) history.push_back(training::to_json(rec));
  write_json(std::filesystem::path(cfg.output_dir) / "history.json",
             {{"config", cfg}, {"checkpoint", ckpt_path.string()}, {"history", history}});
  out << "checkpoint -> " << ckpt_path.string() << '\n';
}

void cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const auto ckpt = training::load_checkpoint(cfg.out_path(cfg.checkpoint_file, "model.cmcx"));
  if (ckpt.label_names != cfg.label_names) {
    fail(ErrorKind::kData, "eval: label names differ between checkpoint and configuration");
  }
  // Explicit input, then the raw test file, then the split written by prepare.
  std::string input = !cfg.input_file.empty() ? cfg.input_file : cfg.test_file;
  dataset::TsvSchema schema = cfg.raw_schema();
  if (input.empty()) {
    input = cfg.out_path("", "test.tsv");
    if (!std::filesystem::exists(input)) {
      fail(ErrorKind::kConfig, "eval: set input_file or test_file, or run prepare with a test file");
    }
    schema = prepared_schema(ckpt.label_names);
  }
  if (std::filesystem::exists(input) && std::filesystem::file_size(input) == 0) {
    fail(ErrorKind::kData, "eval: " + input + " is empty");
  }
  schema.label_names = ckpt.label_names;
  const auto corpus = dataset::load_tsv(input, schema, ckpt.clean_rules);
  if (corpus.empty()) fail(ErrorKind::kData, "eval: " + input + " has no scorable rows");

  const auto model = training::model_from_checkpoint(ckpt);
  const auto result = training::evaluate(model, ckpt.vocab, corpus, effective_seq_len(ckpt));
  const std::vector<std::pair<std::string, metrics::WeightedReport>> rows = {
      {report_row_name(input), result.report}};
  out << metrics::format_table(rows);

  write_json(cfg.out_path(cfg.output_file, "eval_report.json"),
             {{"config", cfg},
              {"input", input},
              {"loss", result.loss},
              {"report", metrics::to_json(result.report)}});
}

void cmd_predict(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  const auto ckpt = training::load_checkpoint(cfg.out_path(cfg.checkpoint_file, "model.cmcx"));
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  auto strip_cr = [](std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  if (cfg.input_file.empty() || cfg.input_file == "-") {
    std::string line;
    for (std::size_t row = 1; std::getline(in, line); ++row) {
      strip_cr(line);
      ids.push_back(std::to_string(row));
      texts.push_back(textprep::clean_text(line, ckpt.clean_rules));
    }
  } else {
    std::ifstream file(cfg.input_file, std::ios::binary);
    if (!file) fail(ErrorKind::kIo, "cannot open " + cfg.input_file);
    std::string line;
    if (!std::getline(file, line)) fail(ErrorKind::kSchema, cfg.input_file + ": missing header row");
    strip_cr(line);
    const auto header = dataset::split_tabs(line);
    auto column = [&](const std::string& name) -> std::size_t {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) {
        fail(ErrorKind::kSchema, cfg.input_file + ": missing column '" + name + "'");
      }
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t text_idx = column(cfg.text_col);
    std::optional<std::size_t> id_idx;
    if (!cfg.id_col.empty()) id_idx = column(cfg.id_col);
    for (std::size_t row = 1; std::getline(file, line); ++row) {
      strip_cr(line);
      if (line.empty() && file.peek() == std::char_traits<char>::eof()) break;
      const auto fields = dataset::split_tabs(line);
      auto field = [&](std::size_t i) { return i < fields.size() ? fields[i] : std::string(); };
      ids.push_back(id_idx ? field(*id_idx) : std::to_string(row));
      texts.push_back(textprep::clean_text(field(text_idx), ckpt.clean_rules));
    }
  }

  std::ofstream file_out;
  std::ostream* sink = &out;
  if (!cfg.output_file.empty()) {
    file_out.open(cfg.output_file, std::ios::binary);
    if (!file_out) fail(ErrorKind::kIo, "cannot write " + cfg.output_file);
    sink = &file_out;
  }
  *sink << "id\tlabel";
  for (const auto& name : ckpt.label_names) *sink << "\tp_" << name;
  *sink << '\n';
  if (texts.empty()) return;

  const auto model = training::model_from_checkpoint(ckpt);
  const auto probs = training::predict_proba(model, ckpt.vocab, texts, effective_seq_len(ckpt));
  const auto preds = training::argmax_rows(probs);
  for (std::size_t r = 0; r < texts.size(); ++r) {
    *sink << ids[r] << '\t' << ckpt.label_names[preds[r]];
    for (std::size_t k = 0; k < probs.cols(); ++k) *sink << '\t' << fixed6(probs.at(r, k));
    *sink << '\n';
  }
  if (!*sink) fail(ErrorKind::kIo, "predict: write failed");
}

}  // namespace codemix::cli
