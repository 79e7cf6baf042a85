#pragma once

#include <iosfwd>

#include "run_config.hpp"

namespace codemix::cli {

// Each command writes its artifacts to disk, human-readable progress to
// `out`, and throws codemix::Error on failure.

// Cleans train_files (concatenated) and test_file, builds the vocabulary
// from the cleaned training corpus and writes prepare_stats.json.
void cmd_prepare(const RunConfig& cfg, std::ostream& out);

// Trains on the prepared corpus; writes the checkpoint and history.json.
void cmd_train(const RunConfig& cfg, std::ostream& out);

// Scores a labeled TSV with a checkpoint; writes eval_report.json and
// prints the weighted-metric table.
void cmd_eval(const RunConfig& cfg, std::ostream& out);

// Writes id, predicted label and class probabilities for every input row.
void cmd_predict(const RunConfig& cfg, std::istream& in, std::ostream& out);

}  // namespace codemix::cli
