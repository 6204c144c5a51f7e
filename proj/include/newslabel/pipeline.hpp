#pragma once

#include <string>

#include "newslabel/config.hpp"

namespace newslabel::pipeline {

// Algorithm stages as re-runnable subcommands. Every output is written
// atomically; all randomness flows from run.seed.
void cmd_preprocess(const PipelineConfig& config);
void cmd_train_embeddings(const PipelineConfig& config);
void cmd_train_lda(const PipelineConfig& config);
void cmd_autolabel(const PipelineConfig& config);
void cmd_train_classifier(const PipelineConfig& config);
void cmd_multilabel(const PipelineConfig& config);
void cmd_report(const PipelineConfig& config);

void run_command(const std::string& name, const PipelineConfig& config);

}  // namespace newslabel::pipeline
