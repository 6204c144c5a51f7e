#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "newslabel/config.hpp"
#include "newslabel/errors.hpp"
#include "newslabel/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::int64_t seed = -1;
  bool deterministic = false;
  double threshold = -1.0;
  std::string representation;
  std::string classifier;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline config file (key = value sections)");
  cmd->add_option("--seed", flags.seed, "override run.seed");
  cmd->add_flag("--deterministic", flags.deterministic,
                "single-worker mode (the pipeline always runs single-worker; accepted and echoed)");
  cmd->add_option("--threshold", flags.threshold, "probability threshold override");
  cmd->add_option("--representation", flags.representation, "bow|tfidf|docvec|avg-embedding")
      ->check(CLI::IsMember({"bow", "tfidf", "docvec", "avg-embedding"}));
  cmd->add_option("--classifier", flags.classifier, "logistic|hinge|knn")
      ->check(CLI::IsMember({"logistic", "hinge", "knn"}));
  cmd->add_option("--set", flags.overrides, "override any config key: --set section.key=value")
      ->take_all();
  cmd->allow_extras();
}

newslabel::PipelineConfig build_config(const std::string& command, const CommonFlags& flags,
                                       const std::vector<std::string>& extras) {
  newslabel::PipelineConfig config;
  if (!flags.config_path.empty()) {
    config = newslabel::PipelineConfig::from_file(flags.config_path);
  }
  for (const auto& item : flags.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw newslabel::ConfigError("--set expects section.key=value, got '" + item + "'");
    }
    config.set(item.substr(0, eq), item.substr(eq + 1));
  }
  // leftover --section.key value / --section.key=value pairs override too
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string token = extras[i];
    if (token.rfind("--", 0) != 0) {
      throw newslabel::ConfigError("unexpected argument '" + token + "'");
    }
    token.erase(0, 2);
    const auto eq = token.find('=');
    if (eq != std::string::npos) {
      config.set(token.substr(0, eq), token.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) {
        throw newslabel::ConfigError("flag '--" + token + "' needs a value");
      }
      config.set(token, extras[++i]);
    }
  }
  if (flags.seed >= 0) config.set("run.seed", std::to_string(flags.seed));
  if (flags.deterministic) config.set("run.deterministic", "true");
  if (flags.threshold >= 0.0) {
    config.set(command == "multilabel" ? "multilabel.threshold" : "autolabel.split_threshold",
               std::to_string(flags.threshold));
  }
  if (!flags.representation.empty()) config.set("features.representation", flags.representation);
  if (!flags.classifier.empty()) config.set("classifier.kind", flags.classifier);
  return config;
}

std::string one_line(std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  return message;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"news classification pipeline: preprocessing, embeddings, LDA auto-labelling, "
               "classifiers and evaluation"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {"preprocess",       "train-embeddings", "train-lda",
                                             "autolabel",        "train-classifier", "multilabel",
                                             "report"};
  std::vector<CommonFlags> flags(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i]);
    add_common(sub, flags[i]);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "error: config: %s\n", one_line(e.what()).c_str());
    return 2;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (subs[i]->parsed()) {
        const auto config = build_config(commands[i], flags[i], subs[i]->remaining());
        newslabel::pipeline::run_command(commands[i], config);
        return 0;
      }
    }
    std::fprintf(stderr, "error: config: no subcommand\n");
    return 2;
  } catch (const newslabel::ConfigError& e) {
    std::fprintf(stderr, "error: config: %s\n", one_line(e.what()).c_str());
    return 2;
  } catch (const newslabel::DataError& e) {
    std::fprintf(stderr, "error: data: %s\n", one_line(e.what()).c_str());
    return 3;
  } catch (const newslabel::NumericError& e) {
    std::fprintf(stderr, "error: numeric: %s\n", one_line(e.what()).c_str());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", one_line(e.what()).c_str());
    return 1;
  }
}
