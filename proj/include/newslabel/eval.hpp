#pragma once

#include <span>
#include <string>
#include <vector>

#include "newslabel/autolabel.hpp"

namespace newslabel {

struct SingleLabelReport {
  std::vector<std::string> class_names;
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::size_t> support;                   // actual instances per class
  std::vector<std::vector<std::size_t>> confusion;    // [true][pred]
  std::vector<std::uint8_t> zero_predicted;           // precision forced to 0
  std::vector<std::uint8_t> zero_actual;              // recall forced to 0
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

SingleLabelReport single_label_report(std::span<const std::string> y_true,
                                      std::span<const std::string> y_pred,
                                      std::span<const std::string> class_names);

// Example-based multi-label metrics. Empty-set conventions: a term is 1 when
// both sets are empty; precision (recall) terms are 0 when only the predicted
// (actual) set is empty.
double multilabel_accuracy(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs);
double multilabel_precision(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs);
double multilabel_recall(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs);
double multilabel_f1(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs);
double hamming_loss(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs);

struct MultiLabelReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double hamming = 0.0;
  std::size_t n = 0;
  bool empty_set_convention_triggered = false;
};

MultiLabelReport multilabel_report(std::span<const MultiLabelSet> Ys,
                                   std::span<const MultiLabelSet> Zs);

// y_pred = dominant cluster class, y_true = original label.
SingleLabelReport cluster_vs_original(std::span<const AutoLabeledRecord> records);

// human-readable tables; the JSON twins live in the pipeline reports
std::string render_text(const SingleLabelReport& report);
std::string render_text(const MultiLabelReport& report);

}  // namespace newslabel
