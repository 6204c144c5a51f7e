#include "newslabel/eval.hpp"

#include <cstdio>
#include <unordered_map>

#include "newslabel/errors.hpp"

namespace newslabel {

SingleLabelReport single_label_report(std::span<const std::string> y_true,
                                      std::span<const std::string> y_pred,
                                      std::span<const std::string> class_names) {
  if (y_true.size() != y_pred.size()) throw DataError("y_true and y_pred differ in length");
  if (y_true.empty()) throw DataError("cannot score an empty label sequence");

  const std::size_t L = class_names.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t l = 0; l < L; ++l) index[std::string(class_names[l])] = l;

  SingleLabelReport report;
  report.class_names.assign(class_names.begin(), class_names.end());
  report.confusion.assign(L, std::vector<std::size_t>(L, 0));

  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    auto ti = index.find(y_true[i]);
    auto pi = index.find(y_pred[i]);
    if (ti == index.end()) throw DataError("true label '" + y_true[i] + "' not in class_names");
    if (pi == index.end()) throw DataError("predicted label '" + y_pred[i] + "' not in class_names");
    ++report.confusion[ti->second][pi->second];
    if (ti->second == pi->second) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());

  report.precision.assign(L, 0.0);
  report.recall.assign(L, 0.0);
  report.f1.assign(L, 0.0);
  report.support.assign(L, 0);
  report.zero_predicted.assign(L, 0);
  report.zero_actual.assign(L, 0);

  for (std::size_t c = 0; c < L; ++c) {
    const std::size_t tp = report.confusion[c][c];
    std::size_t actual = 0, predicted = 0;
    for (std::size_t j = 0; j < L; ++j) {
      actual += report.confusion[c][j];
      predicted += report.confusion[j][c];
    }
    report.support[c] = actual;
    if (predicted == 0) {
      report.zero_predicted[c] = 1;
    } else {
      report.precision[c] = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (actual == 0) {
      report.zero_actual[c] = 1;
    } else {
      report.recall[c] = static_cast<double>(tp) / static_cast<double>(actual);
    }
    const double pr = report.precision[c] + report.recall[c];
    report.f1[c] = pr > 0.0 ? 2.0 * report.precision[c] * report.recall[c] / pr : 0.0;

    report.macro_precision += report.precision[c];
    report.macro_recall += report.recall[c];
    report.macro_f1 += report.f1[c];
  }
  if (L > 0) {
    report.macro_precision /= static_cast<double>(L);
    report.macro_recall /= static_cast<double>(L);
    report.macro_f1 /= static_cast<double>(L);
  }
  return report;
}

namespace {

struct PairCounts {
  std::size_t inter = 0;
  std::size_t uni = 0;
  std::size_t y_size = 0;
  std::size_t z_size = 0;
  std::size_t disagree = 0;
  std::size_t bits = 0;
};

PairCounts count_pair(const MultiLabelSet& Y, const MultiLabelSet& Z) {
  if (Y.bits.size() != Z.bits.size()) throw DataError("label sets differ in length");
  PairCounts c;
  c.bits = Y.bits.size();
  for (std::size_t l = 0; l < Y.bits.size(); ++l) {
    const bool y = Y.bits[l] != 0;
    const bool z = Z.bits[l] != 0;
    c.inter += (y && z) ? 1 : 0;
    c.uni += (y || z) ? 1 : 0;
    c.y_size += y ? 1 : 0;
    c.z_size += z ? 1 : 0;
    c.disagree += (y != z) ? 1 : 0;
  }
  return c;
}

void check_lengths(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs) {
  if (Ys.size() != Zs.size()) throw DataError("Y and Z sequences differ in length");
  if (Ys.empty()) throw DataError("cannot score empty label sequences");
}

}  // namespace

double multilabel_accuracy(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs) {
  check_lengths(Ys, Zs);
  double sum = 0.0;
  for (std::size_t i = 0; i < Ys.size(); ++i) {
    const auto c = count_pair(Ys[i], Zs[i]);
    sum += c.uni == 0 ? 1.0 : static_cast<double>(c.inter) / static_cast<double>(c.uni);
  }
  return sum / static_cast<double>(Ys.size());
}

double multilabel_precision(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs) {
  check_lengths(Ys, Zs);
  double sum = 0.0;
  for (std::size_t i = 0; i < Ys.size(); ++i) {
    const auto c = count_pair(Ys[i], Zs[i]);
    if (c.z_size == 0) {
      sum += c.y_size == 0 ? 1.0 : 0.0;
    } else {
      sum += static_cast<double>(c.inter) / static_cast<double>(c.z_size);
    }
  }
  return sum / static_cast<double>(Ys.size());
}

double multilabel_recall(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs) {
  check_lengths(Ys, Zs);
  double sum = 0.0;
  for (std::size_t i = 0; i < Ys.size(); ++i) {
    const auto c = count_pair(Ys[i], Zs[i]);
    if (c.y_size == 0) {
      sum += c.z_size == 0 ? 1.0 : 0.0;
    } else {
      sum += static_cast<double>(c.inter) / static_cast<double>(c.y_size);
    }
  }
  return sum / static_cast<double>(Ys.size());
}

double multilabel_f1(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs) {
  check_lengths(Ys, Zs);
  double sum = 0.0;
  for (std::size_t i = 0; i < Ys.size(); ++i) {
    const auto c = count_pair(Ys[i], Zs[i]);
    const std::size_t denom = c.y_size + c.z_size;
    sum += denom == 0 ? 1.0 : 2.0 * static_cast<double>(c.inter) / static_cast<double>(denom);
  }
  return sum / static_cast<double>(Ys.size());
}

double hamming_loss(std::span<const MultiLabelSet> Ys, std::span<const MultiLabelSet> Zs) {
  check_lengths(Ys, Zs);
  std::size_t disagree = 0, total = 0;
  for (std::size_t i = 0; i < Ys.size(); ++i) {
    const auto c = count_pair(Ys[i], Zs[i]);
    disagree += c.disagree;
    total += c.bits;
  }
  if (total == 0) throw DataError("hamming loss over zero-length label sets");
  return static_cast<double>(disagree) / static_cast<double>(total);
}

MultiLabelReport multilabel_report(std::span<const MultiLabelSet> Ys,
                                   std::span<const MultiLabelSet> Zs) {
  MultiLabelReport report;
  report.accuracy = multilabel_accuracy(Ys, Zs);
  report.precision = multilabel_precision(Ys, Zs);
  report.recall = multilabel_recall(Ys, Zs);
  report.f1 = multilabel_f1(Ys, Zs);
  report.hamming = hamming_loss(Ys, Zs);
  report.n = Ys.size();
  for (std::size_t i = 0; i < Ys.size(); ++i) {
    const auto c = count_pair(Ys[i], Zs[i]);
    if (c.y_size == 0 || c.z_size == 0) {
      report.empty_set_convention_triggered = true;
      break;
    }
  }
  return report;
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%8.3f", v);
  return buf;
}

}  // namespace

std::string render_text(const SingleLabelReport& report) {
  std::string out;
  out += "class                precision   recall       f1  support\n";
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-20s %s %s %s %8zu%s\n",
                  report.class_names[c].c_str(), fixed3(report.precision[c]).c_str(),
                  fixed3(report.recall[c]).c_str(), fixed3(report.f1[c]).c_str(),
                  report.support[c],
                  report.zero_predicted[c] ? "  [no predictions]"
                                           : (report.zero_actual[c] ? "  [no instances]" : ""));
    out += line;
  }
  char tail[160];
  std::snprintf(tail, sizeof(tail),
                "\naccuracy %.4f\nmacro    %s %s %s\n", report.accuracy,
                fixed3(report.macro_precision).c_str(), fixed3(report.macro_recall).c_str(),
                fixed3(report.macro_f1).c_str());
  out += tail;
  return out;
}

std::string render_text(const MultiLabelReport& report) {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "instances    %zu\naccuracy     %.4f\nprecision    %.4f\nrecall       %.4f\n"
                "f1           %.4f\nhamming loss %.4f\n%s",
                report.n, report.accuracy, report.precision, report.recall, report.f1,
                report.hamming,
                report.empty_set_convention_triggered
                    ? "note: empty-set conventions were triggered\n"
                    : "");
  return buf;
}

SingleLabelReport cluster_vs_original(std::span<const AutoLabeledRecord> records) {
  if (records.empty()) throw DataError("no records to compare");
  std::vector<std::string> class_names;
  class_names.reserve(records.front().class_probs.size());
  for (const auto& [name, p] : records.front().class_probs) class_names.push_back(name);

  std::vector<std::string> y_true, y_pred;
  y_true.reserve(records.size());
  y_pred.reserve(records.size());
  for (const auto& rec : records) {
    y_true.push_back(rec.original_label);
    y_pred.push_back(rec.dominant_class);
  }
  return single_label_report(y_true, y_pred, class_names);
}

}  // namespace newslabel
