#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "newslabel/autolabel.hpp"
#include "newslabel/classifiers.hpp"
#include "newslabel/embeddings.hpp"
#include "newslabel/features.hpp"
#include "newslabel/lda.hpp"

namespace newslabel {

// Every artifact starts with a one-line JSON header naming its kind and
// format version, carrying a params echo and an FNV-1a64 checksum of the
// body. Body formats are the per-module text conventions.
struct ArtifactHeader {
  std::string kind;  // vocab, embedding, subword, docvec, lda, linear, knn, autodata
  int format_version = 0;
  nlohmann::ordered_json params;
};

// Reads only the first line; never allocates model-sized buffers.
ArtifactHeader peek_header(const std::filesystem::path& path);

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

void save_embedding(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_embedding(const std::filesystem::path& path);

void save_subword(const SubwordEmbeddingModel& model, const std::filesystem::path& path);
SubwordEmbeddingModel load_subword(const std::filesystem::path& path);

void save_docvec(const DocEmbeddingModel& model, const std::filesystem::path& path);
DocEmbeddingModel load_docvec(const std::filesystem::path& path);

void save_lda(const LdaModel& model, const std::filesystem::path& path);
// the vocabulary is persisted separately; V must match
LdaModel load_lda(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocab);

void save_linear(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_linear(const std::filesystem::path& path);

void save_knn(const KnnModel& model, const std::filesystem::path& path);
KnnModel load_knn(const std::filesystem::path& path);

void save_auto_dataset(std::span<const AutoLabeledRecord> records,
                       const std::filesystem::path& path);
std::vector<AutoLabeledRecord> load_auto_dataset(const std::filesystem::path& path);

}  // namespace newslabel
