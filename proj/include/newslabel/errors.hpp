#pragma once

#include <stdexcept>
#include <string>

namespace newslabel {

// Error taxonomy mirrors the CLI exit codes: config=2, data=3, numeric=4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// A document whose token sequence became empty after the cleaning pipeline.
// Callers decide whether to drop or keep; the corpus-level pipeline drops and logs.
class EmptyAfterPreprocess : public DataError {
 public:
  explicit EmptyAfterPreprocess(const std::string& doc_id)
      : DataError("document '" + doc_id + "' is empty after preprocessing"), doc_id_(doc_id) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

}  // namespace newslabel
