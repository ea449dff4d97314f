#pragma once

#include <filesystem>
#include <sstream>
#include <string>

#include <doctest.h>

#include "gda/error.hpp"
#include "gda/tabular.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(GDA_FIXTURE_DIR) / rel; }

inline gda::SurveySchema schema_from(const std::string& text) {
  std::istringstream in(text);
  return gda::parse_schema(in);
}

inline gda::CodedTable table_from(const gda::SurveySchema& schema, const std::string& csv) {
  std::istringstream in(csv);
  return gda::ingest_csv(in, schema);
}

}  // namespace testing

#define CHECK_ERROR_CODE(expr, expected)                                  \
  do {                                                                    \
    bool thrown_ = false;                                                 \
    try {                                                                 \
      (void)(expr);                                                       \
    } catch (const gda::Error& e_) {                                      \
      thrown_ = true;                                                     \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());                  \
    }                                                                     \
    CHECK_MESSAGE(thrown_, "expected gda::Error from " #expr);            \
  } while (false)
