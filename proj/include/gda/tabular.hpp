#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gda {

/// Main elements define the factor space; supplementary ones are projected into it.
enum class Role { Main, Supplementary };

enum class QuestionRole { Active, Supplementary };

struct Question {
  std::string id;
  std::string label;
  std::vector<std::string> modalities;
  QuestionRole role = QuestionRole::Active;
};

/// Coding schema for a categorical survey.
///
/// Loaded from an INI-style key/value file:
///
///     [schema]
///     id_column = id
///     sparse_threshold = 16
///     missing_as_modality = false
///     unknown_as_missing = false
///     missing_values = NA|
///
///     [question.AcDif1]
///     label = personal care
///     modalities = no|some|a lot|dont know
///     role = active
///
/// Questions keep file order. List values are separated by '|' so that
/// modality labels may contain commas. An empty CSV field is always missing.
struct SurveySchema {
  std::vector<Question> questions;
  std::string id_column = "id";
  std::size_t sparse_threshold = 16;
  bool missing_as_modality = false;
  bool unknown_as_missing = false;
  std::vector<std::string> missing_values;

  /// Throws BadSchema on duplicate ids/labels or empty modality lists.
  void validate() const;
  /// Throws UnknownQuestion.
  std::size_t question_index(std::string_view id) const;
  std::size_t active_count() const;
  /// Indicator column count, including per-question missing columns when enabled.
  std::size_t column_count() const;
};

SurveySchema parse_schema(std::istream& in);
SurveySchema load_schema(const std::filesystem::path& path);

/// Parsed RFC 4180 document: header plus string cells.
struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws MissingColumn.
  std::size_t column(std::string_view name) const;
};

CsvDocument parse_csv(std::istream& in);
CsvDocument read_csv(const std::filesystem::path& path);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

inline constexpr int kMissing = -1;

/// Individuals x questions, each cell a modality index or kMissing.
class CodedTable {
 public:
  CodedTable(SurveySchema schema, std::vector<std::string> ids, std::vector<int> codes);

  std::size_t n() const noexcept { return ids_.size(); }
  std::size_t q() const noexcept { return schema_.questions.size(); }
  int code(std::size_t individual, std::size_t question) const {
    return codes_[individual * q() + question];
  }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const SurveySchema& schema() const noexcept { return schema_; }

 private:
  SurveySchema schema_;
  std::vector<std::string> ids_;
  std::vector<int> codes_;
};

CodedTable ingest_csv(std::istream& in, const SurveySchema& schema);
CodedTable ingest_csv(const std::filesystem::path& path, const SurveySchema& schema);

struct ColumnInfo {
  std::size_t question = 0;
  std::string question_id;
  std::string modality;
  Role role = Role::Main;

  std::string label() const { return question_id + "_" + modality; }
};

/// Disjunctive coding of a CodedTable. Entries are 0/1.
struct IndicatorMatrix {
  Eigen::MatrixXd data;
  std::vector<ColumnInfo> columns;
  std::vector<std::string> row_labels;
  std::size_t q_active = 0;

  std::size_t main_column_count() const;
  Eigen::VectorXd column_totals() const { return data.colwise().sum().transpose(); }
};

/// Nonnegative cross-tabulation with per-row and per-column roles.
struct ContingencyTable {
  Eigen::MatrixXd counts;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<Role> row_roles;
  std::vector<Role> col_roles;

  /// All roles Main, labels "r1".."rI" / "c1".."cJ".
  static ContingencyTable from_counts(const Eigen::MatrixXd& counts);

  /// Throws NegativeEntry, DimensionMismatch or DegenerateTable.
  void validate() const;
  std::vector<std::size_t> main_rows() const;
  std::vector<std::size_t> main_cols() const;
};

IndicatorMatrix build_indicator(const CodedTable& table);

struct Demotion {
  IndicatorMatrix matrix;
  std::vector<std::size_t> demoted;
};

/// Main columns whose total is <= threshold become supplementary.
Demotion demote_sparse(const IndicatorMatrix& ind, std::size_t threshold);

/// Replaces every column x by the pair (x, 1 - x).
IndicatorMatrix double_columns(const IndicatorMatrix& ind);

/// Replaces column x with declared maximum m by the pair (x, m - x); all rows
/// then sum to the sum of maxima.
ContingencyTable double_columns(const Eigen::MatrixXd& scores, std::span<const double> maxima,
                                std::span<const std::string> labels);

ContingencyTable crosstab(const CodedTable& table, std::string_view row_q, std::string_view col_q);

}  // namespace gda
