#include "gda/tabular.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gda/error.hpp"

namespace gda {

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto bar = value.find('|', start);
    out.push_back(boost::algorithm::trim_copy(value.substr(start, bar - start)));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::BadSchema, key + ": expected true/false, got '" + value + "'");
}

}  // namespace

void SurveySchema::validate() const {
  if (questions.empty()) throw Error(ErrorCode::BadSchema, "no questions");
  std::set<std::string> ids;
  for (const auto& q : questions) {
    if (q.id.empty()) throw Error(ErrorCode::BadSchema, "empty question id");
    if (!ids.insert(q.id).second) throw Error(ErrorCode::BadSchema, "duplicate question id " + q.id);
    if (q.id == id_column) throw Error(ErrorCode::BadSchema, "question id collides with id_column");
    if (q.modalities.empty()) throw Error(ErrorCode::BadSchema, q.id + ": no modalities");
    std::set<std::string> labels;
    for (const auto& m : q.modalities) {
      if (m.empty()) throw Error(ErrorCode::BadSchema, q.id + ": empty modality label");
      if (!labels.insert(m).second)
        throw Error(ErrorCode::BadSchema, q.id + ": duplicate modality " + m);
    }
  }
}

std::size_t SurveySchema::question_index(std::string_view id) const {
  for (std::size_t k = 0; k < questions.size(); ++k)
    if (questions[k].id == id) return k;
  throw Error(ErrorCode::UnknownQuestion, std::string(id));
}

std::size_t SurveySchema::active_count() const {
  return static_cast<std::size_t>(std::count_if(questions.begin(), questions.end(), [](const Question& q) {
    return q.role == QuestionRole::Active;
  }));
}

std::size_t SurveySchema::column_count() const {
  std::size_t total = 0;
  for (const auto& q : questions) total += q.modalities.size() + (missing_as_modality ? 1 : 0);
  return total;
}

SurveySchema parse_schema(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::BadSchema, e.what());
  }

  SurveySchema schema;
  for (const auto& [section, body] : tree) {
    if (section == "schema") {
      for (const auto& [key, node] : body) {
        const auto value = node.get_value<std::string>();
        if (key == "id_column") {
          schema.id_column = value;
        } else if (key == "sparse_threshold") {
          long long t = 0;
          try {
            t = std::stoll(value);
          } catch (const std::exception&) {
            throw Error(ErrorCode::BadSchema, "sparse_threshold: not an integer");
          }
          if (t < 0) throw Error(ErrorCode::BadSchema, "sparse_threshold must be >= 0");
          schema.sparse_threshold = static_cast<std::size_t>(t);
        } else if (key == "missing_as_modality") {
          schema.missing_as_modality = parse_bool(key, value);
        } else if (key == "unknown_as_missing") {
          schema.unknown_as_missing = parse_bool(key, value);
        } else if (key == "missing_values") {
          schema.missing_values = split_list(value);
        } else {
          throw Error(ErrorCode::BadSchema, "unknown key [schema] " + key);
        }
      }
    } else if (section.rfind("question.", 0) == 0) {
      Question q;
      q.id = section.substr(9);
      q.label = body.get<std::string>("label", q.id);
      auto mods = body.get_optional<std::string>("modalities");
      if (!mods) throw Error(ErrorCode::BadSchema, section + ": missing modalities");
      q.modalities = split_list(*mods);
      const auto role = body.get<std::string>("role", "active");
      if (role == "active") {
        q.role = QuestionRole::Active;
      } else if (role == "supplementary") {
        q.role = QuestionRole::Supplementary;
      } else {
        throw Error(ErrorCode::BadSchema, section + ": role must be active|supplementary");
      }
      schema.questions.push_back(std::move(q));
    } else {
      throw Error(ErrorCode::BadSchema, "unknown section [" + section + "]");
    }
  }
  schema.validate();
  return schema;
}

SurveySchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_schema(in);
}

// ---------------------------------------------------------------------------
// CSV

std::size_t CsvDocument::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, std::string(name));
  return static_cast<std::size_t>(it - header.begin());
}

CsvDocument parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  bool any = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // blank lines are skipped
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started)
          throw Error(ErrorCode::Io, "stray quote in unquoted field at line " + std::to_string(line));
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') break;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::Io, "unterminated quoted field");
  if (any && (field_started || !record.empty())) end_record();

  if (records.empty()) throw Error(ErrorCode::EmptyTable, "CSV has no header");
  CsvDocument doc;
  doc.header = std::move(records.front());
  for (std::size_t k = 1; k < records.size(); ++k) {
    if (records[k].size() != doc.header.size())
      throw Error(ErrorCode::Io, "record " + std::to_string(k) + " has " +
                                     std::to_string(records[k].size()) + " fields, header has " +
                                     std::to_string(doc.header.size()));
    doc.rows.push_back(std::move(records[k]));
  }
  return doc;
}

CsvDocument read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_csv(in);
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out << ',';
    const auto& f = fields[k];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out << f;
    } else {
      out << '"';
      for (char c : f) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    }
  }
  out << "\r\n";
}

// ---------------------------------------------------------------------------
// Coding

CodedTable::CodedTable(SurveySchema schema, std::vector<std::string> ids, std::vector<int> codes)
    : schema_(std::move(schema)), ids_(std::move(ids)), codes_(std::move(codes)) {
  if (codes_.size() != ids_.size() * schema_.questions.size())
    throw Error(ErrorCode::DimensionMismatch, "code count does not match n x Q");
  if (ids_.size() < 2) throw Error(ErrorCode::EmptyTable, "need at least 2 individuals");
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    for (std::size_t k = 0; k < q(); ++k) {
      const int c = code(i, k);
      if (c != kMissing && (c < 0 || c >= static_cast<int>(schema_.questions[k].modalities.size())))
        throw Error(ErrorCode::UnknownModality, schema_.questions[k].id + ": code out of range");
    }
  }
}

CodedTable ingest_csv(std::istream& in, const SurveySchema& schema) {
  schema.validate();
  const auto doc = parse_csv(in);
  const auto id_col = doc.column(schema.id_column);

  std::vector<std::size_t> cols;
  std::vector<std::unordered_map<std::string, int>> lookup;
  for (const auto& q : schema.questions) {
    cols.push_back(doc.column(q.id));
    auto& map = lookup.emplace_back();
    for (std::size_t m = 0; m < q.modalities.size(); ++m) map.emplace(q.modalities[m], static_cast<int>(m));
  }
  const std::unordered_set<std::string> missing(schema.missing_values.begin(), schema.missing_values.end());

  std::vector<std::string> ids;
  std::vector<int> codes;
  std::unordered_set<std::string> seen;
  ids.reserve(doc.rows.size());
  codes.reserve(doc.rows.size() * schema.questions.size());
  for (const auto& row : doc.rows) {
    const auto& id = row[id_col];
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateIndividualId, id);
    ids.push_back(id);
    for (std::size_t k = 0; k < schema.questions.size(); ++k) {
      const auto& value = row[cols[k]];
      if (value.empty() || missing.count(value)) {
        codes.push_back(kMissing);
        continue;
      }
      auto it = lookup[k].find(value);
      if (it != lookup[k].end()) {
        codes.push_back(it->second);
      } else if (schema.unknown_as_missing) {
        codes.push_back(kMissing);
      } else {
        throw Error(ErrorCode::UnknownModality, schema.questions[k].id + "='" + value + "'");
      }
    }
  }
  return CodedTable(schema, std::move(ids), std::move(codes));
}

CodedTable ingest_csv(const std::filesystem::path& path, const SurveySchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return ingest_csv(in, schema);
}

std::size_t IndicatorMatrix::main_column_count() const {
  return static_cast<std::size_t>(
      std::count_if(columns.begin(), columns.end(), [](const ColumnInfo& c) { return c.role == Role::Main; }));
}

IndicatorMatrix build_indicator(const CodedTable& table) {
  if (table.n() == 0 || table.q() == 0) throw Error(ErrorCode::EmptyTable, "no individuals or questions");
  const auto& schema = table.schema();

  IndicatorMatrix ind;
  std::vector<std::size_t> offset;
  for (std::size_t k = 0; k < schema.questions.size(); ++k) {
    const auto& q = schema.questions[k];
    offset.push_back(ind.columns.size());
    const Role role = q.role == QuestionRole::Active ? Role::Main : Role::Supplementary;
    for (const auto& m : q.modalities) ind.columns.push_back({k, q.id, m, role});
    if (schema.missing_as_modality) ind.columns.push_back({k, q.id, "missing", role});
  }
  ind.q_active = schema.active_count();
  ind.row_labels = table.ids();
  ind.data = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.n()),
                                   static_cast<Eigen::Index>(ind.columns.size()));
  for (std::size_t i = 0; i < table.n(); ++i) {
    for (std::size_t k = 0; k < table.q(); ++k) {
      const int c = table.code(i, k);
      std::size_t col;
      if (c != kMissing) {
        col = offset[k] + static_cast<std::size_t>(c);
      } else if (schema.missing_as_modality) {
        col = offset[k] + schema.questions[k].modalities.size();
      } else {
        continue;
      }
      ind.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = 1.0;
    }
  }
  return ind;
}

Demotion demote_sparse(const IndicatorMatrix& ind, std::size_t threshold) {
  Demotion out{ind, {}};
  const Eigen::VectorXd totals = ind.column_totals();
  std::size_t survivors = 0;
  for (std::size_t j = 0; j < ind.columns.size(); ++j) {
    if (ind.columns[j].role != Role::Main) continue;
    if (totals(static_cast<Eigen::Index>(j)) <= static_cast<double>(threshold)) {
      out.matrix.columns[j].role = Role::Supplementary;
      out.demoted.push_back(j);
    } else {
      ++survivors;
    }
  }
  if (survivors == 0)
    throw Error(ErrorCode::AllColumnsDemoted, "threshold " + std::to_string(threshold) + " demotes every main column");
  return out;
}

IndicatorMatrix double_columns(const IndicatorMatrix& ind) {
  if ((ind.data.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "indicator has negative entries");
  if ((ind.data.array() > 1.0).any()) throw Error(ErrorCode::NegativeEntry, "indicator entry exceeds 1");
  IndicatorMatrix out;
  out.q_active = ind.q_active;
  out.row_labels = ind.row_labels;
  out.data.resize(ind.data.rows(), 2 * ind.data.cols());
  for (Eigen::Index j = 0; j < ind.data.cols(); ++j) {
    out.data.col(2 * j) = ind.data.col(j);
    out.data.col(2 * j + 1) = 1.0 - ind.data.col(j).array();
    auto plus = ind.columns[static_cast<std::size_t>(j)];
    auto minus = plus;
    plus.modality += "+";
    minus.modality += "-";
    out.columns.push_back(std::move(plus));
    out.columns.push_back(std::move(minus));
  }
  return out;
}

ContingencyTable double_columns(const Eigen::MatrixXd& scores, std::span<const double> maxima,
                                std::span<const std::string> labels) {
  if (static_cast<Eigen::Index>(maxima.size()) != scores.cols() ||
      static_cast<Eigen::Index>(labels.size()) != scores.cols())
    throw Error(ErrorCode::DimensionMismatch, "maxima/labels must match column count");
  ContingencyTable out;
  out.counts.resize(scores.rows(), 2 * scores.cols());
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    const double m = maxima[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      const double x = scores(i, j);
      if (x < 0.0) throw Error(ErrorCode::NegativeEntry, labels[static_cast<std::size_t>(j)]);
      if (x > m)
        throw Error(ErrorCode::NegativeEntry,
                    labels[static_cast<std::size_t>(j)] + ": entry exceeds declared maximum");
      out.counts(i, 2 * j) = x;
      out.counts(i, 2 * j + 1) = m - x;
    }
    out.col_labels.push_back(labels[static_cast<std::size_t>(j)] + "+");
    out.col_labels.push_back(labels[static_cast<std::size_t>(j)] + "-");
  }
  for (Eigen::Index i = 0; i < scores.rows(); ++i) out.row_labels.push_back("r" + std::to_string(i + 1));
  out.row_roles.assign(static_cast<std::size_t>(out.counts.rows()), Role::Main);
  out.col_roles.assign(static_cast<std::size_t>(out.counts.cols()), Role::Main);
  return out;
}

ContingencyTable crosstab(const CodedTable& table, std::string_view row_q, std::string_view col_q) {
  const auto& schema = table.schema();
  const auto a = schema.question_index(row_q);
  const auto b = schema.question_index(col_q);
  const auto& qa = schema.questions[a];
  const auto& qb = schema.questions[b];

  ContingencyTable out;
  out.counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(qa.modalities.size()),
                                     static_cast<Eigen::Index>(qb.modalities.size()));
  for (std::size_t i = 0; i < table.n(); ++i) {
    const int x = table.code(i, a);
    const int y = table.code(i, b);
    if (x == kMissing || y == kMissing) continue;
    out.counts(x, y) += 1.0;
  }
  for (const auto& m : qa.modalities) out.row_labels.push_back(qa.id + "_" + m);
  for (const auto& m : qb.modalities) out.col_labels.push_back(qb.id + "_" + m);
  out.row_roles.assign(qa.modalities.size(), Role::Main);
  out.col_roles.assign(qb.modalities.size(), Role::Main);
  return out;
}

// ---------------------------------------------------------------------------

ContingencyTable ContingencyTable::from_counts(const Eigen::MatrixXd& counts) {
  ContingencyTable t;
  t.counts = counts;
  for (Eigen::Index i = 0; i < counts.rows(); ++i) t.row_labels.push_back("r" + std::to_string(i + 1));
  for (Eigen::Index j = 0; j < counts.cols(); ++j) t.col_labels.push_back("c" + std::to_string(j + 1));
  t.row_roles.assign(static_cast<std::size_t>(counts.rows()), Role::Main);
  t.col_roles.assign(static_cast<std::size_t>(counts.cols()), Role::Main);
  return t;
}

std::vector<std::size_t> ContingencyTable::main_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < row_roles.size(); ++i)
    if (row_roles[i] == Role::Main) out.push_back(i);
  return out;
}

std::vector<std::size_t> ContingencyTable::main_cols() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < col_roles.size(); ++j)
    if (col_roles[j] == Role::Main) out.push_back(j);
  return out;
}

void ContingencyTable::validate() const {
  const auto rows = static_cast<std::size_t>(counts.rows());
  const auto cols = static_cast<std::size_t>(counts.cols());
  if (row_labels.size() != rows || row_roles.size() != rows || col_labels.size() != cols ||
      col_roles.size() != cols)
    throw Error(ErrorCode::DimensionMismatch, "labels/roles do not match table shape");
  if (!counts.allFinite()) throw Error(ErrorCode::NegativeEntry, "non-finite entry");
  if ((counts.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "table has negative entries");

  const auto mr = main_rows();
  const auto mc = main_cols();
  if (mr.empty() || mc.empty()) throw Error(ErrorCode::DegenerateTable, "no main rows or columns");
  double grand = 0.0;
  for (auto i : mr) {
    double s = 0.0;
    for (auto j : mc) s += counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (s <= 0.0) throw Error(ErrorCode::DegenerateTable, "main row '" + row_labels[i] + "' is all zero");
    grand += s;
  }
  for (auto j : mc) {
    double s = 0.0;
    for (auto i : mr) s += counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (s <= 0.0) throw Error(ErrorCode::DegenerateTable, "main column '" + col_labels[j] + "' is all zero");
  }
  if (grand <= 0.0) throw Error(ErrorCode::DegenerateTable, "grand total is zero");
}

}  // namespace gda
