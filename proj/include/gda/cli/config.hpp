#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gda/ca_engine.hpp"

namespace gda::cli {

enum class RateMode { Raw, Modified };

std::string to_string(RateMode mode);
RateMode rate_mode_from_string(const std::string& s);

struct TypicalitySpec {
  bool enabled = false;
  // Either column=value (looked up in the input CSV) or explicit row labels.
  std::string column;
  std::string value;
  std::vector<std::string> labels;
  std::uint64_t n_perm = 999;
  std::size_t axes = 0;  // leading axes; 0 = all retained
  unsigned threads = 1;
};

struct ClusterSpec {
  bool rows = true;  // cluster row points (individuals) or column points
  std::size_t k = 2;
  std::vector<std::size_t> axes;  // 1-based; empty = all retained
};

/// Run configuration, read from an INI file. Relative paths resolve against
/// the config file's directory (the output directory against the working
/// directory). See README for the full key list.
struct RunConfig {
  std::filesystem::path base_dir;
  std::filesystem::path input;
  std::filesystem::path schema;
  std::filesystem::path out = "gda-out";
  AnalysisKind kind = AnalysisKind::MCA;
  std::pair<std::size_t, std::size_t> axes{1, 2};
  RateMode rates = RateMode::Raw;
  std::optional<std::size_t> threshold;
  std::optional<std::size_t> max_axes;
  std::vector<std::string> supplementary;
  std::uint64_t seed = 0;

  // kind = ca
  std::string ca_rows;
  std::string ca_cols;

  // kind = pca
  std::string pca_id_column = "id";
  std::vector<std::string> pca_variables;
  std::string pca_role_column;
  std::string pca_main_value;

  std::vector<std::string> centroid_columns;
  TypicalitySpec typicality;
  ClusterSpec cluster;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  std::filesystem::path model_path() const { return out / "model.json"; }
};

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// "a,b" -> (a, b); throws BadAxis on malformed or equal axes.
std::pair<std::size_t, std::size_t> parse_axes(const std::string& text);

}  // namespace gda::cli
