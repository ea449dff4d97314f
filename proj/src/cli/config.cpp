#include "gda/cli/config.hpp"

#include <fstream>

#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gda/error.hpp"

namespace gda::cli {

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split(const std::string& value, char sep) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, value, [sep](char c) { return c == sep; });
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::uint64_t to_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadConfig, key + ": expected a nonnegative integer, got '" + value + "'");
  }
}

[[noreturn]] void unknown(const std::string& section, const std::string& key) {
  throw Error(ErrorCode::BadConfig, "unknown key [" + section + "] " + key);
}

}  // namespace

std::string to_string(RateMode mode) { return mode == RateMode::Raw ? "raw" : "modified"; }

RateMode rate_mode_from_string(const std::string& s) {
  if (s == "raw") return RateMode::Raw;
  if (s == "modified") return RateMode::Modified;
  throw Error(ErrorCode::BadConfig, "rates must be raw|modified, got '" + s + "'");
}

std::pair<std::size_t, std::size_t> parse_axes(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw Error(ErrorCode::BadAxis, "axes must be 'a,b', got '" + text + "'");
  std::size_t a = 0;
  std::size_t b = 0;
  try {
    a = static_cast<std::size_t>(to_count("axes", parts[0]));
    b = static_cast<std::size_t>(to_count("axes", parts[1]));
  } catch (const Error&) {
    throw Error(ErrorCode::BadAxis, "axes must be positive integers, got '" + text + "'");
  }
  if (a < 1 || b < 1 || a == b) throw Error(ErrorCode::BadAxis, "axes must be two distinct values >= 1");
  return {a, b};
}

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
  if (p.empty() || p.is_absolute()) return p;
  return base_dir / p;
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }

  RunConfig cfg;
  cfg.base_dir = base_dir;
  bool have_kind = false;
  for (const auto& [section, body] : tree) {
    for (const auto& [key, node] : body) {
      const auto value = node.get_value<std::string>();
      if (section == "run") {
        if (key == "kind") {
          cfg.kind = analysis_kind_from_string(value);
          have_kind = true;
        } else if (key == "input") {
          cfg.input = value;
        } else if (key == "schema") {
          cfg.schema = value;
        } else if (key == "out") {
          cfg.out = value;
        } else if (key == "axes") {
          cfg.axes = parse_axes(value);
        } else if (key == "rates") {
          cfg.rates = rate_mode_from_string(value);
        } else if (key == "threshold") {
          cfg.threshold = static_cast<std::size_t>(to_count(key, value));
        } else if (key == "max_axes") {
          cfg.max_axes = static_cast<std::size_t>(to_count(key, value));
        } else if (key == "supplementary") {
          cfg.supplementary = split(value, '|');
        } else if (key == "seed") {
          cfg.seed = to_count(key, value);
        } else {
          unknown(section, key);
        }
      } else if (section == "ca") {
        if (key == "rows") {
          cfg.ca_rows = value;
        } else if (key == "cols") {
          cfg.ca_cols = value;
        } else {
          unknown(section, key);
        }
      } else if (section == "pca") {
        if (key == "id_column") {
          cfg.pca_id_column = value;
        } else if (key == "variables") {
          cfg.pca_variables = split(value, '|');
        } else if (key == "role_column") {
          cfg.pca_role_column = value;
        } else if (key == "main_value") {
          cfg.pca_main_value = value;
        } else {
          unknown(section, key);
        }
      } else if (section == "centroids") {
        if (key == "columns") {
          cfg.centroid_columns = split(value, '|');
        } else {
          unknown(section, key);
        }
      } else if (section == "typicality") {
        cfg.typicality.enabled = true;
        if (key == "subcloud") {
          const auto eq = value.find('=');
          if (eq == std::string::npos || eq == 0)
            throw Error(ErrorCode::BadConfig, "typicality subcloud must be column=value");
          cfg.typicality.column = boost::algorithm::trim_copy(value.substr(0, eq));
          cfg.typicality.value = boost::algorithm::trim_copy(value.substr(eq + 1));
        } else if (key == "labels") {
          cfg.typicality.labels = split(value, '|');
        } else if (key == "n_perm") {
          cfg.typicality.n_perm = to_count(key, value);
        } else if (key == "seed") {
          cfg.seed = to_count(key, value);
        } else if (key == "axes") {
          cfg.typicality.axes = static_cast<std::size_t>(to_count(key, value));
        } else if (key == "threads") {
          cfg.typicality.threads = static_cast<unsigned>(to_count(key, value));
        } else {
          unknown(section, key);
        }
      } else if (section == "cluster") {
        if (key == "cloud") {
          if (value != "rows" && value != "cols")
            throw Error(ErrorCode::BadConfig, "cluster cloud must be rows|cols");
          cfg.cluster.rows = value == "rows";
        } else if (key == "k") {
          cfg.cluster.k = static_cast<std::size_t>(to_count(key, value));
        } else if (key == "axes") {
          for (const auto& a : split(value, ',')) {
            const auto ax = static_cast<std::size_t>(to_count(key, a));
            if (ax < 1) throw Error(ErrorCode::BadAxis, "cluster axes are 1-based");
            cfg.cluster.axes.push_back(ax);
          }
        } else {
          unknown(section, key);
        }
      } else {
        throw Error(ErrorCode::BadConfig, "unknown section [" + section + "]");
      }
    }
  }

  if (!have_kind) throw Error(ErrorCode::BadConfig, "[run] kind is required");
  if (cfg.input.empty()) throw Error(ErrorCode::BadConfig, "[run] input is required");
  if (cfg.kind != AnalysisKind::PCA && cfg.schema.empty())
    throw Error(ErrorCode::BadConfig, "[run] schema is required for ca/mca");
  if (cfg.kind == AnalysisKind::CA && (cfg.ca_rows.empty() || cfg.ca_cols.empty()))
    throw Error(ErrorCode::BadConfig, "[ca] rows and cols are required");
  if (cfg.kind == AnalysisKind::PCA && cfg.pca_variables.empty())
    throw Error(ErrorCode::BadConfig, "[pca] variables is required");
  if (!cfg.pca_role_column.empty() && cfg.pca_main_value.empty())
    throw Error(ErrorCode::BadConfig, "[pca] main_value is required with role_column");
  if (cfg.typicality.enabled) {
    if (cfg.typicality.n_perm < 1) throw Error(ErrorCode::BadConfig, "n_perm must be >= 1");
    if (cfg.typicality.column.empty() == cfg.typicality.labels.empty())
      throw Error(ErrorCode::BadConfig, "[typicality] needs exactly one of subcloud or labels");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace gda::cli
