#pragma once

#include <filesystem>

#include <json.hpp>

#include "gda/ca_engine.hpp"

namespace gda {

/// JSON layout ("format": "gda-model/1"):
///
///   kind, q_active, total_inertia, axes      scalars
///   eigenvalues, rates                       every nonzero eigenvalue
///   modified_rates                           [{axis, modified, rate}], MCA only, axes 1-based
///   rows, cols                               {labels, masses, dist2, coords, contrib, cos2};
///                                            matrices are one array per point
///   supplementary_rows, supplementary_cols,
///   centroids                                [{label, coords, cos2, dist2, weight}]
///   row_profiles, mean_profile, means, scales
///
/// Undefined cos2 values (points at the origin) are written as null.
nlohmann::json model_to_json(const FactorModel& model);
FactorModel model_from_json(const nlohmann::json& doc);

void save_model(const FactorModel& model, const std::filesystem::path& path);
FactorModel load_model(const std::filesystem::path& path);

}  // namespace gda
