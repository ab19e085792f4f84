#pragma once

#include <string>
#include <vector>

namespace gsvma::presets {

/// The 35-feature subset reported for the GSVMA run, spelled as encoded
/// column names of the shipped Z-Alizadeh Sani schema. Names that appear
/// there with both nominal levels of a binary feature collapse to the single
/// 0/1 column, so the list holds 33 encoded columns.
const std::vector<std::string>& paper35_columns();

}  // namespace gsvma::presets
