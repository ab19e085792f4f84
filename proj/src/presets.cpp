#include "gsvma/presets.hpp"

namespace gsvma::presets {

const std::vector<std::string>& paper35_columns() {
  static const std::vector<std::string> columns = {
      "Sex",
      "CRF",
      "CVA",
      "Airway disease",
      "Thyroid Disease",
      "CHF",
      "Systolic Murmur",
      "Diastolic Murmur",
      "LowTH Ang",
      "LVH",
      "Poor R Progression",
      "VHD=mild",
      "VHD=Moderate",
      "VHD=Severe",
      "Age",
      "HTN",
      "EX-Smoker",
      "FH",
      "PR",
      "Typical Chest Pain",
      "Function Class",
      "Q Wave",
      "St Elevation",
      "Tinversion",
      "FBS",
      "TG",
      "LDL",
      "ESR",
      "Lymph",
      "Neut",
      "PLT",
      "EF-TTE",
      "Region RWMA",
  };
  return columns;
}

}  // namespace gsvma::presets
