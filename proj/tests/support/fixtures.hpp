#pragma once

#include <string>

#include "phasestat/ingest.hpp"

namespace fixture {

inline std::string data_path(const std::string& name) {
  return std::string(PHASESTAT_TEST_DATA_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
  return std::string(PHASESTAT_GOLDEN_DIR) + "/" + name;
}

inline phasestat::BuiltDataset load(const std::string& name, phasestat::Design design) {
  const std::string text = phasestat::read_text_file(data_path(name));
  return phasestat::build_dataset(phasestat::parse_components_csv(text), design);
}

}  // namespace fixture
