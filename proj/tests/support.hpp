#pragma once

#include <filesystem>
#include <string>

#include "seikit/seikit.hpp"

namespace testing_support {

inline std::filesystem::path source_dir() { return SEIKIT_SOURCE_DIR; }

inline sei::Scenario worked(const std::string& name) {
  return sei::load_scenario_file((source_dir() / "scenarios" / "worked" / (name + ".json")).string());
}

inline sei::Scenario extra(const std::string& name) {
  return sei::load_scenario_file((source_dir() / "scenarios" / "extra" / (name + ".json")).string());
}

inline sei::SampleTuple tuple(sei::Point s, sei::Point t, double alpha, double lambda) {
  sei::SampleTuple tp;
  tp.s = std::move(s);
  tp.t = std::move(t);
  tp.alpha = alpha;
  tp.lambda = lambda;
  tp.origin = sei::Origin::Explicit;
  return tp;
}

inline sei::SamplePlan grid_only() {
  sei::SamplePlan p;
  p.random_tuples = 0;
  return p;
}

}  // namespace testing_support
