#pragma once

#include <string>

// Each criterion returns true on pass and may append short details (counts,
// measured values) to the detail string for the printed report line.
namespace acceptance {

bool geometry_suite(std::string& detail);
bool parser_conformance(std::string& detail);
bool fusion_oracle(std::string& detail);
bool statistics_oracle(std::string& detail);
bool null_coupling_control(std::string& detail);
bool planted_signal_recovery(std::string& detail);
bool conflict_feature_uplift(std::string& detail);
bool metric_identities(std::string& detail);
bool determinism(std::string& detail);
bool baseline_replay(std::string& detail);

}  // namespace acceptance
