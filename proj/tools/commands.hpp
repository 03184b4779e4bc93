#pragma once

#include <string>

#include "mrfgof/config.hpp"

namespace mrfgof::cli {

// Each command writes its JSON result (and optional CSV) as configured.
void cmd_partition(const RunConfig& cfg);
void cmd_simulate(const RunConfig& cfg);
void cmd_fit(const RunConfig& cfg);
void cmd_residuals(const RunConfig& cfg);
void cmd_null_dist(const RunConfig& cfg);
void cmd_test_simple(const RunConfig& cfg);
void cmd_test_composite(const RunConfig& cfg);
void cmd_study_table1(const RunConfig& cfg);
void cmd_study_distance(const RunConfig& cfg);
void cmd_power(const RunConfig& cfg);

}  // namespace mrfgof::cli
