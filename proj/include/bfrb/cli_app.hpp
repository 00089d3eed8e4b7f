#pragma once
#include <string>

namespace bfrb {

/* CLI entry points. Exit codes: 0 converged, 1 configuration or validation
 * error, 2 iteration budget exhausted, 3 divergence guard tripped.
 */

int cmd_run(const std::string& config_path);
int cmd_compare(const std::string& config_path);
int cmd_diagnose(const std::string& trace_path, const std::string& solution_path,
                 const std::string& json_out = "");
int cmd_problems_list();
int cmd_problems_export(const std::string& name, const std::string& out_path = "");

}  // namespace bfrb
