#include <string>

#include "CLI11.hpp"
#include "bfrb/cli_app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bfrb - forward-reflected-backward solvers for monotone inclusions in Bregman geometry"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand("run", "run a configured solve");
  run->add_option("config", run_config, "configuration file")->required();

  std::string cmp_config;
  auto* cmp = app.add_subcommand("compare", "run several methods on one instance");
  cmp->add_option("config", cmp_config, "configuration file")->required();

  std::string trace_path, solution_path, json_out;
  auto* diag = app.add_subcommand("diagnose", "verify descent/rate/accounting on a trace");
  diag->add_option("trace", trace_path, "trace CSV written by run")->required();
  diag->add_option("solution", solution_path, "reference solution file")->required();
  diag->add_option("--json", json_out, "write the JSON report here");

  auto* probs = app.add_subcommand("problems", "shipped problem instances");
  auto* list = probs->add_subcommand("list", "list shipped instances");
  std::string export_name, export_out;
  auto* exp = probs->add_subcommand("export", "serialize a shipped instance");
  exp->add_option("name", export_name, "shipped instance name")->required();
  exp->add_option("--out", export_out, "output path (stdout when omitted)");
  probs->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*run) return bfrb::cmd_run(run_config);
  if (*cmp) return bfrb::cmd_compare(cmp_config);
  if (*diag) return bfrb::cmd_diagnose(trace_path, solution_path, json_out);
  if (*list) return bfrb::cmd_problems_list();
  if (*exp) return bfrb::cmd_problems_export(export_name, export_out);
  return 1;
}
