#include <CLI11.hpp>
#include <string>
#include <vector>

#include "commands.hpp"

namespace {

std::vector<std::string> split_values(const std::string& comma_list) {
  std::vector<std::string> out;
  std::string current;
  for (char c : comma_list) {
    if (c == ',') {
      out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty() || !comma_list.empty()) out.push_back(current);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pose_sim: Monte-Carlo simulation of weakly supervised keypoint-based "
      "6D object pose estimation"};
  app.require_subcommand(1);

  std::string config_path, out_csv, out_json, param, values;

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run one experiment and write reports");
  simulate->add_option("--config", config_path, "JSON config file")
      ->required();
  simulate->add_option("--out-csv", out_csv, "Per-trial CSV output path")
      ->required();
  simulate->add_option("--out-json", out_json, "Summary JSON output path")
      ->required();

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run one experiment per value of a swept parameter");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--param", param,
                    "Parameter to sweep (n_keypoints, distribution, "
                    "pixel_noise_sigma, n_reference_views)")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out-csv", out_csv, "Summary CSV output path")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    return vkpose::cli::cmd_simulate(config_path, out_csv, out_json);
  }
  return vkpose::cli::cmd_sweep(config_path, param, split_values(values),
                                out_csv);
}
