#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gcurve/config.hpp"
#include "gcurve/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cutoff level-set curvature G-equation lab"};
  std::string mode_name;
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  app.add_option("mode", mode_name, "periodic | radial | value | limit | verify | study")
      ->required()
      ->check(CLI::IsMember({"periodic", "radial", "value", "limit", "verify", "study"}));
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("--quiet", quiet, "suppress progress output");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "gcurve: cannot read " << config_path << '\n';
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  gcurve::RunConfig config;
  try {
    config = gcurve::parse_config(text);
  } catch (const gcurve::Error& e) {
    std::cerr << "gcurve: " << config_path << ": " << e.what() << '\n';
    return gcurve::exit_code_for(e.kind());
  }

  gcurve::RunOptions opts;
  opts.mode = gcurve::parse_mode(mode_name);
  if (!out_dir.empty()) opts.output_dir = out_dir;
  opts.quiet = quiet;
  opts.config_text = text;
  const auto outcome = gcurve::run(config, opts);
  if (outcome.exit_code != 0) {
    std::cerr << "gcurve: " << outcome.message << '\n';
  } else if (!quiet) {
    std::cerr << "gcurve: " << outcome.artifacts.size() << " artifacts in "
              << opts.output_dir.value_or(config.output_dir) << '\n';
  }
  return outcome.exit_code;
}
