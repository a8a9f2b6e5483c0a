#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imitate/cli/plot_log.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Plot training log CSVs as SVG learning curves"};
  std::vector<std::string> logs;
  std::string out_dir = "output/plots";
  app.add_option("logs", logs, "log CSV files, optionally as label=path; logs sharing a label are banded")
      ->required();
  app.add_option("-o,--out", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<imitate::cli::LabeledLog> specs;
    for (const auto& l : logs) specs.push_back(imitate::cli::parse_log_spec(l));
    for (const auto& p : imitate::cli::plot_logs(specs, out_dir)) std::cout << p.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
