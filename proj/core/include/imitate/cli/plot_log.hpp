#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace imitate::cli {

/// Training log CSV: a header row then numeric rows ("nan" allowed).
struct LogTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

/// Throws FormatError naming the file and line for malformed input.
LogTable read_log_csv(const std::filesystem::path& path);

struct LabeledLog {
  std::string label;
  std::filesystem::path path;
};

/// Parses "label=path" or a bare path (label = file stem).
LabeledLog parse_log_spec(const std::string& spec);

/// One curve on a chart. With several logs under one label, y is the mean and
/// [lo, hi] the min/max band across them at sample counts present in every log.
struct Series {
  std::string label;
  std::vector<double> x, y, lo, hi;
  int members = 1;
};

/// Groups logs by label and builds the series for statistic `stat`.
std::vector<Series> build_series(const std::vector<std::pair<std::string, LogTable>>& logs, const std::string& stat);

std::string render_svg(const std::string& title, const std::vector<Series>& series);

/// Writes <out_dir>/<stat>.svg for every statistic column (x = samples).
/// Returns the written files.
std::vector<std::filesystem::path> plot_logs(const std::vector<LabeledLog>& logs, const std::filesystem::path& out_dir);

}  // namespace imitate::cli
