#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pfsaddle/harness.hpp"

namespace pfsaddle {

using nlohmann::json;

std::vector<double> pointwise_median(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) return {};
  std::size_t shortest = curves.front().size();
  for (const auto& c : curves) shortest = std::min(shortest, c.size());
  std::vector<double> out(shortest);
  std::vector<double> column(curves.size());
  for (std::size_t i = 0; i < shortest; ++i) {
    for (std::size_t s = 0; s < curves.size(); ++s) column[s] = curves[s][i];
    std::sort(column.begin(), column.end());
    const std::size_t n = column.size();
    out[i] = n % 2 == 1 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return out;
}

namespace {

const std::set<std::string, std::less<>> kQuantities = {"dist_sq",     "gap",         "gap_f", "penalty_value",
                                                        "consensus_x", "consensus_y"};
const std::set<std::string, std::less<>> kAxes = {"k", "comm_rounds", "local_grad_batches"};

bool floored(std::string_view quantity) { return quantity != "penalty_value"; }

struct Curve {
  std::vector<double> x;
  std::vector<double> y;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Curve read_curve(const std::filesystem::path& csv, std::string_view quantity, std::string_view x_axis) {
  std::ifstream in(csv);
  if (!in) fail(ErrorKind::io, "cannot open " + csv.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::io, csv.string() + " is empty");
  const auto header = split(line);
  auto column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    fail(ErrorKind::usage, csv.string() + " has no column '" + std::string(name) + "'");
  };
  const std::size_t cx = column(x_axis);
  const std::size_t cy = column(quantity);
  Curve c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cy >= cells.size() || cx >= cells.size() || cells[cy].empty() || cells[cx].empty()) continue;
    double y = std::stod(cells[cy]);
    if (floored(quantity)) y = std::max(y, kPlotFloor);
    c.x.push_back(std::stod(cells[cx]));
    c.y.push_back(y);
  }
  return c;
}

std::string header_lines(const std::string& source, std::string_view quantity, std::string_view x_axis) {
  std::string h = "# source: " + source + "\n# columns: " + std::string(x_axis) + " " + std::string(quantity) + "\n";
  if (floored(quantity))
    h += "# values below 1e-16 are written as 1e-16 so the column is log-scale ready\n";
  else
    h += "# values are not floored (may be zero or negative)\n";
  return h;
}

void write_dat(const std::filesystem::path& path, const std::string& header, const Curve& c) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << header;
  char buf[96];
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", c.x[i], c.y[i]);
    out << buf;
  }
  if (!out) fail(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& bundle, std::string_view quantity,
                                                  std::string_view x_axis) {
  if (!kQuantities.count(quantity))
    fail(ErrorKind::usage, "unknown quantity '" + std::string(quantity) +
                               "' (dist_sq | gap | gap_f | penalty_value | consensus_x | consensus_y)");
  if (!kAxes.count(x_axis))
    fail(ErrorKind::usage, "unknown x axis '" + std::string(x_axis) + "' (k | comm_rounds | local_grad_batches)");

  const auto manifest_path = bundle / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorKind::io, "cannot open " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    fail(ErrorKind::io, manifest_path.string() + ": " + e.what());
  }
  if (!manifest.contains("runs") || !manifest["runs"].is_array())
    fail(ErrorKind::io, manifest_path.string() + " has no runs array");

  const auto dir = bundle / "plot" / (std::string(quantity) + "-vs-" + std::string(x_axis));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  std::map<std::pair<std::string, std::size_t>, std::vector<Curve>> groups;
  for (const auto& run : manifest["runs"]) {
    if (run.value("status", "") != "ok") continue;
    const std::string file = run.at("file").get<std::string>();
    Curve c = read_curve(bundle / file, quantity, x_axis);
    const auto stem = std::filesystem::path(file).stem().string();
    const auto out = dir / (stem + ".dat");
    write_dat(out, header_lines(file, quantity, x_axis), c);
    written.push_back(out);
    groups[{run.at("label").get<std::string>(), run.at("lambda_index").get<std::size_t>()}].push_back(std::move(c));
  }

  for (const auto& [key, curves] : groups) {
    std::vector<std::vector<double>> xs, ys;
    for (const auto& c : curves) {
      xs.push_back(c.x);
      ys.push_back(c.y);
    }
    Curve median{pointwise_median(xs), pointwise_median(ys)};
    const std::string name = key.first + "-l" + std::to_string(key.second) + "-median";
    const auto out = dir / (name + ".dat");
    write_dat(out,
              header_lines("pointwise median over " + std::to_string(curves.size()) +
                               " seeds, rows aligned by index and truncated to the shortest run",
                           quantity, x_axis),
              median);
    written.push_back(out);
  }
  return written;
}

}  // namespace pfsaddle
