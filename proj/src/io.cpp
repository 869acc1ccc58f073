#include "pftube/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace pftube::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& s, const fs::path& path) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("malformed number '" + s + "' in " + path.string());
  }
  return v;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

void write_csv(const fs::path& path, const CsvTable& table) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

CsvTable read_csv(const fs::path& path) {
  auto in = open_in(path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV: " + path.string());
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) throw IoError("ragged CSV row in " + path.string());
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_json(const fs::path& path, const Json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_dataset_csv(const fs::path& path, const PairedDataset& data) {
  CsvTable table;
  const Index d = data.dim();
  for (Index k = 0; k < d; ++k) table.header.push_back("x_" + std::to_string(k));
  for (Index k = 0; k < d; ++k) table.header.push_back("y_" + std::to_string(k));
  table.rows.reserve(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i) {
    std::vector<double> row;
    for (Index k = 0; k < d; ++k) row.push_back(data.x.matrix()(i, k));
    for (Index k = 0; k < d; ++k) row.push_back(data.y.matrix()(i, k));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

PairedDataset read_dataset_csv(const fs::path& path, double lag, std::uint64_t seed) {
  const CsvTable table = read_csv(path);
  const auto cols = static_cast<Index>(table.header.size());
  if (cols < 2 || cols % 2 != 0) throw IoError("dataset CSV needs x_0..x_{d-1}, y_0..y_{d-1}: " + path.string());
  const Index d = cols / 2;
  for (Index k = 0; k < d; ++k) {
    if (table.header[static_cast<std::size_t>(k)] != "x_" + std::to_string(k) ||
        table.header[static_cast<std::size_t>(d + k)] != "y_" + std::to_string(k)) {
      throw IoError("unexpected dataset header in " + path.string());
    }
  }
  const auto m = static_cast<Index>(table.rows.size());
  if (m < 1) throw IoError("dataset CSV has no rows: " + path.string());
  Eigen::MatrixXd x(m, d), y(m, d);
  for (Index i = 0; i < m; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (Index k = 0; k < d; ++k) {
      x(i, k) = row[static_cast<std::size_t>(k)];
      y(i, k) = row[static_cast<std::size_t>(d + k)];
    }
  }
  return PairedDataset(PointSet(std::move(x)), PointSet(std::move(y)), lag, seed);
}

Json dataset_metadata(const PairedDataset& data, const Json& extra) {
  Json meta = {{"model", data.model_name},
               {"lag", data.lag},
               {"seed", data.seed},
               {"dt", data.dt},
               {"m", data.size()},
               {"dim", data.dim()}};
  for (const auto& [key, value] : extra.items()) meta[key] = value;
  return meta;
}

void write_dataset(const fs::path& csv_path, const PairedDataset& data, const Json& extra) {
  write_dataset_csv(csv_path, data);
  write_json(sidecar_path(csv_path), dataset_metadata(data, extra));
}

PairedDataset read_dataset(const fs::path& csv_path) {
  const Json meta = read_json(sidecar_path(csv_path));
  PairedDataset data = read_dataset_csv(csv_path, meta.at("lag").get<double>(), meta.value("seed", std::uint64_t{0}));
  data.dt = meta.value("dt", 0.0);
  data.model_name = meta.value("model", std::string());
  if (meta.contains("m") && meta.at("m").get<Index>() != data.size()) {
    throw IoError("dataset sidecar m does not match CSV rows: " + csv_path.string());
  }
  return data;
}

void write_deviations_csv(const fs::path& path, const std::vector<double>& deviations) {
  CsvTable table{{"deviation"}, {}};
  for (double v : deviations) table.rows.push_back({v});
  write_csv(path, table);
}

std::vector<double> read_deviations_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header != std::vector<std::string>{"deviation"}) throw IoError("unexpected deviations header");
  std::vector<double> out;
  for (const auto& row : table.rows) out.push_back(row[0]);
  return out;
}

void write_tube_csv(const fs::path& path, const AmbiguityTube& tube) {
  CsvTable table{{"t", "radius", "embedding_norm"}, {}};
  for (std::size_t t = 0; t < tube.steps.size(); ++t) {
    table.rows.push_back({static_cast<double>(t), tube.steps[t].radius, tube.steps[t].embedding_norm});
  }
  write_csv(path, table);
}

void write_tube_weights_csv(const fs::path& path, const AmbiguityTube& tube) {
  CsvTable table{{"t", "anchor_index", "weight"}, {}};
  for (std::size_t t = 0; t < tube.steps.size(); ++t) {
    const auto& w = tube.steps[t].embedding.weights();
    for (Index i = 0; i < w.size(); ++i) table.rows.push_back({static_cast<double>(t), static_cast<double>(i), w(i)});
  }
  write_csv(path, table);
}

TubeSeries read_tube_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header != std::vector<std::string>{"t", "radius", "embedding_norm"}) {
    throw IoError("unexpected tube header in " + path.string());
  }
  TubeSeries series;
  for (const auto& row : table.rows) {
    series.t.push_back(static_cast<Index>(row[0]));
    series.radius.push_back(row[1]);
    series.embedding_norm.push_back(row[2]);
  }
  return series;
}

void write_operator_checkpoint(const fs::path& path, const OperatorCheckpoint& checkpoint) {
  write_json(path, Json{{"dataset_csv", checkpoint.dataset_csv.string()},
                        {"lambda", checkpoint.lambda},
                        {"kernel_family", "gaussian-rbf"},
                        {"bandwidth", checkpoint.spec.bandwidth},
                        {"kernel_scale", checkpoint.spec.scale}});
}

OperatorCheckpoint read_operator_checkpoint(const fs::path& path) {
  const Json j = read_json(path);
  if (j.value("kernel_family", std::string()) != "gaussian-rbf") throw IoError("unsupported kernel family");
  OperatorCheckpoint cp;
  cp.dataset_csv = j.at("dataset_csv").get<std::string>();
  if (cp.dataset_csv.is_relative()) cp.dataset_csv = path.parent_path() / cp.dataset_csv;
  cp.lambda = j.at("lambda").get<double>();
  cp.spec = KernelSpec::gaussian(j.at("bandwidth").get<double>(), j.value("kernel_scale", 1.0));
  return cp;
}

FittedOperator load_operator(const fs::path& checkpoint_path) {
  const OperatorCheckpoint cp = read_operator_checkpoint(checkpoint_path);
  return fit(read_dataset(cp.dataset_csv), cp.lambda, cp.spec);
}

}  // namespace pftube::io
