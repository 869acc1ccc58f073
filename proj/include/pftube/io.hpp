#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pftube/bootstrap.hpp"
#include "pftube/operator.hpp"
#include "pftube/sde.hpp"
#include "pftube/tube.hpp"

namespace pftube::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

/// Raised for unreadable/unwritable files and malformed contents.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const fs::path& path, const CsvTable& table);
CsvTable read_csv(const fs::path& path);

void write_json(const fs::path& path, const Json& value);
Json read_json(const fs::path& path);

/// Header x_0..x_{d-1}, y_0..y_{d-1}; one pair per row.
void write_dataset_csv(const fs::path& path, const PairedDataset& data);
PairedDataset read_dataset_csv(const fs::path& path, double lag, std::uint64_t seed = 0);

/// Sidecar: model name, lag, seed, dt, m (plus anything in `extra`).
Json dataset_metadata(const PairedDataset& data, const Json& extra = Json::object());

/// CSV + sidecar (`<stem>.json` next to the CSV).
void write_dataset(const fs::path& csv_path, const PairedDataset& data, const Json& extra = Json::object());
PairedDataset read_dataset(const fs::path& csv_path);

/// Single column "deviation".
void write_deviations_csv(const fs::path& path, const std::vector<double>& deviations);
std::vector<double> read_deviations_csv(const fs::path& path);

/// Columns t, radius, embedding_norm.
void write_tube_csv(const fs::path& path, const AmbiguityTube& tube);
/// Columns t, anchor_index, weight.
void write_tube_weights_csv(const fs::path& path, const AmbiguityTube& tube);

struct TubeSeries {
  std::vector<Index> t;
  std::vector<double> radius;
  std::vector<double> embedding_norm;
};
TubeSeries read_tube_csv(const fs::path& path);

/// Operators are stored as a dataset reference plus kernel/regularization
/// parameters and refit on load.
struct OperatorCheckpoint {
  fs::path dataset_csv;
  double lambda = 0.0;
  KernelSpec spec;
};
void write_operator_checkpoint(const fs::path& path, const OperatorCheckpoint& checkpoint);
OperatorCheckpoint read_operator_checkpoint(const fs::path& path);
FittedOperator load_operator(const fs::path& checkpoint_path);

}  // namespace pftube::io
