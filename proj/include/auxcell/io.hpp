#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "auxcell/config.hpp"
#include "auxcell/optimizer.hpp"

namespace auxcell {

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Legacy ASCII VTK unstructured grid on the (n+1)^2 grid points with point
/// data phi1, phi2, iota1..iota4, phase (argmax of iota, 1..4) and the six
/// corrector components chi11_x .. chi12_y. Byte-identical for identical input.
std::string format_fields(const UnitCellMesh& mesh, const PhaseSet& phases, const MultiLevelSet& sets,
                          const CellSolutions& solutions);
void export_fields(const UnitCellMesh& mesh, const PhaseSet& phases, const MultiLevelSet& sets,
                   const CellSolutions& solutions, const std::string& path);

/// Point data of a legacy VTK file written by export_fields.
struct VtkPointData {
  int points = 0;
  std::map<std::string, std::vector<double>> scalars;
};
VtkPointData read_vtk_point_data(const std::string& path);

std::string history_header();
/// One CSV row, numbers with 12 significant digits.
std::string history_row(const IterationRecord& record);
void export_history(const RunHistory& history, const std::string& path);
/// Parses a CSV written by export_history or HistoryWriter.
RunHistory read_history(const std::string& path);

/// Appends rows as they arrive and flushes each one, so an interrupted run
/// leaves a valid partial CSV.
class HistoryWriter {
 public:
  /// With `append`, rows are added to an existing file without a new header.
  explicit HistoryWriter(const std::string& path, bool append = false);
  ~HistoryWriter();
  HistoryWriter(const HistoryWriter&) = delete;
  HistoryWriter& operator=(const HistoryWriter&) = delete;

  void append(const IterationRecord& record);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
};

/// Run manifest: the full resolved configuration plus run metadata.
std::string format_manifest(const Config& config, int threads, const std::string& command);

/// Everything needed to resume a run bit-exactly.
struct StoredState {
  Config config;
  MultiLevelSet level_sets;
  ConstraintState constraints;
  CellSolutions solutions;
  int iteration = 0;
  int consecutive_failures = 0;
  bool stagnated = false;
};

std::string format_state(const Config& config, const OptState& state);
void save_state(const std::string& path, const Config& config, const OptState& state);
StoredState parse_state(const std::string& text);
StoredState load_state(const std::string& path);
/// Rebuilds the optimizer state of `stored` (no cell solves).
OptState restore_state(const Optimizer& optimizer, const StoredState& stored);

/// Writes history.csv incrementally, and fields_NNNN.vtk plus state.json at
/// every snapshot, under `out_dir`. With `resume_from` >= 0 the existing
/// history is truncated after that iteration and continued.
class OutputWriter : public RunObserver {
 public:
  OutputWriter(const Optimizer& optimizer, std::string out_dir, int resume_from = -1);
  void on_record(const IterationRecord& record, const OptState& state) override;
  void on_snapshot(const OptState& state) override;

  /// Path of the snapshot file written for `iteration`.
  std::string snapshot_path(int iteration) const;

 private:
  const Optimizer& optimizer_;
  std::string out_dir_;
  HistoryWriter history_;
  int resume_from_ = -1;
};

}  // namespace auxcell
