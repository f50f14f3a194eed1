#include "auxcell/io.hpp"

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "auxcell/error.hpp"

namespace auxcell {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, format, value);
  return buffer;
}

std::string g12(double v) { return fmt("%.12g", v); }

std::string describe_errno() { return std::strerror(errno); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Eigen::VectorXd vector_from(const json& j, const char* key) {
  if (!j.is_array()) throw IoError(std::string("state: ") + key + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  return v;
}

template <std::size_t N>
json array_json(const std::array<double, N>& a) {
  json out = json::array();
  for (double x : a) out.push_back(x);
  return out;
}

template <std::size_t N>
std::array<double, N> array_from(const json& j) {
  std::array<double, N> a{};
  if (!j.is_array() || j.size() != N) throw IoError("state: malformed array");
  for (std::size_t k = 0; k < N; ++k) a[k] = j[k].get<double>();
  return a;
}

int phase_index(const std::array<double, 4>& iota) {
  int best = 0;
  for (int k = 1; k < 4; ++k) {
    if (iota[k] > iota[best]) best = k;
  }
  return best + 1;
}

void truncate_history(const std::string& path, int keep_through) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot reopen history '" + path + "' for resume");
  std::string line, header, kept;
  std::getline(in, header);
  if (header != history_header()) throw IoError("'" + path + "' is not a history file");
  kept = header + "\n";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const int iteration = std::stoi(line.substr(0, line.find(',')));
    if (iteration <= keep_through) kept += line + "\n";
  }
  write_file_atomic(path, kept);
}

std::string prepare_history(const std::string& out_dir, int resume_from) {
  const std::string path = (fs::path(out_dir) / "history.csv").string();
  if (resume_from >= 0) truncate_history(path, resume_from);
  return path;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing: " + describe_errno());
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_fields(const UnitCellMesh& mesh, const PhaseSet& phases, const MultiLevelSet& sets,
                          const CellSolutions& solutions) {
  const int points = mesh.node_count();
  const int dofs = mesh.periodic_node_count();
  if (sets.phi[0].size() != dofs || sets.phi[1].size() != dofs) {
    throw IoError("level sets do not match the mesh");
  }
  std::string out;
  out.reserve(static_cast<std::size_t>(points) * 200);
  out += "# vtk DataFile Version 3.0\nauxcell unit cell\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(points) + " double\n";
  for (int p = 0; p < points; ++p) {
    const auto& x = mesh.node(p);
    out += fmt("%.17g", x.x()) + " " + fmt("%.17g", x.y()) + " 0\n";
  }
  const int cells = mesh.element_count();
  out += "CELLS " + std::to_string(cells) + " " + std::to_string(4 * cells) + "\n";
  for (const auto& t : mesh.elements()) {
    out += "3 " + std::to_string(t.nodes[0]) + " " + std::to_string(t.nodes[1]) + " " +
           std::to_string(t.nodes[2]) + "\n";
  }
  out += "CELL_TYPES " + std::to_string(cells) + "\n";
  for (int e = 0; e < cells; ++e) out += "5\n";

  out += "POINT_DATA " + std::to_string(points) + "\n";
  auto scalar = [&](const std::string& name, auto&& value) {
    out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
    for (int p = 0; p < points; ++p) out += fmt("%.17g", value(mesh.periodic_dof(p))) + "\n";
  };
  scalar("phi1", [&](int d) { return sets.phi[0][d]; });
  scalar("phi2", [&](int d) { return sets.phi[1][d]; });
  for (int k = 0; k < 4; ++k) {
    scalar("iota" + std::to_string(k + 1),
           [&](int d) { return phase_densities(sets.phi[0][d], sets.phi[1][d], phases)[k]; });
  }
  out += "SCALARS phase int 1\nLOOKUP_TABLE default\n";
  for (int p = 0; p < points; ++p) {
    const int d = mesh.periodic_dof(p);
    out += std::to_string(phase_index(phase_densities(sets.phi[0][d], sets.phi[1][d], phases))) + "\n";
  }
  static const char* kCases[3] = {"chi11", "chi22", "chi12"};
  for (int c = 0; c < 3; ++c) {
    const Eigen::VectorXd& chi = solutions.chi[c];
    const bool present = chi.size() == 2 * dofs;
    for (int comp = 0; comp < 2; ++comp) {
      scalar(std::string(kCases[c]) + (comp == 0 ? "_x" : "_y"),
             [&](int d) { return present ? chi[2 * d + comp] : 0.0; });
    }
  }
  return out;
}

void export_fields(const UnitCellMesh& mesh, const PhaseSet& phases, const MultiLevelSet& sets,
                   const CellSolutions& solutions, const std::string& path) {
  write_file_atomic(path, format_fields(mesh, phases, sets, solutions));
}

VtkPointData read_vtk_point_data(const std::string& path) {
  std::istringstream in(read_file(path));
  VtkPointData data;
  std::string token;
  while (in >> token) {
    if (token == "POINT_DATA") {
      in >> data.points;
    } else if (token == "SCALARS") {
      std::string name, type, lookup, table;
      int components = 1;
      in >> name >> type >> components >> lookup >> table;
      if (lookup != "LOOKUP_TABLE") throw IoError("'" + path + "': malformed SCALARS block " + name);
      std::vector<double> values(static_cast<std::size_t>(data.points));
      for (auto& v : values) {
        if (!(in >> v)) throw IoError("'" + path + "': truncated SCALARS block " + name);
      }
      data.scalars[name] = std::move(values);
    }
  }
  if (data.points == 0) throw IoError("'" + path + "': no POINT_DATA section");
  return data;
}

std::string history_header() {
  return "iteration,J,A1111,A1122,A2222,A1212,V1,V2,V3,V4,l1,l2,l3,l4,dt,ls_trials";
}

std::string history_row(const IterationRecord& r) {
  std::string row = std::to_string(r.iteration);
  for (double v : {r.objective, r.a1111, r.a1122, r.a2222, r.a1212}) row += "," + g12(v);
  for (double v : r.volumes) row += "," + g12(v);
  for (double v : r.multipliers) row += "," + g12(v);
  row += "," + g12(r.dt) + "," + std::to_string(r.line_search_trials);
  return row;
}

void export_history(const RunHistory& history, const std::string& path) {
  if (history.records.empty()) throw IoError("refusing to write an empty history to '" + path + "'");
  std::string out = history_header() + "\n";
  for (const auto& r : history.records) out += history_row(r) + "\n";
  write_file_atomic(path, out);
}

RunHistory read_history(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  if (line != history_header()) throw IoError("'" + path + "' is not a history file");
  RunHistory history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 16) throw IoError("'" + path + "': malformed row '" + line + "'");
    IterationRecord r;
    r.iteration = std::stoi(cells[0]);
    r.objective = std::stod(cells[1]);
    r.a1111 = std::stod(cells[2]);
    r.a1122 = std::stod(cells[3]);
    r.a2222 = std::stod(cells[4]);
    r.a1212 = std::stod(cells[5]);
    for (int k = 0; k < 4; ++k) r.volumes[k] = std::stod(cells[6 + k]);
    for (int k = 0; k < 4; ++k) r.multipliers[k] = std::stod(cells[10 + k]);
    r.dt = std::stod(cells[14]);
    r.line_search_trials = std::stoi(cells[15]);
    history.records.push_back(r);
  }
  return history;
}

HistoryWriter::HistoryWriter(const std::string& path, bool append) : path_(path) {
  file_ = std::fopen(path.c_str(), append ? "ab" : "wb");
  if (file_ == nullptr) throw IoError("cannot open history '" + path + "': " + describe_errno());
  if (!append) {
    std::fputs((history_header() + "\n").c_str(), file_);
    std::fflush(file_);
  }
}

HistoryWriter::~HistoryWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

void HistoryWriter::append(const IterationRecord& record) {
  const std::string row = history_row(record) + "\n";
  if (std::fputs(row.c_str(), file_) < 0 || std::fflush(file_) != 0) {
    throw IoError("write to '" + path_ + "' failed");
  }
}

std::string format_manifest(const Config& config, int threads, const std::string& command) {
  json j;
  j["program"] = "auxcell";
  j["command"] = command;
  j["threads"] = threads;
  j["config"] = json::parse(serialize_config(config));
  return j.dump(2) + "\n";
}

std::string format_state(const Config& config, const OptState& state) {
  json j;
  j["format"] = "auxcell-state-1";
  j["config"] = json::parse(serialize_config(config));
  j["iteration"] = state.iteration;
  j["consecutive_failures"] = state.consecutive_failures;
  j["stagnated"] = state.stagnated;
  j["phi1"] = vector_json(state.level_sets.phi[0]);
  j["phi2"] = vector_json(state.level_sets.phi[1]);
  j["since_reinit"] = {state.level_sets.since_reinit[0], state.level_sets.since_reinit[1]};
  const auto& c = state.constraints;
  j["constraints"] = {{"mode", c.mode == ConstraintMode::Plain ? "plain" : "augmented"},
                      {"multipliers", array_json(c.multipliers)},
                      {"penalties", array_json(c.penalties)},
                      {"volumes", array_json(c.volumes)},
                      {"updates", c.updates}};
  const auto& s = state.current.solutions;
  j["chi"] = {vector_json(s.chi[0]), vector_json(s.chi[1]), vector_json(s.chi[2])};
  j["residual"] = array_json(s.residual);
  j["cg_iterations"] = {s.iterations[0], s.iterations[1], s.iterations[2]};
  return j.dump() + "\n";
}

void save_state(const std::string& path, const Config& config, const OptState& state) {
  write_file_atomic(path, format_state(config, state));
}

StoredState parse_state(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("state file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "auxcell-state-1") throw IoError("unsupported state format");
    StoredState s;
    s.config = parse_config(j.at("config").dump());
    s.iteration = j.at("iteration").get<int>();
    s.consecutive_failures = j.at("consecutive_failures").get<int>();
    s.stagnated = j.at("stagnated").get<bool>();
    s.level_sets.phi[0] = vector_from(j.at("phi1"), "phi1");
    s.level_sets.phi[1] = vector_from(j.at("phi2"), "phi2");
    s.level_sets.since_reinit = {j.at("since_reinit").at(0).get<int>(), j.at("since_reinit").at(1).get<int>()};
    const json& c = j.at("constraints");
    s.constraints.mode = c.at("mode").get<std::string>() == "plain" ? ConstraintMode::Plain : ConstraintMode::Augmented;
    s.constraints.multipliers = array_from<4>(c.at("multipliers"));
    s.constraints.penalties = array_from<4>(c.at("penalties"));
    s.constraints.volumes = array_from<4>(c.at("volumes"));
    s.constraints.updates = c.at("updates").get<int>();
    for (int k = 0; k < 3; ++k) {
      s.solutions.chi[k] = vector_from(j.at("chi").at(k), "chi");
      s.solutions.iterations[k] = j.at("cg_iterations").at(k).get<int>();
    }
    s.solutions.residual = array_from<3>(j.at("residual"));
    const Eigen::Index dofs = static_cast<Eigen::Index>(s.config.mesh_n) * s.config.mesh_n;
    if (s.level_sets.phi[0].size() != dofs || s.level_sets.phi[1].size() != dofs) {
      throw IoError("state level sets do not match mesh.n");
    }
    for (const auto& chi : s.solutions.chi) {
      if (chi.size() != 2 * dofs) throw IoError("state correctors do not match mesh.n");
    }
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed state file: ") + e.what());
  }
}

StoredState load_state(const std::string& path) {
  try {
    return parse_state(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

OptState restore_state(const Optimizer& optimizer, const StoredState& stored) {
  return optimizer.restore(stored.level_sets, stored.constraints, stored.solutions, stored.iteration,
                           stored.consecutive_failures, stored.stagnated);
}

OutputWriter::OutputWriter(const Optimizer& optimizer, std::string out_dir, int resume_from)
    : optimizer_(optimizer),
      out_dir_((fs::create_directories(out_dir), std::move(out_dir))),
      history_(prepare_history(out_dir_, resume_from), resume_from >= 0),
      resume_from_(resume_from) {}

void OutputWriter::on_record(const IterationRecord& record, const OptState& /*state*/) {
  if (record.iteration <= resume_from_) return;
  history_.append(record);
}

std::string OutputWriter::snapshot_path(int iteration) const {
  char name[32];
  std::snprintf(name, sizeof name, "fields_%04d.vtk", iteration);
  return (fs::path(out_dir_) / name).string();
}

void OutputWriter::on_snapshot(const OptState& state) {
  if (state.iteration <= resume_from_) return;
  export_fields(optimizer_.mesh(), optimizer_.phases(), state.level_sets, state.current.solutions,
                snapshot_path(state.iteration));
  save_state((fs::path(out_dir_) / "state.json").string(), optimizer_.config(), state);
}

}  // namespace auxcell
