#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sescap/diagnostics.hpp"
#include "sescap/hamiltonian.hpp"
#include "sescap/propagation.hpp"

namespace sescap::io {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header block: one "# key: json" line per entry, values compact JSON.
using Header = std::vector<std::pair<std::string, nlohmann::json>>;

inline nlohmann::json to_json(const std::map<std::string, std::string>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

/// Writes to `path` through a sibling temporary that is renamed into place,
/// so a failure never leaves a truncated file behind.
template <class Body>
void write_atomically(const std::filesystem::path& path, Body&& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    body(out);
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline void write_header(std::ostream& out, const Header& header, const std::vector<std::string>& columns) {
  for (const auto& [key, value] : header) out << "# " << key << ": " << value.dump() << '\n';
  out << "# columns: ";
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? ", " : "") << columns[i];
  out << '\n';
}

/// Rows "t, x, Re psi, Im psi, |psi|" for every snapshot.
inline void write_snapshots(const std::filesystem::path& path, const Trajectory& traj, Header header) {
  header.emplace_back("trajectory", to_json(traj.provenance));
  write_atomically(path, [&](std::ostream& out) {
    write_header(out, header, {"t", "x", "Re psi", "Im psi", "|psi|"});
    for (const auto& s : traj.snapshots) {
      for (int j = 0; j < s.grid.n_points; ++j) {
        const cplx v = s.amplitudes[j];
        out << fmt(s.time) << ", " << fmt(s.grid.x(j)) << ", " << fmt(v.real()) << ", " << fmt(v.imag()) << ", "
            << fmt(std::abs(v)) << '\n';
      }
    }
  });
}

struct SnapshotFile {
  std::map<std::string, nlohmann::json> header;
  Trajectory trajectory;
};

/// Reads a file produced by write_snapshots. The grid is recovered from the
/// x column of the first snapshot.
inline SnapshotFile read_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open snapshot file " + path.string());
  SnapshotFile f;
  std::vector<std::array<double, 4>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos || line.rfind("# columns", 0) == 0) continue;
      f.header[line.substr(2, colon - 2)] = nlohmann::json::parse(line.substr(colon + 2));
      continue;
    }
    std::array<double, 5> v{};
    if (std::sscanf(line.c_str(), "%lf, %lf, %lf, %lf, %lf", &v[0], &v[1], &v[2], &v[3], &v[4]) != 5) {
      throw ValidationError("malformed snapshot row in " + path.string() + ": " + line);
    }
    rows.push_back({v[0], v[1], v[2], v[3]});
  }
  if (rows.empty()) throw ValidationError("snapshot file " + path.string() + " has no rows");
  std::size_t n = 0;
  while (n < rows.size() && rows[n][0] == rows[0][0]) ++n;
  if (n < 2 || rows.size() % n != 0) throw ValidationError("snapshot file " + path.string() + " has ragged snapshots");
  const double dx = rows[1][1] - rows[0][1];
  const GridSpec g = make_grid(static_cast<int>(n), dx * static_cast<double>(n));
  for (std::size_t s = 0; s < rows.size(); s += n) {
    CVector psi(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) psi[static_cast<Eigen::Index>(j)] = cplx{rows[s + j][2], rows[s + j][3]};
    f.trajectory.push(WavepacketState{g, std::move(psi), rows[s][0]});
  }
  if (auto it = f.header.find("trajectory"); it != f.header.end()) {
    for (const auto& [k, v] : it->second.items()) f.trajectory.provenance[k] = v.get<std::string>();
  }
  return f;
}

/// Generic numeric table with named columns.
inline void write_table(const std::filesystem::path& path, const Header& header,
                        const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  write_atomically(path, [&](std::ostream& out) {
    write_header(out, header, columns);
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? ", " : "") << fmt(row[i]);
      out << '\n';
    }
  });
}

/// Spectrum rows "index, Re E, Im E".
inline void write_spectrum(const std::filesystem::path& path, const CVector& eigenvalues, const Header& header) {
  std::vector<std::vector<double>> rows;
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    rows.push_back({static_cast<double>(j), eigenvalues[j].real(), eigenvalues[j].imag()});
  }
  write_table(path, header, {"index", "Re E", "Im E"}, rows);
}

inline void write_errors(const std::filesystem::path& path, const std::vector<ErrorSample>& e, const Header& header,
                         const std::string& value_name = "error") {
  std::vector<std::vector<double>> rows;
  for (const auto& s : e) rows.push_back({s.t, s.error});
  write_table(path, header, {"t", value_name}, rows);
}

inline void write_bound(const std::filesystem::path& path, const ReflectionReport& r, Header header) {
  header.emplace_back("reflection", nlohmann::json{{"epsilon", r.epsilon},
                                                   {"theta", r.theta},
                                                   {"absorber_length", r.absorber_length},
                                                   {"max_bound", r.max_bound},
                                                   {"violations", r.violating.size()},
                                                   {"spectrum", r.spectrum}});
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < r.k.size(); ++i) rows.push_back({r.k[i], r.bound[i]});
  write_table(path, header, {"k", "bound"}, rows);
}

}  // namespace sescap::io
