#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "vwlab/phasespace.hpp"
#include "vwlab/potential.hpp"

namespace vwlab {

// Binary snapshot, little-endian:
//   char[6] "VWLAB1", u16 kind (0 phase state, 1 potential), u64 config hash,
//   i32 d, i32 n, i32 nx, i32 nv, f64 x_lo, x_hi, v_lo, v_hi, f64 t,
//   then nx * nv f64 row-major (v fastest). A potential stores nv = 2: value, gradient.
enum class SnapshotKind : std::uint16_t { PhaseState = 0, Potential = 1 };

struct Snapshot {
  SnapshotKind kind = SnapshotKind::PhaseState;
  std::uint64_t hash = 0;
  int d = 1, n = 3;
  Grid1D x, v;
  double t = 0.0;
  std::vector<double> data;
};

void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);
Snapshot to_snapshot(const PhaseSpaceState& f, std::uint64_t hash, int d, int n);
Snapshot to_snapshot(const PotentialField& phi, double t, std::uint64_t hash, int d, int n);
PhaseSpaceState to_state(const Snapshot& s);

// CSV with a "# config_hash=..." line, a header row and 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& hash_hex, const std::vector<std::string>& columns);
  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(const std::string& s);
  void end_row();

 private:
  std::string path_;
  std::shared_ptr<std::ofstream> out_;
  std::size_t columns_, filled_ = 0;
};

std::string format_double(double x);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace vwlab
