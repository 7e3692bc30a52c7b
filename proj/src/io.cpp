#include "vwlab/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "vwlab/error.hpp"

namespace vwlab {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[6] = {'V', 'W', 'L', 'A', 'B', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  require(static_cast<bool>(is), ErrorKind::Io, "truncated snapshot " + path);
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& s) {
  require(s.data.size() == static_cast<std::size_t>(s.x.n) * s.v.n, ErrorKind::InvalidInput,
          "snapshot data size differs from its grid");
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::Io, "cannot write " + path);
  os.write(kMagic, sizeof kMagic);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(s.kind));
  put<std::uint64_t>(os, s.hash);
  put<std::int32_t>(os, s.d);
  put<std::int32_t>(os, s.n);
  put<std::int32_t>(os, s.x.n);
  put<std::int32_t>(os, s.v.n);
  for (double b : {s.x.lo, s.x.hi, s.v.lo, s.v.hi, s.t}) put<double>(os, b);
  os.write(reinterpret_cast<const char*>(s.data.data()),
           static_cast<std::streamsize>(s.data.size() * sizeof(double)));
  require(static_cast<bool>(os), ErrorKind::Io, "failed writing " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::Io, "cannot read " + path);
  char magic[6];
  is.read(magic, sizeof magic);
  require(static_cast<bool>(is) && std::memcmp(magic, kMagic, sizeof magic) == 0, ErrorKind::Io,
          path + " is not a snapshot file");
  Snapshot s;
  s.kind = static_cast<SnapshotKind>(get<std::uint16_t>(is, path));
  s.hash = get<std::uint64_t>(is, path);
  s.d = get<std::int32_t>(is, path);
  s.n = get<std::int32_t>(is, path);
  s.x.n = get<std::int32_t>(is, path);
  s.v.n = get<std::int32_t>(is, path);
  s.x.lo = get<double>(is, path);
  s.x.hi = get<double>(is, path);
  s.v.lo = get<double>(is, path);
  s.v.hi = get<double>(is, path);
  s.t = get<double>(is, path);
  require(s.x.n > 0 && s.v.n > 0, ErrorKind::Io, "corrupt snapshot grid in " + path);
  s.data.resize(static_cast<std::size_t>(s.x.n) * s.v.n);
  is.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(s.data.size() * sizeof(double)));
  require(static_cast<bool>(is), ErrorKind::Io, "truncated snapshot " + path);
  return s;
}

Snapshot to_snapshot(const PhaseSpaceState& f, std::uint64_t hash, int d, int n) {
  return {SnapshotKind::PhaseState, hash, d, n, f.x, f.v, f.t, f.f};
}

Snapshot to_snapshot(const PotentialField& phi, double t, std::uint64_t hash, int d, int n) {
  Snapshot s{SnapshotKind::Potential, hash, d, n, phi.grid, Grid1D{0.0, 1.0, 2}, t, {}};
  s.data.reserve(2 * phi.values.size());
  for (std::size_t i = 0; i < phi.values.size(); ++i) {
    s.data.push_back(phi.values[i]);
    s.data.push_back(phi.gradient[i]);
  }
  return s;
}

PhaseSpaceState to_state(const Snapshot& s) {
  require(s.kind == SnapshotKind::PhaseState, ErrorKind::InvalidInput, "snapshot is not a phase-space state");
  PhaseSpaceState f(s.x, s.v);
  f.f = s.data;
  f.t = s.t;
  return f;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

CsvWriter::CsvWriter(const std::string& path, const std::string& hash_hex,
                     const std::vector<std::string>& columns)
    : path_(path), out_(std::make_shared<std::ofstream>(path)), columns_(columns.size()) {
  require(static_cast<bool>(*out_), ErrorKind::Io, "cannot write " + path);
  *out_ << "# config_hash=" << hash_hex << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) *out_ << (i ? "," : "") << columns[i];
  *out_ << "\n";
}

CsvWriter& CsvWriter::operator<<(double x) { return *this << format_double(x); }

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  require(filled_ < columns_, ErrorKind::InvalidInput, "too many CSV fields in " + path_);
  *out_ << (filled_ ? "," : "");
  if (s.find_first_of(",\"\n") == std::string::npos) {
    *out_ << s;
  } else {
    *out_ << '"';
    for (char c : s) *out_ << (c == '"' ? "\"\"" : std::string(1, c));
    *out_ << '"';
  }
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  require(filled_ == columns_, ErrorKind::InvalidInput, "incomplete CSV row in " + path_);
  *out_ << "\n";
  filled_ = 0;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorKind::Io, "cannot write " + path);
  os << text;
  require(static_cast<bool>(os), ErrorKind::Io, "failed writing " + path);
}

}  // namespace vwlab
