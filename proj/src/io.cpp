#include "umbir/io.hpp"

#include "umbir/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace umbir {
namespace {

namespace fs = std::filesystem;

class Writer {
public:
  template <typename T> void put(T v) {
    const auto *p = reinterpret_cast<const char *>(&v);
    buf_.append(p, sizeof(T));
  }
  void tag(const char (&magic)[5]) { buf_.append(magic, 4); }
  void floats(const std::vector<double> &v) {
    for (double d : v) {
      put(static_cast<float>(d));
    }
  }
  void floats(std::span<const float> v) {
    buf_.append(reinterpret_cast<const char *>(v.data()),
                v.size() * sizeof(float));
  }
  // Appends the CRC of everything written since the previous checksum.
  void checksum() {
    const auto crc = crc32(0L, reinterpret_cast<const Bytef *>(buf_.data() + mark_),
                           static_cast<uInt>(buf_.size() - mark_));
    put(static_cast<std::uint32_t>(crc));
    mark_ = buf_.size();
  }
  [[nodiscard]] const std::string &bytes() const { return buf_; }

private:
  std::string buf_;
  std::size_t mark_{0};
};

class Reader {
public:
  Reader(std::string bytes, std::string name)
      : buf_(std::move(bytes)), name_(std::move(name)) {}

  template <typename T> T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void expect_tag(const char (&magic)[5]) {
    need(4);
    if (buf_.compare(pos_, 4, magic, 4) != 0) {
      throw DataError(name_ + ": not a " + std::string(magic) + " file");
    }
    pos_ += 4;
    if (get<std::uint32_t>() != kFormatVersion) {
      throw DataError(name_ + ": unsupported format version");
    }
  }
  std::vector<double> floats(std::size_t n) {
    need(n * sizeof(float));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      float f;
      std::memcpy(&f, buf_.data() + pos_ + i * sizeof(float), sizeof(float));
      out[i] = f;
    }
    pos_ += n * sizeof(float);
    return out;
  }
  void floats_into(std::span<float> out) {
    need(out.size() * sizeof(float));
    std::memcpy(out.data(), buf_.data() + pos_, out.size() * sizeof(float));
    pos_ += out.size() * sizeof(float);
  }
  void checksum(const char *what) {
    const auto crc = crc32(0L, reinterpret_cast<const Bytef *>(buf_.data() + mark_),
                           static_cast<uInt>(pos_ - mark_));
    if (get<std::uint32_t>() != static_cast<std::uint32_t>(crc)) {
      throw DataError(name_ + ": " + what + " checksum mismatch");
    }
    mark_ = pos_;
  }
  void finish() const {
    if (pos_ != buf_.size()) {
      throw DataError(name_ + ": trailing bytes after payload");
    }
  }

private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) {
      throw DataError(name_ + ": file is truncated");
    }
  }

  std::string buf_;
  std::string name_;
  std::size_t pos_{0};
  std::size_t mark_{0};
};

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes_atomic(const fs::path &path, const std::string &bytes) {
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("cannot write " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw DataError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot move output into place at " + path.string());
  }
}

std::uint32_t narrow(std::size_t v, const char *what) {
  if (v > 0xffffffffULL) {
    throw DataError(std::string(what) + " exceeds the 32-bit format limit");
  }
  return static_cast<std::uint32_t>(v);
}

void put_pulse(Writer &w, const PulseSpec &p) {
  w.put(narrow(p.record_length, "record length"));
  w.put(p.sampling_frequency);
  w.put(p.record_start);
  w.put(p.center_frequency);
  w.put(p.duration);
  w.put(p.taper);
  w.put(p.amplitude);
}

PulseSpec get_pulse(Reader &r) {
  PulseSpec p;
  p.record_length = r.get<std::uint32_t>();
  p.sampling_frequency = r.get<double>();
  p.record_start = r.get<double>();
  p.center_frequency = r.get<double>();
  p.duration = r.get<double>();
  p.taper = r.get<double>();
  p.amplitude = r.get<double>();
  return p;
}

void put_matrix(Writer &w, const SparseColumns &m) {
  w.put(narrow(m.rows(), "matrix rows"));
  w.put(narrow(m.cols(), "matrix columns"));
  for (std::size_t c = 0; c < m.cols(); ++c) {
    w.put(narrow(m.last_run(c) - m.first_run(c), "run count"));
    for (std::size_t r = m.first_run(c); r < m.last_run(c); ++r) {
      w.put(m.run(r).row);
      w.put(m.run(r).length);
    }
  }
  for (std::size_t r = 0; r < m.run_count(); ++r) {
    w.floats(m.run_values(r));
  }
}

std::shared_ptr<const SparseColumns> get_matrix(Reader &r) {
  const std::size_t rows = r.get<std::uint32_t>();
  const std::size_t cols = r.get<std::uint32_t>();
  std::vector<std::size_t> begin(cols + 1, 0);
  std::vector<SparseColumns::Run> runs;
  for (std::size_t c = 0; c < cols; ++c) {
    const std::size_t n = r.get<std::uint32_t>();
    for (std::size_t i = 0; i < n; ++i) {
      SparseColumns::Run run;
      run.row = r.get<std::uint32_t>();
      run.length = r.get<std::uint32_t>();
      runs.push_back(run);
    }
    begin[c + 1] = runs.size();
  }
  auto m = std::make_shared<SparseColumns>(rows, cols, std::move(begin),
                                           std::move(runs));
  for (std::size_t i = 0; i < m->run_count(); ++i) {
    r.floats_into(m->run_values(i));
  }
  return m;
}

} // namespace

void write_text_atomic(const fs::path &path, const std::string &contents) {
  write_bytes_atomic(path, contents);
}

void write_measurements(const fs::path &path, const MeasurementSet &set) {
  if (set.traces.size() != set.pulses.size()) {
    throw DataError("measurement set has mismatched pulse and trace counts");
  }
  Writer w;
  w.tag("UMBM");
  w.put(kFormatVersion);
  w.put(narrow(set.pulses.size(), "frequency count"));
  w.put(narrow(set.receivers, "receiver count"));
  for (std::size_t s = 0; s < set.pulses.size(); ++s) {
    put_pulse(w, set.pulses[s]);
    w.put(s < set.noise_sigma.size() ? set.noise_sigma[s] : 0.0);
  }
  w.checksum();
  for (std::size_t s = 0; s < set.traces.size(); ++s) {
    if (set.traces[s].size() != set.receivers * set.pulses[s].record_length) {
      throw DataError("trace block " + std::to_string(s) + " has the wrong length");
    }
    w.floats(set.traces[s]);
  }
  w.checksum();
  write_bytes_atomic(path, w.bytes());
}

MeasurementSet read_measurements(const fs::path &path) {
  Reader r(slurp(path), path.string());
  r.expect_tag("UMBM");
  MeasurementSet set;
  const std::size_t s = r.get<std::uint32_t>();
  set.receivers = r.get<std::uint32_t>();
  for (std::size_t i = 0; i < s; ++i) {
    set.pulses.push_back(get_pulse(r));
    set.noise_sigma.push_back(r.get<double>());
  }
  r.checksum("header");
  for (std::size_t i = 0; i < s; ++i) {
    set.traces.push_back(r.floats(set.receivers * set.pulses[i].record_length));
  }
  r.checksum("payload");
  r.finish();
  return set;
}

void write_image(const fs::path &path, const Image &image) {
  if (image.data.size() != image.grid.size()) {
    throw DataError("image raster does not match its grid");
  }
  Writer w;
  w.tag("UMBI");
  w.put(kFormatVersion);
  w.put(narrow(image.grid.rows, "rows"));
  w.put(narrow(image.grid.cols, "cols"));
  w.put(image.grid.pitch);
  w.put(image.grid.origin.depth);
  w.put(image.grid.origin.height);
  w.checksum();
  w.floats(image.data);
  w.checksum();
  write_bytes_atomic(path, w.bytes());
}

Image read_image(const fs::path &path) {
  Reader r(slurp(path), path.string());
  r.expect_tag("UMBI");
  Image img;
  img.grid.rows = r.get<std::uint32_t>();
  img.grid.cols = r.get<std::uint32_t>();
  img.grid.pitch = r.get<double>();
  img.grid.origin.depth = r.get<double>();
  img.grid.origin.height = r.get<double>();
  r.checksum("header");
  img.grid.validate();
  img.data = r.floats(img.grid.size());
  r.checksum("payload");
  r.finish();
  return img;
}

void write_system_cache(
    const fs::path &path,
    const std::vector<std::shared_ptr<const SparseSystem>> &systems) {
  if (systems.empty()) {
    throw DataError("no systems to cache");
  }
  Writer w;
  w.tag("UMBR");
  w.put(kFormatVersion);
  w.put(narrow(systems.size(), "frequency count"));
  w.put(narrow(systems.front()->receivers, "receiver count"));
  w.put(narrow(systems.front()->voxels, "voxel count"));
  for (const auto &sys : systems) {
    put_pulse(w, sys->pulse);
    w.put(sys->window);
  }
  w.checksum();
  for (const auto &sys : systems) {
    put_matrix(w, *sys->A);
    put_matrix(w, *sys->D);
  }
  w.checksum();
  write_bytes_atomic(path, w.bytes());
}

std::vector<std::shared_ptr<const SparseSystem>>
read_system_cache(const fs::path &path) {
  Reader r(slurp(path), path.string());
  r.expect_tag("UMBR");
  const std::size_t s = r.get<std::uint32_t>();
  const std::size_t k = r.get<std::uint32_t>();
  const std::size_t n = r.get<std::uint32_t>();
  std::vector<SparseSystem> systems(s);
  for (auto &sys : systems) {
    sys.pulse = get_pulse(r);
    sys.window = r.get<double>();
    sys.samples = sys.pulse.record_length;
    sys.receivers = k;
    sys.voxels = n;
  }
  r.checksum("header");
  std::vector<std::shared_ptr<const SparseSystem>> out;
  for (auto &sys : systems) {
    sys.A = get_matrix(r);
    sys.D = get_matrix(r);
    if (sys.A->cols() != n || sys.A->rows() != sys.rows() ||
        sys.D->cols() != k || sys.D->rows() != sys.rows()) {
      throw DataError(path.string() + ": matrix shapes disagree with header");
    }
    sys.stats = sparsity(*sys.A);
    out.push_back(std::make_shared<const SparseSystem>(std::move(sys)));
  }
  r.checksum("payload");
  r.finish();
  return out;
}

void write_pgm(const fs::path &path, const Image &image, bool magnitude) {
  const auto &g = image.grid;
  double lo = 0.0;
  double hi = 0.0;
  if (!image.data.empty()) {
    if (magnitude) {
      for (double v : image.data) {
        hi = std::max(hi, std::abs(v));
      }
    } else {
      const auto [mn, mx] =
          std::minmax_element(image.data.begin(), image.data.end());
      lo = *mn;
      hi = *mx;
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::string out = "P5\n" + std::to_string(g.cols) + " " +
                    std::to_string(g.rows) + "\n255\n";
  for (std::size_t rr = g.rows; rr-- > 0;) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      const double v = image.data[g.index(rr, c)];
      const double x = ((magnitude ? std::abs(v) : v) - lo) / span;
      out.push_back(static_cast<char>(
          static_cast<unsigned char>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0))));
    }
  }
  write_bytes_atomic(path, out);
}

} // namespace umbir
