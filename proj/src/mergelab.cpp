#include "fgt/mergelab.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fgt/error.hpp"
#include "fgt/kernels.hpp"

namespace fgt {

namespace {

constexpr char kMagic[8] = {'F', 'G', 'T', 'P', 'A', 'R', 'A', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr std::string_view kTextHeader = "# fgt-params v1";

template <typename T>
void put_le(std::ostream& out, T v) {
  std::array<char, sizeof(T)> buf;
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
  out.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf;
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw FormatError("truncated parameter file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

ParamMap map_entries(const ParamMap& a, const ParamMap& b,
                     const std::function<void(const std::string&, const ParamEntry&, const ParamEntry&, ParamEntry&)>& fn) {
  a.require_mergeable(b);
  ParamMap out;
  for (const auto& [name, ea] : a.entries) {
    const ParamEntry& eb = b.entries.at(name);
    ParamEntry r;
    r.shape = ea.shape;
    r.values.resize(ea.values.size());
    fn(name, ea, eb, r);
    out.entries.emplace(name, std::move(r));
  }
  return out;
}

}  // namespace

std::size_t ParamEntry::numel() const noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void ParamMap::require_mergeable(const ParamMap& other) const {
  for (const auto& [name, e] : entries) {
    const auto it = other.entries.find(name);
    if (it == other.entries.end()) throw ShapeMismatch("entry '" + name + "' missing from second checkpoint");
    if (it->second.shape != e.shape || it->second.values.size() != e.values.size())
      throw ShapeMismatch("entry '" + name + "' has different shapes");
  }
  for (const auto& [name, e] : other.entries)
    if (!entries.count(name)) throw ShapeMismatch("entry '" + name + "' missing from first checkpoint");
}

MergeMethod parse_merge_method(const std::string& s) {
  if (s == "lerp") return MergeMethod::Lerp;
  if (s == "slerp") return MergeMethod::Slerp;
  throw ConfigError("unknown merge method '" + s + "'");
}

void MergeSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
}

ParamMap lerp(const ParamMap& a, const ParamMap& b, double alpha) {
  return map_entries(a, b, [alpha](const std::string&, const ParamEntry& ea, const ParamEntry& eb, ParamEntry& r) {
    kernels::par::lerp(ea.values, eb.values, alpha, r.values);
  });
}

ParamMap slerp(const ParamMap& a, const ParamMap& b, double alpha) {
  return map_entries(a, b, [alpha](const std::string& name, const ParamEntry& ea, const ParamEntry& eb, ParamEntry& r) {
    const kernels::Gram g = kernels::par::gram(ea.values, eb.values);
    if (g.aa == 0.0 || g.bb == 0.0) throw ZeroVector("entry '" + name + "' is an all-zero vector");
    const double cosine = std::clamp(g.ab / std::sqrt(g.aa * g.bb), -1.0, 1.0);
    const double omega = std::acos(cosine);
    if (omega < 1e-6) {
      kernels::par::lerp(ea.values, eb.values, alpha, r.values);
      return;
    }
    if (std::numbers::pi - omega < 1e-6) throw DegenerateAngle("entry '" + name + "' is antiparallel");
    const double s = std::sin(omega);
    kernels::par::combine(ea.values, eb.values, std::sin(alpha * omega) / s, std::sin((1.0 - alpha) * omega) / s,
                          r.values);
  });
}

ParamMap merge(const ParamMap& a, const ParamMap& b, const MergeSpec& spec) {
  spec.validate();
  return spec.method == MergeMethod::Lerp ? lerp(a, b, spec.alpha) : slerp(a, b, spec.alpha);
}

void write_params_binary(std::ostream& out, const ParamMap& params) {
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.entries.size()));
  for (const auto& [name, e] : params.entries) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.shape.size()));
    for (std::size_t d : e.shape) put_le<std::uint64_t>(out, d);
    for (double v : e.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
}

ParamMap read_params_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not an FGTPARAM file");
  if (get_le<std::uint32_t>(in) != kVersion) throw FormatError("unsupported FGTPARAM version");
  const auto count = get_le<std::uint32_t>(in);
  ParamMap out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get_le<std::uint32_t>(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw FormatError("truncated entry name");
    ParamEntry e;
    e.shape.resize(get_le<std::uint32_t>(in));
    for (auto& d : e.shape) d = static_cast<std::size_t>(get_le<std::uint64_t>(in));
    e.values.resize(e.numel());
    for (auto& v : e.values) v = std::bit_cast<float>(get_le<std::uint32_t>(in));
    if (!out.entries.emplace(std::move(name), std::move(e)).second) throw FormatError("duplicate entry name");
  }
  return out;
}

void write_params_text(std::ostream& out, const ParamMap& params) {
  out << kTextHeader << '\n';
  for (const auto& [name, e] : params.entries) {
    out << name << ' ';
    for (std::size_t i = 0; i < e.shape.size(); ++i) out << (i ? "x" : "") << e.shape[i];
    out << std::setprecision(17);
    for (double v : e.values) out << ' ' << v;
    out << '\n';
  }
}

ParamMap read_params_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kTextHeader, 0) != 0) throw FormatError("missing fgt-params header");
  ParamMap out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string name, shape;
    if (!(ss >> name >> shape)) throw FormatError("line " + std::to_string(lineno) + ": expected name and shape");
    ParamEntry e;
    std::istringstream dims(shape);
    for (std::string d; std::getline(dims, d, 'x');) e.shape.push_back(std::stoull(d));
    for (double v; ss >> v;) e.values.push_back(v);
    if (!ss.eof()) throw FormatError("line " + std::to_string(lineno) + ": bad value");
    if (e.values.size() != e.numel())
      throw FormatError("line " + std::to_string(lineno) + ": value count does not match shape " + shape);
    if (!out.entries.emplace(name, std::move(e)).second) throw FormatError("duplicate entry '" + name + "'");
  }
  return out;
}

ParamMap load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  char head[8] = {};
  in.read(head, sizeof(head));
  in.clear();
  in.seekg(0);
  if (std::memcmp(head, kMagic, sizeof(kMagic)) == 0) return read_params_binary(in);
  return read_params_text(in);
}

void save_params(const std::string& path, const ParamMap& params) {
  const bool text = path.size() >= 4 && path.compare(path.size() - 4, 4, ".txt") == 0;
  std::ofstream out(path, text ? std::ios::out : std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  if (text) write_params_text(out, params);
  else write_params_binary(out, params);
}

}  // namespace fgt
