#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fgt {

struct ParamEntry {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t numel() const noexcept;
  friend bool operator==(const ParamEntry&, const ParamEntry&) = default;
};

/// Named parameter tensors of one checkpoint, flattened row-major.
struct ParamMap {
  std::map<std::string, ParamEntry> entries;

  /// Throws ShapeMismatch naming the first entry that differs.
  void require_mergeable(const ParamMap& other) const;
  friend bool operator==(const ParamMap&, const ParamMap&) = default;
};

enum class MergeMethod : std::uint8_t { Lerp, Slerp };

MergeMethod parse_merge_method(const std::string& s);

/// `alpha` weights the first (pre-training) checkpoint:
/// theta(alpha) = alpha * theta_pre + (1 - alpha) * theta_post.
struct MergeSpec {
  MergeMethod method = MergeMethod::Lerp;
  double alpha = 0.5;
  void validate() const;
};

ParamMap lerp(const ParamMap& a, const ParamMap& b, double alpha);

/// Per-entry spherical interpolation with the same alpha convention as lerp:
///   (sin(alpha * W) * a + sin((1 - alpha) * W) * b) / sin W,
/// W the angle between the flattened entries. Entries closer than 1e-6 rad
/// are linearly interpolated. Throws ZeroVector for an all-zero entry and
/// DegenerateAngle for (anti)parallel entries within 1e-6 rad of pi.
ParamMap slerp(const ParamMap& a, const ParamMap& b, double alpha);

ParamMap merge(const ParamMap& a, const ParamMap& b, const MergeSpec& spec);

// Binary container (little-endian):
//   "FGTPARAM"  u32 version=1  u32 entry_count
//   per entry:  u32 name_len  name bytes  u32 ndim  u64 dims[ndim]  f32 values[prod(dims)]
// Text container, one entry per line after a "# fgt-params v1" header:
//   <name> <d0>x<d1>x... <v0> <v1> ...
void write_params_binary(std::ostream& out, const ParamMap& params);
ParamMap read_params_binary(std::istream& in);
void write_params_text(std::ostream& out, const ParamMap& params);
ParamMap read_params_text(std::istream& in);

/// Detects the container from its first bytes.
ParamMap load_params(const std::string& path);
/// Text when `path` ends in ".txt", binary otherwise.
void save_params(const std::string& path, const ParamMap& params);

}  // namespace fgt
