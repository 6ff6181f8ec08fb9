#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cdti {

enum class Tri : std::uint8_t { Up = 0, Down = 1 };

/// One triangulated annulus between consecutive time slices, stored as the
/// cyclic up/down sequence read from the root position. The root entry is
/// always Up, so there are exactly C(n_bottom + n_top - 1, n_bottom - 1)
/// distinct strips with given boundary edge counts.
class StripTriangulation {
 public:
  explicit StripTriangulation(std::vector<Tri> sequence);

  int n_bottom() const { return n_bottom_; }  // up triangles = lower slice edges
  int n_top() const { return n_top_; }        // down triangles = upper slice edges
  int size() const { return static_cast<int>(seq_.size()); }
  const std::vector<Tri>& sequence() const { return seq_; }

  /// Positions of up (resp. down) triangles in cyclic order from the root.
  std::vector<int> up_positions() const;
  std::vector<int> down_positions() const;

  bool operator==(const StripTriangulation& o) const { return seq_ == o.seq_; }

 private:
  std::vector<Tri> seq_;
  int n_bottom_ = 0;
  int n_top_ = 0;
};

/// Time-periodic sequence of compatible strips: the top slice of strip i is
/// the bottom slice of strip i+1 mod N.
class CausalTriangulation {
 public:
  explicit CausalTriangulation(std::vector<StripTriangulation> strips);

  int strip_count() const { return static_cast<int>(strips_.size()); }
  const StripTriangulation& strip(int i) const { return strips_[i]; }
  const std::vector<StripTriangulation>& strips() const { return strips_; }

  int slice_size(int i) const;        // n^i, index taken mod N
  int strip_triangles(int i) const;   // n^i + n^{i+1}
  int total_triangles() const;        // n(t)
  int max_slice_size() const;

  bool operator==(const CausalTriangulation& o) const { return strips_ == o.strips_; }

 private:
  std::vector<StripTriangulation> strips_;
};

inline constexpr int kDefaultEnumerationCap = 12;

/// Number of rooted strips with the given boundary edge counts,
/// C(n_bottom + n_top - 1, n_bottom - 1), in exact integer arithmetic.
std::uint64_t count_strips(int n_bottom, int n_top);

/// All rooted strips with the given boundary counts, lexicographic in the
/// up/down sequence (Up < Down). Throws capacity_error above the cap.
std::vector<StripTriangulation> enumerate_strips(int n_bottom, int n_top,
                                                 int cap = kDefaultEnumerationCap);

/// Streams every time-periodic causal triangulation with strip_count strips
/// and all slice sizes <= max_slice, each exactly once, in lexicographic
/// order over (slice-size vector, per-strip sequences).
class TorusEnumerator {
 public:
  TorusEnumerator(int strip_count, int max_slice, int cap = kDefaultEnumerationCap);

  std::optional<CausalTriangulation> next();

 private:
  void reset_sequences_from(int strip);
  bool advance();

  int strip_count_;
  int max_slice_;
  std::vector<int> slice_;
  std::vector<std::vector<Tri>> seqs_;
  bool done_ = false;
  bool fresh_ = true;
};

void for_each_torus_triangulation(int strip_count, int max_slice,
                                  const std::function<void(const CausalTriangulation&)>& fn);

/// Total stream length of TorusEnumerator(strip_count, max_slice), computed
/// from the per-strip counts without enumerating.
std::uint64_t count_torus_triangulations(int strip_count, int max_slice);

/// Canonical text form: first line "N K" (K = max slice size), then one line
/// of U/D characters per strip starting at the root.
std::string to_text(const CausalTriangulation& t);
CausalTriangulation causal_from_text(const std::string& text);

}  // namespace cdti
