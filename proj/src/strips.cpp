#include "cdti/strips.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "cdti/errors.hpp"
#include "cdti/numeric.hpp"

namespace cdti {

StripTriangulation::StripTriangulation(std::vector<Tri> sequence) : seq_(std::move(sequence)) {
  if (seq_.size() < 2) throw std::invalid_argument("strip needs at least one up and one down triangle");
  if (seq_.front() != Tri::Up) throw std::invalid_argument("strip root must hold an up triangle");
  for (Tri t : seq_) {
    if (t == Tri::Up)
      ++n_bottom_;
    else
      ++n_top_;
  }
  if (n_bottom_ < 1 || n_top_ < 1)
    throw std::invalid_argument("strip needs at least one up and one down triangle");
}

std::vector<int> StripTriangulation::up_positions() const {
  std::vector<int> ps;
  ps.reserve(n_bottom_);
  for (int i = 0; i < size(); ++i)
    if (seq_[i] == Tri::Up) ps.push_back(i);
  return ps;
}

std::vector<int> StripTriangulation::down_positions() const {
  std::vector<int> ps;
  ps.reserve(n_top_);
  for (int i = 0; i < size(); ++i)
    if (seq_[i] == Tri::Down) ps.push_back(i);
  return ps;
}

CausalTriangulation::CausalTriangulation(std::vector<StripTriangulation> strips)
    : strips_(std::move(strips)) {
  if (strips_.empty()) throw std::invalid_argument("causal triangulation needs at least one strip");
  const int n = static_cast<int>(strips_.size());
  for (int i = 0; i < n; ++i) {
    const StripTriangulation& cur = strips_[i];
    const StripTriangulation& nxt = strips_[(i + 1) % n];
    if (cur.n_top() != nxt.n_bottom())
      throw std::invalid_argument("incompatible strips: n_top(" + std::to_string(i) +
                                  ") != n_bottom(" + std::to_string((i + 1) % n) + ")");
  }
}

int CausalTriangulation::slice_size(int i) const {
  const int n = strip_count();
  return strips_[((i % n) + n) % n].n_bottom();
}

int CausalTriangulation::strip_triangles(int i) const { return strips_[i].size(); }

int CausalTriangulation::total_triangles() const {
  int total = 0;
  for (const auto& s : strips_) total += s.size();
  return total;
}

int CausalTriangulation::max_slice_size() const {
  int k = 0;
  for (const auto& s : strips_) k = std::max(k, s.n_bottom());
  return k;
}

std::uint64_t count_strips(int n_bottom, int n_top) {
  if (n_bottom < 1 || n_top < 1) throw std::invalid_argument("boundary edge counts must be >= 1");
  return binomial_exact(n_bottom + n_top - 1, n_bottom - 1);
}

namespace {

// Canonical least sequence for given counts: root Up, then remaining ups,
// then downs. next_permutation over the suffix walks all rooted strips in
// lexicographic order.
std::vector<Tri> canonical_sequence(int n_bottom, int n_top) {
  std::vector<Tri> seq(n_bottom + n_top, Tri::Up);
  std::fill(seq.begin() + n_bottom, seq.end(), Tri::Down);
  return seq;
}

}  // namespace

std::vector<StripTriangulation> enumerate_strips(int n_bottom, int n_top, int cap) {
  if (n_bottom < 1 || n_top < 1) throw std::invalid_argument("boundary edge counts must be >= 1");
  if (n_bottom > cap || n_top > cap)
    throw capacity_error("enumerate_strips: boundary count exceeds cap " + std::to_string(cap));
  std::vector<StripTriangulation> out;
  out.reserve(count_strips(n_bottom, n_top));
  std::vector<Tri> seq = canonical_sequence(n_bottom, n_top);
  do {
    out.emplace_back(seq);
  } while (std::next_permutation(seq.begin() + 1, seq.end()));
  return out;
}

TorusEnumerator::TorusEnumerator(int strip_count, int max_slice, int cap)
    : strip_count_(strip_count), max_slice_(max_slice) {
  if (strip_count < 1 || max_slice < 1)
    throw std::invalid_argument("need strip_count >= 1 and max_slice >= 1");
  if (strip_count > cap || max_slice > cap)
    throw capacity_error("torus enumeration: strip count or slice bound exceeds cap " +
                         std::to_string(cap));
  slice_.assign(strip_count_, 1);
  seqs_.resize(strip_count_);
  reset_sequences_from(0);
}

void TorusEnumerator::reset_sequences_from(int strip) {
  for (int i = strip; i < strip_count_; ++i)
    seqs_[i] = canonical_sequence(slice_[i], slice_[(i + 1) % strip_count_]);
}

bool TorusEnumerator::advance() {
  // Per-strip sequences are the minor odometer digits, last strip fastest.
  for (int i = strip_count_ - 1; i >= 0; --i) {
    if (std::next_permutation(seqs_[i].begin() + 1, seqs_[i].end())) return true;
    // wrapped back to the canonical sequence; carry into the previous strip
  }
  // All sequences wrapped: advance the slice-size vector, last index fastest.
  for (int i = strip_count_ - 1; i >= 0; --i) {
    if (slice_[i] < max_slice_) {
      ++slice_[i];
      std::fill(slice_.begin() + i + 1, slice_.end(), 1);
      reset_sequences_from(0);
      return true;
    }
  }
  return false;
}

std::optional<CausalTriangulation> TorusEnumerator::next() {
  if (done_) return std::nullopt;
  if (!fresh_ && !advance()) {
    done_ = true;
    return std::nullopt;
  }
  fresh_ = false;
  std::vector<StripTriangulation> strips;
  strips.reserve(strip_count_);
  for (const auto& s : seqs_) strips.emplace_back(s);
  return CausalTriangulation(std::move(strips));
}

void for_each_torus_triangulation(int strip_count, int max_slice,
                                  const std::function<void(const CausalTriangulation&)>& fn) {
  TorusEnumerator en(strip_count, max_slice);
  while (auto t = en.next()) fn(*t);
}

std::uint64_t count_torus_triangulations(int strip_count, int max_slice) {
  std::vector<int> slice(strip_count, 1);
  std::uint64_t total = 0;
  for (;;) {
    std::uint64_t prod = 1;
    for (int i = 0; i < strip_count; ++i)
      prod *= count_strips(slice[i], slice[(i + 1) % strip_count]);
    total += prod;
    int i = strip_count - 1;
    for (; i >= 0; --i) {
      if (slice[i] < max_slice) {
        ++slice[i];
        std::fill(slice.begin() + i + 1, slice.end(), 1);
        break;
      }
    }
    if (i < 0) break;
  }
  return total;
}

std::string to_text(const CausalTriangulation& t) {
  std::ostringstream os;
  os << t.strip_count() << ' ' << t.max_slice_size() << '\n';
  for (int i = 0; i < t.strip_count(); ++i) {
    for (Tri x : t.strip(i).sequence()) os << (x == Tri::Up ? 'U' : 'D');
    os << '\n';
  }
  return os.str();
}

CausalTriangulation causal_from_text(const std::string& text) {
  std::istringstream is(text);
  int n = 0, k = 0;
  if (!(is >> n >> k)) throw std::invalid_argument("bad header line, expected \"N K\"");
  std::vector<StripTriangulation> strips;
  strips.reserve(n);
  std::string line;
  std::getline(is, line);  // rest of header
  for (int i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw std::invalid_argument("missing strip line " + std::to_string(i));
    std::vector<Tri> seq;
    seq.reserve(line.size());
    for (char c : line) {
      if (c == 'U')
        seq.push_back(Tri::Up);
      else if (c == 'D')
        seq.push_back(Tri::Down);
      else if (c == '\r')
        continue;
      else
        throw std::invalid_argument("bad strip character: " + std::string(1, c));
    }
    strips.emplace_back(std::move(seq));
  }
  CausalTriangulation t(std::move(strips));
  if (t.max_slice_size() > k)
    throw std::invalid_argument("header slice bound smaller than actual max slice");
  return t;
}

}  // namespace cdti
