#include "polymoments/signature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymoments/errors.hpp"

namespace polymoments {

namespace {

std::size_t ipow(int d, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= static_cast<std::size_t>(d);
  return r;
}

void require_same_shape(const TruncatedTensor& u, const TruncatedTensor& v) {
  if (u.alphabet_size() != v.alphabet_size() || u.depth() != v.depth())
    throw DimensionMismatch("truncated tensors have different (d, N)");
}

}  // namespace

TruncatedTensor::TruncatedTensor(int d, int depth) : d_(d), depth_(depth) {
  if (d < 1) throw std::invalid_argument("tensor alphabet size must be >= 1");
  if (depth < 0) throw std::invalid_argument("tensor truncation depth must be >= 0");
  levels_.resize(static_cast<std::size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) levels_[static_cast<std::size_t>(n)].assign(ipow(d, n), 0.0);
}

TruncatedTensor TruncatedTensor::unit(int d, int depth) {
  TruncatedTensor t(d, depth);
  t.levels_[0][0] = 1.0;
  return t;
}

TruncatedTensor TruncatedTensor::word(int d, int depth, const Word& w) {
  TruncatedTensor t(d, depth);
  t[w] = 1.0;
  return t;
}

std::size_t word_index(const Word& w, int d) {
  std::size_t idx = 0;
  for (int letter : w) {
    if (letter < 1 || letter > d) throw std::invalid_argument("word letter outside alphabet");
    idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(letter - 1);
  }
  return idx;
}

Word word_from_index(std::size_t index, int length, int d) {
  Word w(static_cast<std::size_t>(length));
  for (int j = length - 1; j >= 0; --j) {
    w[static_cast<std::size_t>(j)] = static_cast<int>(index % static_cast<std::size_t>(d)) + 1;
    index /= static_cast<std::size_t>(d);
  }
  return w;
}

std::string word_label(const Word& w) {
  std::string s;
  for (int letter : w) {
    if (letter < 1 || letter > 9) throw std::invalid_argument("word labels need letters in 1..9");
    s.push_back(static_cast<char>('0' + letter));
  }
  return s;
}

double& TruncatedTensor::operator[](const Word& w) {
  if (static_cast<int>(w.size()) > depth_) throw std::invalid_argument("word longer than truncation depth");
  return levels_[w.size()][word_index(w, d_)];
}

double TruncatedTensor::operator[](const Word& w) const {
  if (static_cast<int>(w.size()) > depth_) throw std::invalid_argument("word longer than truncation depth");
  return levels_[w.size()][word_index(w, d_)];
}

double TruncatedTensor::max_abs_difference(const TruncatedTensor& other) const {
  require_same_shape(*this, other);
  double m = 0.0;
  for (std::size_t n = 0; n < levels_.size(); ++n)
    for (std::size_t i = 0; i < levels_[n].size(); ++i)
      m = std::max(m, std::abs(levels_[n][i] - other.levels_[n][i]));
  return m;
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& other) {
  require_same_shape(*this, other);
  for (std::size_t n = 0; n < levels_.size(); ++n)
    for (std::size_t i = 0; i < levels_[n].size(); ++i) levels_[n][i] += other.levels_[n][i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double s) {
  for (auto& lvl : levels_)
    for (double& x : lvl) x *= s;
  return *this;
}

TruncatedTensor tensor_product(const TruncatedTensor& u, const TruncatedTensor& v) {
  require_same_shape(u, v);
  const int d = u.alphabet_size();
  const int depth = u.depth();
  TruncatedTensor out(d, depth);
  for (int n = 0; n <= depth; ++n) {
    auto dst = out.level(n);
    for (int a = 0; a <= n; ++a) {
      const auto left = u.level(a);
      const auto right = v.level(n - a);
      // word(left) ++ word(right) has flat index i * d^(n-a) + j
      for (std::size_t i = 0; i < left.size(); ++i) {
        const double li = left[i];
        if (li == 0.0) continue;
        double* block = dst.data() + i * right.size();
        for (std::size_t j = 0; j < right.size(); ++j) block[j] += li * right[j];
      }
    }
  }
  return out;
}

TruncatedTensor tensor_exp(std::span<const double> v, int d, int depth) {
  if (static_cast<int>(v.size()) != d) throw DimensionMismatch("tensor_exp: vector length must equal d");
  TruncatedTensor out = TruncatedTensor::unit(d, depth);
  for (int n = 1; n <= depth; ++n) {
    const auto prev = out.level(n - 1);
    auto cur = out.level(n);
    for (std::size_t i = 0; i < prev.size(); ++i)
      for (int j = 0; j < d; ++j)
        cur[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
            prev[i] * v[static_cast<std::size_t>(j)] / n;
  }
  return out;
}

void multiply_by_segment_exp(TruncatedTensor& s, std::span<const double> v) {
  const int d = s.alphabet_size();
  if (static_cast<int>(v.size()) != d) throw DimensionMismatch("segment increment length must equal d");
  // (s exp(v))_n = sum_j s_{n-j} v^j / j!, evaluated Horner-style:
  //   acc = s_0 v / n;  acc = (acc + s_m) v / (n - m) for m = 1..n-1;  result = acc + s_n
  // Levels are processed top-down so lower levels are still the old values.
  std::vector<double> acc;
  std::vector<double> next;
  for (int n = s.depth(); n >= 1; --n) {
    acc.assign(1, s.level(0)[0]);
    for (int m = 0; m < n; ++m) {
      // acc has size d^m; multiply by v / (n - m) into size d^(m+1)
      next.resize(acc.size() * static_cast<std::size_t>(d));
      const double scale = 1.0 / (n - m);
      for (std::size_t i = 0; i < acc.size(); ++i) {
        const double ai = acc[i] * scale;
        for (int j = 0; j < d; ++j) next[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
            ai * v[static_cast<std::size_t>(j)];
      }
      acc.swap(next);
      if (m + 1 < n) {
        const auto lvl = s.level(m + 1);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += lvl[i];
      }
    }
    auto dst = s.level(n);
    for (std::size_t i = 0; i < acc.size(); ++i) dst[i] += acc[i];
  }
}

TruncatedTensor chen_signature(const std::vector<std::vector<double>>& path, int depth) {
  if (path.size() < 2) throw std::invalid_argument("chen_signature: need at least two points");
  const auto d = path.front().size();
  if (d == 0) throw DimensionMismatch("chen_signature: points must be non-empty");
  TruncatedTensor s = TruncatedTensor::unit(static_cast<int>(d), depth);
  std::vector<double> inc(d);
  for (std::size_t p = 1; p < path.size(); ++p) {
    if (path[p].size() != d) throw DimensionMismatch("chen_signature: points have different dimensions");
    for (std::size_t i = 0; i < d; ++i) inc[i] = path[p][i] - path[p - 1][i];
    multiply_by_segment_exp(s, inc);
  }
  return s;
}

TruncatedTensor expected_signature_bm(int d, int depth, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("expected_signature_bm: t must be >= 0");
  TruncatedTensor out = TruncatedTensor::unit(d, depth);
  // level 2k is (t/2)^k / k! times the indicator of words (j1 j1 j2 j2 ... jk jk)
  double factor = 1.0;
  for (int k = 1; 2 * k <= depth; ++k) {
    factor *= (t / 2.0) / k;
    auto lvl = out.level(2 * k);
    for (std::size_t idx = 0; idx < lvl.size(); ++idx) {
      const Word w = word_from_index(idx, 2 * k, d);
      bool paired = true;
      for (std::size_t j = 0; j < w.size(); j += 2) paired = paired && w[j] == w[j + 1];
      lvl[idx] = paired ? factor : 0.0;
    }
  }
  return out;
}

TruncatedTensor dual_L1_apply(const TruncatedTensor& a) {
  const int d = a.alphabet_size();
  TruncatedTensor out(d, a.depth());
  const auto dd = static_cast<std::size_t>(d);
  for (int n = 2; n <= a.depth(); ++n) {
    const auto src = a.level(n);
    auto dst = out.level(n - 2);
    // word (prefix, i, i) has flat index prefix * d^2 + i * d + i
    for (std::size_t prefix = 0; prefix < dst.size(); ++prefix) {
      double sum = 0.0;
      for (std::size_t i = 0; i < dd; ++i) sum += src[prefix * dd * dd + i * dd + i];
      dst[prefix] += 0.5 * sum;
    }
  }
  return out;
}

TruncatedTensor expm_L1(const TruncatedTensor& a, double t) {
  TruncatedTensor out = a;
  TruncatedTensor power = a;
  double coeff = 1.0;
  for (int l = 1; 2 * l <= a.depth(); ++l) {
    power = dual_L1_apply(power);
    coeff *= t / l;
    TruncatedTensor term = power;
    term *= coeff;
    out += term;
  }
  return out;
}

double expected_word_coefficient(const Word& w, double t, int d, int depth) {
  if (static_cast<int>(w.size()) > depth) throw std::invalid_argument("word longer than truncation depth");
  // pairing with S(B)_{0,0} = unit keeps only the empty-word coefficient
  return expm_L1(TruncatedTensor::word(d, depth, w), t).level(0)[0];
}

}  // namespace polymoments
