#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace polymoments {

/// Word over the alphabet {1, ..., d}.
using Word = std::vector<int>;

/// Element of the truncated tensor algebra T^N(R^d) with the non-commutative
/// concatenation product. Level n is a dense array of d^n coefficients; word
/// (i_1, ..., i_n) sits at flat index sum_j (i_j - 1) d^(n - j).
class TruncatedTensor {
 public:
  TruncatedTensor(int d, int depth);
  /// 1 at level 0, zero elsewhere.
  static TruncatedTensor unit(int d, int depth);
  /// The basis element e_{i_1} (x) ... (x) e_{i_n}.
  static TruncatedTensor word(int d, int depth, const Word& w);

  int alphabet_size() const { return d_; }
  int depth() const { return depth_; }

  std::span<double> level(int n) { return levels_.at(static_cast<std::size_t>(n)); }
  std::span<const double> level(int n) const { return levels_.at(static_cast<std::size_t>(n)); }

  double& operator[](const Word& w);
  double operator[](const Word& w) const;

  /// Max absolute difference over all coefficients; shapes must agree.
  double max_abs_difference(const TruncatedTensor& other) const;

  TruncatedTensor& operator+=(const TruncatedTensor& other);
  TruncatedTensor& operator*=(double s);

  bool operator==(const TruncatedTensor& other) const = default;

 private:
  int d_;
  int depth_;
  std::vector<std::vector<double>> levels_;
};

std::size_t word_index(const Word& w, int d);
Word word_from_index(std::size_t index, int length, int d);
/// "1122" style label; requires d <= 9.
std::string word_label(const Word& w);

/// (uv)_n = sum_{a+b=n} u_a (x) v_b; levels above N are dropped.
TruncatedTensor tensor_product(const TruncatedTensor& u, const TruncatedTensor& v);

/// Level n = v^{(x)n} / n!.
TruncatedTensor tensor_exp(std::span<const double> v, int d, int depth);

/// In place s <- s (x) exp(v); the Chen update for one linear segment.
void multiply_by_segment_exp(TruncatedTensor& s, std::span<const double> v);

/// Signature of the piecewise-linear path through the given points.
TruncatedTensor chen_signature(const std::vector<std::vector<double>>& path, int depth);

/// E[S(B)_{0,t}] truncated at depth N: sum_k (t/2)^k / k! (sum_i e_i (x) e_i)^{(x)k}.
TruncatedTensor expected_signature_bm(int d, int depth, double t);

/// Dual generator of the Brownian signature acting on linear functionals:
/// e_{i_1..i_n} -> 1/2 [i_{n-1} = i_n] e_{i_1..i_{n-2}} for n >= 2, 0 otherwise.
TruncatedTensor dual_L1_apply(const TruncatedTensor& a);

/// exp(t L1) a; a finite sum since L1 lowers the level by two.
TruncatedTensor expm_L1(const TruncatedTensor& a, double t);

/// E<e_w, S(B)_{0,t}>, read off as the empty-word coefficient of exp(t L1) e_w.
double expected_word_coefficient(const Word& w, double t, int d, int depth);

}  // namespace polymoments
