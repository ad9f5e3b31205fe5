#include "gendet/nnet/tensor.h"

#include <algorithm>

#include "gendet/common/error.h"

namespace gendet::nnet {

std::string Shape::ToString() const {
  return "[" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) +
         "," + std::to_string(w) + "]";
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  Require(data_.size() == shape_.size(),
          "tensor data length does not match shape " + shape_.ToString());
}

void Tensor::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::Reshaped(Shape shape) const {
  Require(shape.size() == shape_.size(),
          "cannot reshape " + shape_.ToString() + " to " + shape.ToString());
  return Tensor(shape, data_);
}

void Gemm(Transpose trans_a, Transpose trans_b, int m, int n, int k, double alpha,
          const double* a, int lda, const double* b, int ldb, double beta, double* c,
          int ldc) {
  for (int i = 0; i < m; ++i) {
    double* row = c + static_cast<size_t>(i) * ldc;
    if (beta == 0.0) {
      std::fill(row, row + n, 0.0);
    } else if (beta != 1.0) {
      for (int j = 0; j < n; ++j) row[j] *= beta;
    }
  }
  if (m == 0 || n == 0 || k == 0) return;

  // op(B) is materialised row-major (k x n) so the inner loop runs over
  // contiguous memory in both B and C.
  std::vector<double> packed;
  const double* bk = b;
  int ldbk = ldb;
  if (trans_b == Transpose::kYes) {
    packed.resize(static_cast<size_t>(k) * n);
    for (int j = 0; j < n; ++j) {
      const double* src = b + static_cast<size_t>(j) * ldb;
      for (int p = 0; p < k; ++p) packed[static_cast<size_t>(p) * n + j] = src[p];
    }
    bk = packed.data();
    ldbk = n;
  }

  constexpr int kBlockK = 128;
  for (int p0 = 0; p0 < k; p0 += kBlockK) {
    const int p1 = std::min(k, p0 + kBlockK);
    for (int i = 0; i < m; ++i) {
      double* __restrict crow = c + static_cast<size_t>(i) * ldc;
      for (int p = p0; p < p1; ++p) {
        const double aip = alpha * (trans_a == Transpose::kNo
                                        ? a[static_cast<size_t>(i) * lda + p]
                                        : a[static_cast<size_t>(p) * lda + i]);
        if (aip == 0.0) continue;
        const double* __restrict brow = bk + static_cast<size_t>(p) * ldbk;
        for (int j = 0; j < n; ++j) crow[j] += aip * brow[j];
      }
    }
  }
}

}  // namespace gendet::nnet
