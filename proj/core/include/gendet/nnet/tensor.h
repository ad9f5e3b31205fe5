#ifndef GENDET_NNET_TENSOR_H_
#define GENDET_NNET_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gendet::nnet {

// NCHW shape. Fully-connected activations use h = w = 1.
struct Shape {
  int n = 0;
  int c = 0;
  int h = 1;
  int w = 1;

  size_t size() const { return static_cast<size_t>(n) * c * h * w; }
  size_t per_sample() const { return static_cast<size_t>(c) * h * w; }
  bool operator==(const Shape&) const = default;
  std::string ToString() const;
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0)
      : shape_(shape), data_(shape.size(), fill) {}
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  double* sample(int n) { return data_.data() + n * shape_.per_sample(); }
  const double* sample(int n) const { return data_.data() + n * shape_.per_sample(); }

  void Fill(double v);
  // Same data, new shape of equal size.
  Tensor Reshaped(Shape shape) const;

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

enum class Transpose { kNo, kYes };

// C = alpha * op(A) * op(B) + beta * C with row-major storage; op(A) is m x k
// and op(B) is k x n. Summation order is fixed, so results are reproducible.
void Gemm(Transpose trans_a, Transpose trans_b, int m, int n, int k, double alpha,
          const double* a, int lda, const double* b, int ldb, double beta, double* c,
          int ldc);

}  // namespace gendet::nnet

#endif  // GENDET_NNET_TENSOR_H_
