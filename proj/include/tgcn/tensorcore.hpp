/*
 * Copyright 2026 The TGCN Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Third-order tensor kernels: n-mode vector products, CP reconstruction and
// the relation-conditioned transform used by the encoder and the decoder.
//
// Index conventions for a core of dims (d_e, d_r, d_o):
//   mode 1 -> incoming entity (d_e), mode 2 -> relation (d_r), mode 3 -> output (d_o).
// In the CP layout W2 (n_b x d_e) binds mode 1, W1 (n_b x d_r) binds mode 2 and
// W3 (n_b x d_o) binds mode 3:  W[i,j,k] = sum_b W2[b,i] * W1[b,j] * W3[b,k].

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tgcn/common.hpp"

namespace tgcn {

using Index = Eigen::Index;

/// Dense third-order array, last index fastest.
template <typename Real>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(Index d0, Index d1, Index d2) : dims_{d0, d1, d2}, data_(Matrix<Real>::Zero(d0 * d1, d2)) {}

  Index dim(int mode) const { return dims_.at(static_cast<std::size_t>(mode)); }
  const std::array<Index, 3>& dims() const { return dims_; }
  Index size() const { return data_.size(); }

  Real& operator()(Index i, Index j, Index k) { return data_(i * dims_[1] + j, k); }
  Real operator()(Index i, Index j, Index k) const { return data_(i * dims_[1] + j, k); }

  /// (d0*d1) x d2 view; row i*d1 + j holds the mode-3 fiber at (i, j).
  Matrix<Real>& unfolded() { return data_; }
  const Matrix<Real>& unfolded() const { return data_; }

  void set_zero() { data_.setZero(); }

 private:
  std::array<Index, 3> dims_{0, 0, 0};
  Matrix<Real> data_;
};

enum class CoreLayout { kDense, kCp };

struct CoreDims {
  Index entity = 0;    // d_e
  Index relation = 0;  // d_r
  Index output = 0;    // d_o

  friend bool operator==(const CoreDims&, const CoreDims&) = default;
};

/// Relation-conditioning weight tensor, either dense or as CP factors.
template <typename Real>
struct CoreTensor {
  CoreLayout layout = CoreLayout::kDense;
  CoreDims dims;
  Index rank = 0;  // n_b, CP only

  Tensor3<Real> dense;  // d_e x d_r x d_o
  Matrix<Real> w1;      // n_b x d_r
  Matrix<Real> w2;      // n_b x d_e
  Matrix<Real> w3;      // n_b x d_o

  static CoreTensor make_dense(CoreDims dims);
  static CoreTensor make_cp(CoreDims dims, Index rank);

  CoreTensor zeros_like() const;
  std::int64_t parameter_count() const;
  bool all_finite() const;
  void set_zero();
};

/// Contracts `tensor` with `v` along `mode` (1, 2 or 3); surviving modes keep their order.
template <typename Real>
Matrix<Real> n_mode_product(const Tensor3<Real>& tensor, const Vector<Real>& v, int mode);

template <typename Real>
CoreTensor<Real> cp_reconstruct(const CoreTensor<Real>& core);

/// k-th frontal slice X[:, :, k] as a d_e x d_r matrix.
template <typename Real>
Matrix<Real> frontal_slice(const Tensor3<Real>& tensor, Index k);

/// f(e_r, h) = W x_1 h x_2 e_r. The CP layout is contracted in factored form:
/// W3^T ((W2 h) .* (W1 e_r)).
template <typename Real>
Vector<Real> relation_transform(const CoreTensor<Real>& core, const Vector<Real>& h,
                                const Vector<Real>& e_r);

/// M_r = W x_2 e_r as a d_e x d_o matrix, so that f(e_r, h) = M_r^T h. Dense layout only.
template <typename Real>
Matrix<Real> relation_map(const Tensor3<Real>& core, const Eigen::Ref<const Vector<Real>>& e_r);

/// Adjoint of relation_map: given dL/dM_r, accumulates into dL/dW and dL/de_r.
template <typename Real>
void relation_map_backward(const Tensor3<Real>& core, const Eigen::Ref<const Vector<Real>>& e_r,
                           const Matrix<Real>& grad_map, Tensor3<Real>& grad_core,
                           Eigen::Ref<Vector<Real>> grad_e_r);

}  // namespace tgcn
