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

#include "tgcn/tensorcore.hpp"

#include <sstream>

namespace tgcn {

namespace {

[[noreturn]] void shape_error(const char* what, Index expected, Index got) {
  std::ostringstream msg;
  msg << what << ": expected size " << expected << ", got " << got;
  throw ShapeError(msg.str());
}

}  // namespace

template <typename Real>
CoreTensor<Real> CoreTensor<Real>::make_dense(CoreDims dims) {
  CoreTensor core;
  core.layout = CoreLayout::kDense;
  core.dims = dims;
  core.dense = Tensor3<Real>(dims.entity, dims.relation, dims.output);
  return core;
}

template <typename Real>
CoreTensor<Real> CoreTensor<Real>::make_cp(CoreDims dims, Index rank) {
  if (rank < 1) throw ArgumentError("CP core requires n_b >= 1");
  CoreTensor core;
  core.layout = CoreLayout::kCp;
  core.dims = dims;
  core.rank = rank;
  core.w1 = Matrix<Real>::Zero(rank, dims.relation);
  core.w2 = Matrix<Real>::Zero(rank, dims.entity);
  core.w3 = Matrix<Real>::Zero(rank, dims.output);
  return core;
}

template <typename Real>
CoreTensor<Real> CoreTensor<Real>::zeros_like() const {
  return layout == CoreLayout::kDense ? make_dense(dims) : make_cp(dims, rank);
}

template <typename Real>
std::int64_t CoreTensor<Real>::parameter_count() const {
  if (layout == CoreLayout::kDense) return dims.entity * dims.relation * dims.output;
  return rank * (dims.entity + dims.relation + dims.output);
}

template <typename Real>
bool CoreTensor<Real>::all_finite() const {
  if (layout == CoreLayout::kDense) return dense.unfolded().allFinite();
  return w1.allFinite() && w2.allFinite() && w3.allFinite();
}

template <typename Real>
void CoreTensor<Real>::set_zero() {
  if (layout == CoreLayout::kDense) {
    dense.set_zero();
  } else {
    w1.setZero();
    w2.setZero();
    w3.setZero();
  }
}

template <typename Real>
Matrix<Real> n_mode_product(const Tensor3<Real>& tensor, const Vector<Real>& v, int mode) {
  if (mode < 1 || mode > 3) throw ArgumentError("n-mode product: mode must be 1, 2 or 3");
  const Index d0 = tensor.dim(0), d1 = tensor.dim(1), d2 = tensor.dim(2);
  if (v.size() != tensor.dim(mode - 1)) {
    std::ostringstream msg;
    msg << "n-mode product along mode " << mode << ": tensor has size " << tensor.dim(mode - 1)
        << " but vector has size " << v.size();
    throw ShapeError(msg.str());
  }
  Matrix<Real> out;
  switch (mode) {
    case 1:
      out = Matrix<Real>::Zero(d1, d2);
      for (Index i = 0; i < d0; ++i) out.noalias() += v(i) * tensor.unfolded().middleRows(i * d1, d1);
      break;
    case 2:
      out = Matrix<Real>::Zero(d0, d2);
      for (Index i = 0; i < d0; ++i) {
        out.row(i).noalias() = v.transpose() * tensor.unfolded().middleRows(i * d1, d1);
      }
      break;
    default:
      out = Matrix<Real>::Zero(d0, d1);
      for (Index i = 0; i < d0; ++i) {
        out.row(i).noalias() = (tensor.unfolded().middleRows(i * d1, d1) * v).transpose();
      }
      break;
  }
  return out;
}

template <typename Real>
CoreTensor<Real> cp_reconstruct(const CoreTensor<Real>& core) {
  if (core.layout != CoreLayout::kCp) throw ArgumentError("cp_reconstruct requires a CP core");
  CoreTensor<Real> out = CoreTensor<Real>::make_dense(core.dims);
  const Index de = core.dims.entity, dr = core.dims.relation;
  for (Index b = 0; b < core.rank; ++b) {
    for (Index i = 0; i < de; ++i) {
      for (Index j = 0; j < dr; ++j) {
        out.dense.unfolded().row(i * dr + j) += (core.w2(b, i) * core.w1(b, j)) * core.w3.row(b);
      }
    }
  }
  return out;
}

template <typename Real>
Matrix<Real> frontal_slice(const Tensor3<Real>& tensor, Index k) {
  if (k < 0 || k >= tensor.dim(2)) throw ShapeError("frontal slice index out of range");
  Matrix<Real> slice(tensor.dim(0), tensor.dim(1));
  for (Index i = 0; i < tensor.dim(0); ++i) {
    for (Index j = 0; j < tensor.dim(1); ++j) slice(i, j) = tensor(i, j, k);
  }
  return slice;
}

template <typename Real>
Matrix<Real> relation_map(const Tensor3<Real>& core, const Eigen::Ref<const Vector<Real>>& e_r) {
  const Index de = core.dim(0), dr = core.dim(1), dout = core.dim(2);
  if (e_r.size() != dr) shape_error("relation embedding", dr, e_r.size());
  Matrix<Real> map(de, dout);
  for (Index i = 0; i < de; ++i) {
    map.row(i).noalias() = e_r.transpose() * core.unfolded().middleRows(i * dr, dr);
  }
  return map;
}

template <typename Real>
void relation_map_backward(const Tensor3<Real>& core, const Eigen::Ref<const Vector<Real>>& e_r,
                           const Matrix<Real>& grad_map, Tensor3<Real>& grad_core,
                           Eigen::Ref<Vector<Real>> grad_e_r) {
  const Index de = core.dim(0), dr = core.dim(1);
  for (Index i = 0; i < de; ++i) {
    const auto block = core.unfolded().middleRows(i * dr, dr);
    grad_core.unfolded().middleRows(i * dr, dr).noalias() += e_r * grad_map.row(i);
    grad_e_r.noalias() += block * grad_map.row(i).transpose();
  }
}

template <typename Real>
Vector<Real> relation_transform(const CoreTensor<Real>& core, const Vector<Real>& h,
                                const Vector<Real>& e_r) {
  if (h.size() != core.dims.entity) shape_error("entity representation", core.dims.entity, h.size());
  if (e_r.size() != core.dims.relation) {
    shape_error("relation embedding", core.dims.relation, e_r.size());
  }
  if (core.layout == CoreLayout::kDense) {
    return relation_map<Real>(core.dense, e_r).transpose() * h;
  }
  const Vector<Real> mixed = (core.w2 * h).cwiseProduct(core.w1 * e_r);
  return core.w3.transpose() * mixed;
}

#define TGCN_INSTANTIATE(Real)                                                                    \
  template struct CoreTensor<Real>;                                                               \
  template Matrix<Real> n_mode_product(const Tensor3<Real>&, const Vector<Real>&, int);           \
  template CoreTensor<Real> cp_reconstruct(const CoreTensor<Real>&);                              \
  template Matrix<Real> frontal_slice(const Tensor3<Real>&, Index);                               \
  template Vector<Real> relation_transform(const CoreTensor<Real>&, const Vector<Real>&,          \
                                           const Vector<Real>&);                                  \
  template Matrix<Real> relation_map(const Tensor3<Real>&, const Eigen::Ref<const Vector<Real>>&); \
  template void relation_map_backward(const Tensor3<Real>&, const Eigen::Ref<const Vector<Real>>&, \
                                      const Matrix<Real>&, Tensor3<Real>&,                        \
                                      Eigen::Ref<Vector<Real>>);

TGCN_INSTANTIATE(float)
TGCN_INSTANTIATE(double)

#undef TGCN_INSTANTIATE

}  // namespace tgcn
