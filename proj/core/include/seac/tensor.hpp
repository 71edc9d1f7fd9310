// Copyright 2026 The seac-cpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seac::ad {

/// Dense 64-bit matrix, row-major so that a batch row is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Shape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  friend bool operator==(const Shape&, const Shape&) = default;
  std::string str() const;
};

inline Shape shape_of(const Matrix& m) { return {m.rows(), m.cols()}; }

/// Raised when a primitive receives operands of incompatible shape. The
/// message names the primitive and every offending shape.
class ShapeError : public std::invalid_argument {
 public:
  ShapeError(const std::string& primitive, std::span<const Shape> shapes);

  const std::string& primitive() const { return primitive_; }

 private:
  std::string primitive_;
};

class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A persistent trainable array. Lives outside any tape; binding it to a tape
/// with Tape::parameter() makes backpropagate() add into `grad`.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Matrix value);

  void zero_grad() { grad.setZero(); }
  Shape shape() const { return shape_of(value); }

  std::string name;
  Matrix value;
  Matrix grad;
};

using ParameterList = std::vector<Parameter*>;

void zero_grad(std::span<Parameter* const> params);

class Tape;

/// Handle to one node on a Tape. Cheap to copy; valid while the tape lives.
class Tensor {
 public:
  Tensor() = default;

  const Matrix& value() const;
  /// Gradient accumulated by the last backpropagate(); zeros before that.
  Matrix grad() const;
  Shape shape() const { return shape_of(value()); }
  double item() const;

  int node_id() const { return id_; }
  Tape& tape() const { return *tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Tensor(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

enum class OpKind : std::uint8_t {
  kConstant,
  kVariable,
  kParameter,
  kMatmul,
  kAddRow,
  kAdd,
  kSub,
  kMul,
  kScale,
  kTanh,
  kExp,
  kLogSoftmax,
  kGather,
  kSum,
  kMean,
  kRowSum,
  kSquaredDiff,
};

const char* op_name(OpKind op);

/// Reverse-mode tape. Primitives are recorded in call order, so inputs always
/// precede their consumers and backpropagate() is a single reverse sweep.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives gradient (stop-gradient input).
  Tensor constant(Matrix value);
  /// Leaf whose gradient is kept on the node itself.
  Tensor variable(Matrix value);
  /// Leaf bound to a persistent parameter.
  Tensor parameter(Parameter& param);

  Tensor matmul(Tensor a, Tensor b);
  /// a (n x k) plus row vector b (1 x k) broadcast over rows.
  Tensor add_row(Tensor a, Tensor b);
  Tensor add(Tensor a, Tensor b);
  Tensor sub(Tensor a, Tensor b);
  /// Elementwise product.
  Tensor mul(Tensor a, Tensor b);
  Tensor scale(Tensor a, double factor);
  Tensor tanh(Tensor a);
  Tensor exp(Tensor a);
  /// Row-wise log-softmax.
  Tensor log_softmax(Tensor a);
  /// Picks a(r, index[r]) for every row r; result is n x 1.
  Tensor gather(Tensor a, std::span<const int> index);
  Tensor sum(Tensor a);
  Tensor mean(Tensor a);
  /// Sum over the last axis; result is n x 1.
  Tensor row_sum(Tensor a);
  /// Elementwise (a - b)^2.
  Tensor squared_difference(Tensor a, Tensor b);

  /// Accumulates d(loss)/d(parameter) into every bound Parameter::grad.
  void backpropagate(Tensor loss);

  std::size_t size() const { return nodes_.size(); }
  OpKind op(int node_id) const { return nodes_.at(node_id).op; }
  void clear();

 private:
  friend class Tensor;

  struct Node {
    OpKind op = OpKind::kConstant;
    int lhs = -1;
    int rhs = -1;
    bool requires_grad = false;
    double factor = 0.0;
    Matrix value;
    Matrix grad;
    Matrix saved;
    std::vector<int> index;
    Parameter* param = nullptr;
  };

  Tensor push(Node node);
  const Node& node(Tensor t) const;
  void check_owner(Tensor t, const char* primitive) const;
  void accumulate(int id, const Matrix& delta);

  std::vector<Node> nodes_;
};

// Free-function spelling of the primitives; each dispatches to the tape the
// first operand lives on.
inline Tensor matmul(Tensor a, Tensor b) { return a.tape().matmul(a, b); }
inline Tensor add_row(Tensor a, Tensor b) { return a.tape().add_row(a, b); }
inline Tensor operator+(Tensor a, Tensor b) { return a.tape().add(a, b); }
inline Tensor operator-(Tensor a, Tensor b) { return a.tape().sub(a, b); }
inline Tensor operator*(Tensor a, Tensor b) { return a.tape().mul(a, b); }
inline Tensor operator*(double s, Tensor a) { return a.tape().scale(a, s); }
inline Tensor tanh(Tensor a) { return a.tape().tanh(a); }
inline Tensor exp(Tensor a) { return a.tape().exp(a); }
inline Tensor log_softmax(Tensor a) { return a.tape().log_softmax(a); }
inline Tensor gather(Tensor a, std::span<const int> index) { return a.tape().gather(a, index); }
inline Tensor sum(Tensor a) { return a.tape().sum(a); }
inline Tensor mean(Tensor a) { return a.tape().mean(a); }
inline Tensor row_sum(Tensor a) { return a.tape().row_sum(a); }
inline Tensor squared_difference(Tensor a, Tensor b) {
  return a.tape().squared_difference(a, b);
}

/// Row-wise log-softmax on plain values (no tape); same arithmetic as the
/// taped primitive.
Matrix log_softmax_rows(const Matrix& logits);

}  // namespace seac::ad
