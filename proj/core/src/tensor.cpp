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

#include "seac/tensor.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>

namespace seac::ad {

namespace {

std::string join_shapes(std::span<const Shape> shapes) {
  std::string out;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (i > 0) out += " and ";
    out += shapes[i].str();
  }
  return out;
}

void require_finite(const Matrix& m, const char* where) {
  if (!m.allFinite()) {
    throw NonFiniteError(fmt::format("{}: non-finite input", where));
  }
}

[[noreturn]] void shape_error(const char* primitive, std::initializer_list<Shape> shapes) {
  throw ShapeError(primitive, std::span<const Shape>(shapes.begin(), shapes.size()));
}

}  // namespace

std::string Shape::str() const { return fmt::format("[{}x{}]", rows, cols); }

ShapeError::ShapeError(const std::string& primitive, std::span<const Shape> shapes)
    : std::invalid_argument(
          fmt::format("{}: incompatible shapes {}", primitive, join_shapes(shapes))),
      primitive_(primitive) {}

Parameter::Parameter(std::string name_, Matrix value_)
    : name(std::move(name_)), value(std::move(value_)) {
  grad = Matrix::Zero(value.rows(), value.cols());
}

void zero_grad(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::kConstant: return "constant";
    case OpKind::kVariable: return "variable";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAddRow: return "add_row";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kTanh: return "tanh";
    case OpKind::kExp: return "exp";
    case OpKind::kLogSoftmax: return "log_softmax";
    case OpKind::kGather: return "gather";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kRowSum: return "row_sum";
    case OpKind::kSquaredDiff: return "squared_difference";
  }
  return "unknown";
}

const Matrix& Tensor::value() const { return tape_->nodes_.at(id_).value; }

Matrix Tensor::grad() const {
  const auto& n = tape_->nodes_.at(id_);
  if (n.grad.size() == n.value.size()) return n.grad;
  return Matrix::Zero(n.value.rows(), n.value.cols());
}

double Tensor::item() const {
  const Matrix& v = value();
  if (v.size() != 1) shape_error("item", {shape_of(v)});
  return v(0, 0);
}

Matrix log_softmax_rows(const Matrix& logits) {
  Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  Matrix shifted = logits.colwise() - row_max;
  Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log().matrix();
  return shifted.colwise() - lse;
}

void Tape::clear() { nodes_.clear(); }

Tensor Tape::push(Node n) {
  if (n.requires_grad) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  nodes_.push_back(std::move(n));
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

const Tape::Node& Tape::node(Tensor t) const { return nodes_[t.id_]; }

void Tape::check_owner(Tensor t, const char* primitive) const {
  if (t.tape_ != this || t.id_ < 0 || t.id_ >= static_cast<int>(nodes_.size())) {
    throw std::invalid_argument(fmt::format("{}: operand does not belong to this tape", primitive));
  }
}

Tensor Tape::constant(Matrix value) {
  require_finite(value, "constant");
  Node n;
  n.op = OpKind::kConstant;
  n.value = std::move(value);
  return push(std::move(n));
}

Tensor Tape::variable(Matrix value) {
  require_finite(value, "variable");
  Node n;
  n.op = OpKind::kVariable;
  n.requires_grad = true;
  n.value = std::move(value);
  return push(std::move(n));
}

Tensor Tape::parameter(Parameter& param) {
  require_finite(param.value, param.name.empty() ? "parameter" : param.name.c_str());
  if (param.grad.rows() != param.value.rows() || param.grad.cols() != param.value.cols()) {
    param.grad = Matrix::Zero(param.value.rows(), param.value.cols());
  }
  Node n;
  n.op = OpKind::kParameter;
  n.requires_grad = true;
  n.value = param.value;
  n.param = &param;
  return push(std::move(n));
}

Tensor Tape::matmul(Tensor a, Tensor b) {
  check_owner(a, "matmul");
  check_owner(b, "matmul");
  const Matrix& x = node(a).value;
  const Matrix& y = node(b).value;
  if (x.cols() != y.rows()) shape_error("matmul", {shape_of(x), shape_of(y)});
  Node n;
  n.op = OpKind::kMatmul;
  n.lhs = a.id_;
  n.rhs = b.id_;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value.noalias() = x * y;
  return push(std::move(n));
}

Tensor Tape::add_row(Tensor a, Tensor b) {
  check_owner(a, "add_row");
  check_owner(b, "add_row");
  const Matrix& x = node(a).value;
  const Matrix& r = node(b).value;
  if (r.rows() != 1 || r.cols() != x.cols()) shape_error("add_row", {shape_of(x), shape_of(r)});
  Node n;
  n.op = OpKind::kAddRow;
  n.lhs = a.id_;
  n.rhs = b.id_;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = x.rowwise() + r.row(0);
  return push(std::move(n));
}

Tensor Tape::add(Tensor a, Tensor b) {
  check_owner(a, "add");
  check_owner(b, "add");
  const Matrix& x = node(a).value;
  const Matrix& y = node(b).value;
  if (shape_of(x) != shape_of(y)) shape_error("add", {shape_of(x), shape_of(y)});
  Node n;
  n.op = OpKind::kAdd;
  n.lhs = a.id_;
  n.rhs = b.id_;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = x + y;
  return push(std::move(n));
}

Tensor Tape::sub(Tensor a, Tensor b) {
  check_owner(a, "sub");
  check_owner(b, "sub");
  const Matrix& x = node(a).value;
  const Matrix& y = node(b).value;
  if (shape_of(x) != shape_of(y)) shape_error("sub", {shape_of(x), shape_of(y)});
  Node n;
  n.op = OpKind::kSub;
  n.lhs = a.id_;
  n.rhs = b.id_;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = x - y;
  return push(std::move(n));
}

Tensor Tape::mul(Tensor a, Tensor b) {
  check_owner(a, "mul");
  check_owner(b, "mul");
  const Matrix& x = node(a).value;
  const Matrix& y = node(b).value;
  if (shape_of(x) != shape_of(y)) shape_error("mul", {shape_of(x), shape_of(y)});
  Node n;
  n.op = OpKind::kMul;
  n.lhs = a.id_;
  n.rhs = b.id_;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = x.cwiseProduct(y);
  return push(std::move(n));
}

Tensor Tape::scale(Tensor a, double factor) {
  check_owner(a, "scale");
  if (!std::isfinite(factor)) throw NonFiniteError("scale: non-finite factor");
  Node n;
  n.op = OpKind::kScale;
  n.lhs = a.id_;
  n.factor = factor;
  n.requires_grad = node(a).requires_grad;
  n.value = factor * node(a).value;
  return push(std::move(n));
}

Tensor Tape::tanh(Tensor a) {
  check_owner(a, "tanh");
  Node n;
  n.op = OpKind::kTanh;
  n.lhs = a.id_;
  n.requires_grad = node(a).requires_grad;
  n.value = node(a).value.array().tanh().matrix();
  return push(std::move(n));
}

Tensor Tape::exp(Tensor a) {
  check_owner(a, "exp");
  Node n;
  n.op = OpKind::kExp;
  n.lhs = a.id_;
  n.requires_grad = node(a).requires_grad;
  n.value = node(a).value.array().exp().matrix();
  return push(std::move(n));
}

Tensor Tape::log_softmax(Tensor a) {
  check_owner(a, "log_softmax");
  const Matrix& x = node(a).value;
  require_finite(x, "log_softmax");
  if (x.cols() == 0) shape_error("log_softmax", {shape_of(x)});
  Node n;
  n.op = OpKind::kLogSoftmax;
  n.lhs = a.id_;
  n.requires_grad = node(a).requires_grad;
  n.value = log_softmax_rows(x);
  if (n.requires_grad) n.saved = n.value.array().exp().matrix();
  return push(std::move(n));
}

Tensor Tape::gather(Tensor a, std::span<const int> index) {
  check_owner(a, "gather");
  const Matrix& x = node(a).value;
  if (static_cast<Eigen::Index>(index.size()) != x.rows()) {
    shape_error("gather", {shape_of(x), Shape{static_cast<Eigen::Index>(index.size()), 1}});
  }
  Node n;
  n.op = OpKind::kGather;
  n.lhs = a.id_;
  n.requires_grad = node(a).requires_grad;
  n.value.resize(x.rows(), 1);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const int c = index[r];
    if (c < 0 || c >= x.cols()) {
      throw std::out_of_range(fmt::format("gather: index {} out of range for {}", c,
                                          shape_of(x).str()));
    }
    n.value(r, 0) = x(r, c);
  }
  n.index.assign(index.begin(), index.end());
  return push(std::move(n));
}

Tensor Tape::sum(Tensor a) {
  check_owner(a, "sum");
  Node n;
  n.op = OpKind::kSum;
  n.lhs = a.id_;
  n.requires_grad = node(a).requires_grad;
  n.value = Matrix::Constant(1, 1, node(a).value.sum());
  return push(std::move(n));
}

Tensor Tape::mean(Tensor a) {
  check_owner(a, "mean");
  const Matrix& x = node(a).value;
  if (x.size() == 0) shape_error("mean", {shape_of(x)});
  Node n;
  n.op = OpKind::kMean;
  n.lhs = a.id_;
  n.requires_grad = node(a).requires_grad;
  n.value = Matrix::Constant(1, 1, x.mean());
  return push(std::move(n));
}

Tensor Tape::row_sum(Tensor a) {
  check_owner(a, "row_sum");
  Node n;
  n.op = OpKind::kRowSum;
  n.lhs = a.id_;
  n.requires_grad = node(a).requires_grad;
  n.value = node(a).value.rowwise().sum();
  return push(std::move(n));
}

Tensor Tape::squared_difference(Tensor a, Tensor b) {
  check_owner(a, "squared_difference");
  check_owner(b, "squared_difference");
  const Matrix& x = node(a).value;
  const Matrix& y = node(b).value;
  if (shape_of(x) != shape_of(y)) shape_error("squared_difference", {shape_of(x), shape_of(y)});
  Node n;
  n.op = OpKind::kSquaredDiff;
  n.lhs = a.id_;
  n.rhs = b.id_;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.saved = x - y;
  n.value = n.saved.array().square().matrix();
  return push(std::move(n));
}

void Tape::accumulate(int id, const Matrix& delta) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  n.grad += delta;
}

void Tape::backpropagate(Tensor loss) {
  check_owner(loss, "backpropagate");
  if (node(loss).value.size() != 1) {
    throw ShapeError("backpropagate", std::array{shape_of(node(loss).value)});
  }
  for (Node& n : nodes_) {
    if (n.requires_grad) n.grad.setZero();
  }
  if (!nodes_[loss.id_].requires_grad) return;
  nodes_[loss.id_].grad(0, 0) = 1.0;

  for (int id = loss.id_; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case OpKind::kConstant:
      case OpKind::kVariable:
        break;
      case OpKind::kParameter:
        n.param->grad += g;
        break;
      case OpKind::kMatmul: {
        if (nodes_[n.lhs].requires_grad) {
          nodes_[n.lhs].grad.noalias() += g * nodes_[n.rhs].value.transpose();
        }
        if (nodes_[n.rhs].requires_grad) {
          nodes_[n.rhs].grad.noalias() += nodes_[n.lhs].value.transpose() * g;
        }
        break;
      }
      case OpKind::kAddRow:
        accumulate(n.lhs, g);
        if (nodes_[n.rhs].requires_grad) nodes_[n.rhs].grad += g.colwise().sum();
        break;
      case OpKind::kAdd:
        accumulate(n.lhs, g);
        accumulate(n.rhs, g);
        break;
      case OpKind::kSub:
        accumulate(n.lhs, g);
        if (nodes_[n.rhs].requires_grad) nodes_[n.rhs].grad -= g;
        break;
      case OpKind::kMul:
        if (nodes_[n.lhs].requires_grad) {
          nodes_[n.lhs].grad += g.cwiseProduct(nodes_[n.rhs].value);
        }
        if (nodes_[n.rhs].requires_grad) {
          nodes_[n.rhs].grad += g.cwiseProduct(nodes_[n.lhs].value);
        }
        break;
      case OpKind::kScale:
        nodes_[n.lhs].grad += n.factor * g;
        break;
      case OpKind::kTanh:
        nodes_[n.lhs].grad.array() += g.array() * (1.0 - n.value.array().square());
        break;
      case OpKind::kExp:
        nodes_[n.lhs].grad += g.cwiseProduct(n.value);
        break;
      case OpKind::kLogSoftmax: {
        Eigen::VectorXd gsum = g.rowwise().sum();
        Matrix delta = g - (n.saved.array().colwise() * gsum.array()).matrix();
        nodes_[n.lhs].grad += delta;
        break;
      }
      case OpKind::kGather: {
        Matrix& target = nodes_[n.lhs].grad;
        for (std::size_t r = 0; r < n.index.size(); ++r) {
          target(static_cast<Eigen::Index>(r), n.index[r]) += g(static_cast<Eigen::Index>(r), 0);
        }
        break;
      }
      case OpKind::kSum:
        nodes_[n.lhs].grad.array() += g(0, 0);
        break;
      case OpKind::kMean: {
        const double share = g(0, 0) / static_cast<double>(nodes_[n.lhs].value.size());
        nodes_[n.lhs].grad.array() += share;
        break;
      }
      case OpKind::kRowSum:
        nodes_[n.lhs].grad.colwise() += g.col(0);
        break;
      case OpKind::kSquaredDiff: {
        Matrix delta = 2.0 * n.saved.cwiseProduct(g);
        accumulate(n.lhs, delta);
        if (nodes_[n.rhs].requires_grad) nodes_[n.rhs].grad -= delta;
        break;
      }
    }
  }
}

}  // namespace seac::ad
