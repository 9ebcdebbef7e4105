#pragma once

#include <span>
#include <vector>

#include "tokencom/numkit/tensor.hpp"

namespace tokencom::numkit {

// All ops check shapes up front and throw std::invalid_argument naming the
// offending shapes. Every op records its backward rule when any input
// requires grad; gradient accumulation across fan-out is additive.

Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor scale(const Tensor& a, double s);

// x: [n x d], bias: [d]; adds bias to every row.
Tensor add_row_vector(const Tensor& x, const Tensor& bias);

Tensor transpose(const Tensor& a);
Tensor slice_rows(const Tensor& a, int r0, int r1);
Tensor slice_cols(const Tensor& a, int c0, int c1);
Tensor concat_rows(const Tensor& a, const Tensor& b);
Tensor concat_cols(const std::vector<Tensor>& parts);

// table: [v x d]; output row i = table row ids[i]. Duplicate ids accumulate
// gradient into the same table row.
Tensor gather_rows(const Tensor& table, std::span<const int> ids);
Tensor gather_cols(const Tensor& a, std::span<const int> cols);

// scores: [s x s]; row i is softmax over columns 0..i, zeros elsewhere.
Tensor causal_softmax(const Tensor& scores);

// Per-row x / sqrt(mean(x^2) + eps). No learned scale.
Tensor rmsnorm_rows(const Tensor& x, double eps = 1e-5);

// Mean cross-entropy over rows, max-subtraction stabilized; backward is
// (softmax - onehot) / n.
Tensor softmax_ce_loss(const Tensor& logits, std::span<const int> targets);

// Mean squared error over all elements.
Tensor mse_loss(const Tensor& a, const Tensor& b);

Tensor sum_all(const Tensor& a);

// Forward: a new tensor holding `values`. Backward: identity onto `src`.
// This is the gradient bridge across non-differentiable stages.
Tensor replace_values(const Tensor& src, std::span<const float> values);

// Lowest index wins ties.
int argmax(std::span<const float> v);

}  // namespace tokencom::numkit
