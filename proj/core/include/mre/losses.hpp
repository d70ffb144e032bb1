#pragma once

#include <optional>
#include <string_view>

#include "mre/design.hpp"
#include "mre/types.hpp"

namespace mre {

enum class LossKind { Beta, Quad, Lik };

std::string_view to_string(LossKind kind);
/// "beta" | "quad" | "lik"; throws Parse otherwise.
LossKind parse_loss(std::string_view name);

/// True for losses on covariance decisions.
constexpr bool is_covariance_loss(LossKind kind) noexcept { return kind != LossKind::Beta; }

/// (d - beta)' xp' Sigma_p^{-1} xp (d - beta), evaluated as sum_i r_i^2 / sigma2_i
/// with r = xp (d - beta).
double loss_beta(const Design& design, const Vector& d, const ParameterPoint& theta);

/// sum_i (D_i / sigma2_i - 1)^2
double loss_quad(const Vector& d, const Vector& sigma2);

/// sum_i (r_i - ln r_i - 1), r_i = D_i / sigma2_i. A zero D_i raises
/// ZeroVariance, a negative one InvalidParameter.
double loss_lik(const Vector& d, const Vector& sigma2);

/// Per-population terms of loss_quad / loss_lik; they sum to the loss.
Vector loss_quad_terms(const Vector& d, const Vector& sigma2);
Vector loss_lik_terms(const Vector& d, const Vector& sigma2);

}  // namespace mre
