#include "mre/losses.hpp"

#include <cmath>
#include <string>

#include "mre/error.hpp"

namespace mre {

namespace {

void check_positive(const Vector& v, const char* what, ErrorKind on_zero) {
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) {
      throw Error(on_zero, std::string(what) + "[" + std::to_string(i) + "] is zero");
    }
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw Error(ErrorKind::InvalidParameter, std::string(what) + "[" + std::to_string(i) + "] is not positive");
    }
  }
}

void check_pair(const Vector& d, const Vector& sigma2, ErrorKind on_zero_d) {
  if (d.size() != sigma2.size()) throw Error(ErrorKind::DimensionMismatch, "decision and target differ in length");
  check_positive(d, "D", on_zero_d);
  check_positive(sigma2, "sigma2", ErrorKind::InvalidParameter);
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Beta: return "beta";
    case LossKind::Quad: return "quad";
    case LossKind::Lik: return "lik";
  }
  return "?";
}

LossKind parse_loss(std::string_view name) {
  if (name == "beta") return LossKind::Beta;
  if (name == "quad") return LossKind::Quad;
  if (name == "lik") return LossKind::Lik;
  throw Error(ErrorKind::Parse, "unknown loss '" + std::string(name) + "' (expected beta, quad or lik)");
}

double loss_beta(const Design& design, const Vector& d, const ParameterPoint& theta) {
  if (d.size() != theta.dimension()) throw Error(ErrorKind::DimensionMismatch, "decision does not fit parameter");
  const Vector r = design.apply_xp(d - theta.beta());
  return r.array().square().cwiseQuotient(theta.sigma2().array()).sum();
}

Vector loss_quad_terms(const Vector& d, const Vector& sigma2) {
  check_pair(d, sigma2, ErrorKind::InvalidParameter);
  return (d.array() / sigma2.array() - 1.0).square().matrix();
}

Vector loss_lik_terms(const Vector& d, const Vector& sigma2) {
  check_pair(d, sigma2, ErrorKind::ZeroVariance);
  const Eigen::ArrayXd r = d.array() / sigma2.array();
  return (r - r.log() - 1.0).matrix();
}

double loss_quad(const Vector& d, const Vector& sigma2) { return loss_quad_terms(d, sigma2).sum(); }

double loss_lik(const Vector& d, const Vector& sigma2) { return loss_lik_terms(d, sigma2).sum(); }

}  // namespace mre
