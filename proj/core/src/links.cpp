#include "esenc/links.hpp"

namespace esenc::links {

LinkSpec LinkSpec::of(LinkKind kind) {
  switch (kind) {
    case LinkKind::LinearIntercept:
      return {kind, 3};
    case LinkKind::LinearNoIntercept:
      return {kind, 2};
    case LinkKind::ConvexWeights:
      return {kind, 1};
    case LinkKind::AnchoredOffset:
      return {kind, 2};
  }
  throw data_error("unknown link kind");
}

LinkSpec parse_link(const std::string& name) {
  if (name == "linear-intercept") return LinkSpec::of(LinkKind::LinearIntercept);
  if (name == "linear") return LinkSpec::of(LinkKind::LinearNoIntercept);
  if (name == "convex") return LinkSpec::of(LinkKind::ConvexWeights);
  if (name == "anchored-offset") return LinkSpec::of(LinkKind::AnchoredOffset);
  throw data_error("unknown link kind '" + name +
                   "' (expected linear-intercept, linear, convex or "
                   "anchored-offset)");
}

std::string link_name(const LinkSpec& spec) {
  switch (spec.kind) {
    case LinkKind::LinearIntercept:
      return "linear-intercept";
    case LinkKind::LinearNoIntercept:
      return "linear";
    case LinkKind::ConvexWeights:
      return "convex";
    case LinkKind::AnchoredOffset:
      return "anchored-offset";
  }
  return "?";
}

Eigen::VectorXd null_theta(const LinkSpec& spec) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(spec.k);
  switch (spec.kind) {
    case LinkKind::LinearIntercept:
      t << 0.0, 1.0, 0.0;
      break;
    case LinkKind::LinearNoIntercept:
      t << 1.0, 0.0;
      break;
    case LinkKind::ConvexWeights:
      t << 1.0;
      break;
    case LinkKind::AnchoredOffset:
      t << 0.0, 0.0;
      break;
  }
  return t;
}

std::optional<Eigen::VectorXd> swapped_null_theta(const LinkSpec& spec) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(spec.k);
  switch (spec.kind) {
    case LinkKind::LinearIntercept:
      t << 0.0, 0.0, 1.0;
      return t;
    case LinkKind::LinearNoIntercept:
      t << 0.0, 1.0;
      return t;
    case LinkKind::ConvexWeights:
      t << 0.0;
      return t;
    case LinkKind::AnchoredOffset:
      // g = t1 + f1 + t2*f2 cannot reproduce f2 alone.
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Eigen::VectorXd> mirror_theta(
    const LinkSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta_block) {
  Eigen::VectorXd t = theta_block;
  switch (spec.kind) {
    case LinkKind::LinearIntercept:
      std::swap(t[1], t[2]);
      return t;
    case LinkKind::LinearNoIntercept:
      std::swap(t[0], t[1]);
      return t;
    case LinkKind::ConvexWeights:
      t[0] = 1.0 - t[0];
      return t;
    case LinkKind::AnchoredOffset:
      return std::nullopt;
  }
  return std::nullopt;
}

AffineLink affine_link(const LinkSpec& spec, double f1, double f2) {
  AffineLink a{0.0, Eigen::Vector3d::Zero()};
  switch (spec.kind) {
    case LinkKind::LinearIntercept:
      a.coef << 1.0, f1, f2;
      break;
    case LinkKind::LinearNoIntercept:
      a.coef << f1, f2, 0.0;
      break;
    case LinkKind::ConvexWeights:
      a.base = f2;
      a.coef << f1 - f2, 0.0, 0.0;
      break;
    case LinkKind::AnchoredOffset:
      a.base = f1;
      a.coef << 1.0, f2, 0.0;
      break;
  }
  return a;
}

double link_value(const LinkSpec& spec, double f1, double f2,
                  const Eigen::Ref<const Eigen::VectorXd>& theta_block) {
  if (theta_block.size() != spec.k) {
    throw length_mismatch("link parameter block has length " +
                          std::to_string(theta_block.size()) + ", expected " +
                          std::to_string(spec.k));
  }
  // Canonical forms; these reproduce f1 exactly at the null parameter, which
  // the affine flattening used in the estimation loop does not guarantee.
  const auto& t = theta_block;
  switch (spec.kind) {
    case LinkKind::LinearIntercept:
      return t[0] + t[1] * f1 + t[2] * f2;
    case LinkKind::LinearNoIntercept:
      return t[0] * f1 + t[1] * f2;
    case LinkKind::ConvexWeights:
      return t[0] * f1 + (1.0 - t[0]) * f2;
    case LinkKind::AnchoredOffset:
      return t[0] + f1 + t[1] * f2;
  }
  throw data_error("unknown link kind");
}

Eigen::VectorXd link_gradient(const LinkSpec& spec, double f1, double f2,
                              const Eigen::Ref<const Eigen::VectorXd>& theta_block) {
  if (theta_block.size() != spec.k) {
    throw length_mismatch("link parameter block has length " +
                          std::to_string(theta_block.size()) + ", expected " +
                          std::to_string(spec.k));
  }
  const AffineLink a = affine_link(spec, f1, f2);
  return a.coef.head(spec.k);
}

Eigen::MatrixXd link_hessian(const LinkSpec& spec, double f1, double f2,
                             const Eigen::Ref<const Eigen::VectorXd>& theta_block) {
  if (theta_block.size() != spec.k) {
    throw length_mismatch("link parameter block has length " +
                          std::to_string(theta_block.size()) + ", expected " +
                          std::to_string(spec.k));
  }
  (void)f1;
  (void)f2;
  return Eigen::MatrixXd::Zero(spec.k, spec.k);
}

}  // namespace esenc::links
