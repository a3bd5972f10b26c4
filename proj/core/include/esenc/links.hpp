#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

#include "esenc/types.hpp"

namespace esenc::links {

//! Forecast combination formulas.  Every kind admits a parameter value that
//! reproduces the first forecast exactly, which is what makes encompassing a
//! testable parametric restriction.
enum class LinkKind {
  LinearIntercept,    // t1 + t2*f1 + t3*f2
  LinearNoIntercept,  // t1*f1 + t2*f2
  ConvexWeights,      // t1*f1 + (1-t1)*f2
  AnchoredOffset,     // t1 + f1 + t2*f2
};

struct LinkSpec {
  LinkKind kind = LinkKind::LinearIntercept;
  int k = 3;

  static LinkSpec of(LinkKind kind);
};

LinkSpec parse_link(const std::string& name);
std::string link_name(const LinkSpec& spec);

//! Parameter value with g(f, theta0) == f1 for all forecasts.
Eigen::VectorXd null_theta(const LinkSpec& spec);

//! Parameter value with g(f, theta) == f2, where the kind can express it.
std::optional<Eigen::VectorXd> swapped_null_theta(const LinkSpec& spec);

//! Parameter image under swapping the two forecasts: g(f2, f1, mirror(theta))
//! == g(f1, f2, theta).  Absent for kinds that cannot express the swap.
std::optional<Eigen::VectorXd> mirror_theta(
    const LinkSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta_block);

double link_value(const LinkSpec& spec, double f1, double f2,
                  const Eigen::Ref<const Eigen::VectorXd>& theta_block);

Eigen::VectorXd link_gradient(const LinkSpec& spec, double f1, double f2,
                              const Eigen::Ref<const Eigen::VectorXd>& theta_block);

Eigen::MatrixXd link_hessian(const LinkSpec& spec, double f1, double f2,
                             const Eigen::Ref<const Eigen::VectorXd>& theta_block);

//! Affine representation g = base + coef . theta, valid for all current
//! kinds.  The estimation hot loop consumes these instead of calling
//! link_value per observation.
struct AffineLink {
  double base;
  Eigen::Vector3d coef;  // zero-padded beyond spec.k
};

AffineLink affine_link(const LinkSpec& spec, double f1, double f2);

}  // namespace esenc::links
