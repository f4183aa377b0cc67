#pragma once

#include <string>

namespace strataug {

enum class LinkKind { identity, log, logit };

// The estimand is delta = g(mu1) - g(mu0) for a smooth strictly increasing g.
// log and logit clamp their argument away from the domain boundary;
// at_boundary reports when the clamp would be active so callers can attach a
// warning instead of propagating non-finite values.
struct LinkSpec {
  LinkKind kind = LinkKind::identity;

  double g(double x) const;
  double g_inv(double x) const;
  double g_prime(double x) const;
  bool at_boundary(double x) const;

  static constexpr double kClamp = 1e-10;
};

LinkSpec make_link(LinkKind kind);

const char* to_string(LinkKind kind);
LinkKind link_kind_from_string(const std::string& s);

}  // namespace strataug
