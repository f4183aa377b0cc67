#include "strataug/link.hpp"

#include <algorithm>
#include <cmath>

#include "strataug/errors.hpp"

namespace strataug {

namespace {

double clamp_unit(double p) { return std::clamp(p, LinkSpec::kClamp, 1.0 - LinkSpec::kClamp); }

double clamp_positive(double x) { return std::max(x, LinkSpec::kClamp); }

}  // namespace

double LinkSpec::g(double x) const {
  switch (kind) {
    case LinkKind::identity:
      return x;
    case LinkKind::log:
      return std::log(clamp_positive(x));
    case LinkKind::logit: {
      const double p = clamp_unit(x);
      return std::log(p / (1.0 - p));
    }
  }
  return x;
}

double LinkSpec::g_inv(double x) const {
  switch (kind) {
    case LinkKind::identity:
      return x;
    case LinkKind::log:
      return std::exp(x);
    case LinkKind::logit:
      // numerically stable logistic
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return x;
}

double LinkSpec::g_prime(double x) const {
  switch (kind) {
    case LinkKind::identity:
      return 1.0;
    case LinkKind::log:
      return 1.0 / clamp_positive(x);
    case LinkKind::logit: {
      const double p = clamp_unit(x);
      return 1.0 / (p * (1.0 - p));
    }
  }
  return 1.0;
}

bool LinkSpec::at_boundary(double x) const {
  switch (kind) {
    case LinkKind::identity:
      return false;
    case LinkKind::log:
      return x < kClamp;
    case LinkKind::logit:
      return x < kClamp || x > 1.0 - kClamp;
  }
  return false;
}

LinkSpec make_link(LinkKind kind) { return LinkSpec{kind}; }

const char* to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::identity:
      return "identity";
    case LinkKind::log:
      return "log";
    case LinkKind::logit:
      return "logit";
  }
  return "identity";
}

LinkKind link_kind_from_string(const std::string& s) {
  if (s == "identity") return LinkKind::identity;
  if (s == "log") return LinkKind::log;
  if (s == "logit") return LinkKind::logit;
  throw ConfigError("unknown link: " + s);
}

}  // namespace strataug
