#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace zip3 {

enum class LinkTag { log, identity };

// Strictly monotone, twice differentiable map between a positive
// distribution parameter and an unconstrained linear predictor.
struct LinkFunction {
  LinkTag tag = LinkTag::log;

  double eval(double x) const {
    switch (tag) {
      case LinkTag::log: return std::log(x);
      case LinkTag::identity: return x;
    }
    return 0.0;
  }
  double inverse(double eta) const {
    switch (tag) {
      case LinkTag::log: return std::exp(eta);
      case LinkTag::identity: return eta;
    }
    return 0.0;
  }
  double deriv(double x) const {
    switch (tag) {
      case LinkTag::log: return 1.0 / x;
      case LinkTag::identity: return 1.0;
    }
    return 0.0;
  }
  double second_deriv(double x) const {
    switch (tag) {
      case LinkTag::log: return -1.0 / (x * x);
      case LinkTag::identity: return 0.0;
    }
    return 0.0;
  }
};

inline LinkFunction parse_link(const std::string& name) {
  if (name == "log") return {LinkTag::log};
  if (name == "identity") return {LinkTag::identity};
  throw std::invalid_argument("unknown link function: '" + name +
                              "' (expected 'log' or 'identity')");
}

inline std::string link_name(const LinkFunction& link) {
  return link.tag == LinkTag::log ? "log" : "identity";
}

}  // namespace zip3
