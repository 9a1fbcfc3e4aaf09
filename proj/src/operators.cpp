#include "memdecay/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "memdecay/error.hpp"

namespace memdecay {

ModalOperatorPair::ModalOperatorPair(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty() || a_.size() != b_.size()) {
    throw Error(ErrorKind::parameter_domain,
                "operator pair needs equally many (>= 1) eigenvalues for A and B");
  }
  for (std::size_t k = 0; k < a_.size(); ++k) {
    if (!(a_[k] > 0.0) || !(b_[k] > 0.0) || !std::isfinite(a_[k]) || !std::isfinite(b_[k])) {
      throw Error(ErrorKind::parameter_domain, "operator eigenvalues must be positive and finite");
    }
  }
}

ModalOperatorPair ModalOperatorPair::laplacian_1d(std::size_t modes, double length, BChoice b) {
  if (modes == 0 || !(length > 0.0)) {
    throw Error(ErrorKind::parameter_domain, "laplacian_1d needs modes >= 1 and length > 0");
  }
  std::vector<double> av(modes);
  std::vector<double> bv(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    const double w = static_cast<double>(k + 1) * std::numbers::pi / length;
    av[k] = w * w;
    bv[k] = b == BChoice::same_as_a ? av[k] : 1.0;
  }
  return ModalOperatorPair(std::move(av), std::move(bv));
}

double ModalOperatorPair::max_a() const noexcept {
  return *std::max_element(a_.begin(), a_.end());
}

CoercivityConstants coercivity_constants(const ModalOperatorPair& pair) {
  CoercivityConstants c{0.0, pair.b().front()};
  for (std::size_t k = 0; k < pair.modes(); ++k) {
    c.a0 = std::max(c.a0, pair.b()[k] / pair.a()[k]);
    c.a1 = std::min(c.a1, pair.b()[k]);
  }
  return c;
}

CaseConstants case_constants(const ModalOperatorPair& pair) {
  CaseConstants c{0.0, 0.0};
  double a_min = pair.a().front();
  double a_max = a_min;
  double b_min = pair.b().front();
  double b_max = b_min;
  for (std::size_t k = 0; k < pair.modes(); ++k) {
    c.a2_case1 = std::max(c.a2_case1, pair.a()[k] / pair.b()[k]);
    c.a2_case2 = std::max(c.a2_case2, 1.0 / pair.b()[k]);
    a_min = std::min(a_min, pair.a()[k]);
    a_max = std::max(a_max, pair.a()[k]);
    b_min = std::min(b_min, pair.b()[k]);
    b_max = std::max(b_max, pair.b()[k]);
  }
  // Heuristic: A's spectrum spreads while B's stays flat (e.g. B = identity).
  c.case1_degenerates_in_limit = pair.modes() > 1 && (a_max / a_min) > 4.0 * (b_max / b_min);
  return c;
}

}  // namespace memdecay
