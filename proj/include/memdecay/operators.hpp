#pragma once

#include <cstddef>
#include <vector>

namespace memdecay {

/// Self-adjoint positive pair (A, B) realized on a shared eigenbasis by the
/// eigenvalue sequences a_k and b_k, k = 1..K.
class ModalOperatorPair {
 public:
  enum class BChoice { same_as_a, identity };

  /// Throws parameter_domain unless both lists are nonempty, equally long
  /// and strictly positive.
  ModalOperatorPair(std::vector<double> a, std::vector<double> b);

  /// a_k = (k pi / length)^2 for k = 1..modes; b_k = a_k or 1.
  static ModalOperatorPair laplacian_1d(std::size_t modes, double length, BChoice b);

  std::size_t modes() const noexcept { return a_.size(); }
  const std::vector<double>& a() const noexcept { return a_; }
  const std::vector<double>& b() const noexcept { return b_; }
  double max_a() const noexcept;

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

struct CoercivityConstants {
  /// max_k b_k / a_k
  double a0;
  /// min_k b_k
  double a1;
};

struct CaseConstants {
  /// Tightest a2 in ||A^{1/2} v||^2 <= a2 ||B^{1/2} v||^2: max_k a_k / b_k.
  double a2_case1;
  /// Tightest a2 in ||A^{1/2} v||^2 <= a2 ||A^{1/2} B^{1/2} v||^2: max_k 1 / b_k.
  double a2_case2;
  /// Both inequalities always hold on a finite modal space.
  bool case1_holds = true;
  bool case2_holds = true;
  /// True when B's spectrum is bounded (max b / min b small) while A's grows,
  /// so the case-1 constant would blow up under mode refinement.
  bool case1_degenerates_in_limit = false;
};

CoercivityConstants coercivity_constants(const ModalOperatorPair& pair);
CaseConstants case_constants(const ModalOperatorPair& pair);

}  // namespace memdecay
