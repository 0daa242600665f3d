#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lrkg/spectral.hpp"

namespace lrkg {

/// Scalar nonlinearity f of u_tt - Laplacian u = f(u), with f' and f''.
class NonlinearModel {
 public:
  using Scalar = std::function<double(double)>;

  /// `lipschitz_ok` asserts |f'| and |f''| are globally bounded, which the
  /// convergence theory of the corrected Lie scheme assumes.
  NonlinearModel(std::string name, Scalar f, Scalar df, Scalar d2f, bool lipschitz_ok);

  static NonlinearModel sine_gordon();
  static NonlinearModel zero();
  static NonlinearModel constant(double c);

  /// "sine" (alias "sine_gordon", "sin"), "zero", or "constant:<value>".
  static NonlinearModel by_name(std::string_view name);

  const std::string& name() const { return name_; }
  bool lipschitz_ok() const { return lipschitz_ok_; }
  /// True for the f == 0 model, for which every exponential scheme is exact.
  bool is_zero() const { return is_zero_; }

  double f(double u) const { return f_(u); }
  double df(double u) const { return df_(u); }
  double d2f(double u) const { return d2f_(u); }

 private:
  std::string name_;
  Scalar f_;
  Scalar df_;
  Scalar d2f_;
  bool lipschitz_ok_;
  bool is_zero_ = false;
};

/// F(U) = (0, f(u)) at the collocation nodes.
PairState eval_F(const NonlinearModel& model, const PairState& nodal);

/// H(U) = (-f(u), f'(u) v) at the collocation nodes.
PairState eval_H(const NonlinearModel& model, const PairState& nodal);

/// Pointwise f(u).
std::vector<double> apply_f(const NonlinearModel& model, std::span<const double> u);

}  // namespace lrkg
