#include "lrkg/nonlinearity.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <utility>

namespace lrkg {

namespace {

void require_nodal(const PairState& state) {
  if (state.representation != Representation::nodal) {
    throw std::invalid_argument("nonlinear terms are evaluated on nodal pair states");
  }
  if (state.u.size() != state.grid.size() || state.v.size() != state.grid.size()) {
    throw std::invalid_argument("pair state component length does not match its grid");
  }
}

}  // namespace

NonlinearModel::NonlinearModel(std::string name, Scalar f, Scalar df, Scalar d2f,
                               bool lipschitz_ok)
    : name_(std::move(name)),
      f_(std::move(f)),
      df_(std::move(df)),
      d2f_(std::move(d2f)),
      lipschitz_ok_(lipschitz_ok) {
  if (!f_ || !df_ || !d2f_) throw std::invalid_argument("nonlinear model needs f, f' and f''");
  if (!lipschitz_ok_) {
    std::clog << "warning: nonlinearity '" << name_
              << "' is not flagged globally Lipschitz; convergence guarantees do not apply\n";
  }
}

NonlinearModel NonlinearModel::sine_gordon() {
  return NonlinearModel(
      "sine", [](double u) { return std::sin(u); }, [](double u) { return std::cos(u); },
      [](double u) { return -std::sin(u); }, true);
}

NonlinearModel NonlinearModel::zero() {
  NonlinearModel model(
      "zero", [](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
      true);
  model.is_zero_ = true;
  return model;
}

NonlinearModel NonlinearModel::constant(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("constant nonlinearity must be finite");
  return NonlinearModel(
      "constant:" + std::to_string(c), [c](double) { return c; }, [](double) { return 0.0; },
      [](double) { return 0.0; }, true);
}

NonlinearModel NonlinearModel::by_name(std::string_view name) {
  if (name == "sine" || name == "sin" || name == "sine_gordon") return sine_gordon();
  if (name == "zero") return zero();
  constexpr std::string_view prefix = "constant:";
  if (name.starts_with(prefix)) {
    std::string value(name.substr(prefix.size()));
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw std::invalid_argument("bad constant nonlinearity '" + std::string(name) + "'");
    }
    return constant(c);
  }
  throw std::invalid_argument("unknown nonlinearity '" + std::string(name) +
                              "' (expected sine, zero or constant:<c>)");
}

std::vector<double> apply_f(const NonlinearModel& model, std::span<const double> u) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = model.f(u[i]);
  return out;
}

PairState eval_F(const NonlinearModel& model, const PairState& nodal) {
  require_nodal(nodal);
  return PairState{nodal.grid, Representation::nodal, std::vector<double>(nodal.grid.size(), 0.0),
                   apply_f(model, nodal.u)};
}

PairState eval_H(const NonlinearModel& model, const PairState& nodal) {
  require_nodal(nodal);
  PairState out = PairState::zeros(nodal.grid, Representation::nodal);
  for (std::size_t i = 0; i < nodal.u.size(); ++i) {
    out.u[i] = -model.f(nodal.u[i]);
    out.v[i] = model.df(nodal.u[i]) * nodal.v[i];
  }
  return out;
}

}  // namespace lrkg
