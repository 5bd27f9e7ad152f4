#include "latgreen/hamiltonian.hpp"

#include <cmath>

namespace latgreen {

double hamiltonian(const ModelSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  double acc = 0.0;
  for (const auto& pf : m.pairs) {
    const double t = p.dot(pf.offset.cast<double>());
    acc += 2.0 * m.J * eval_value(pf.field, x) * (std::cosh(std::abs(t)) - 1.0);
  }
  return acc - eval_value(m.dpp, x);
}

void hamiltonian_and_grad_p(const ModelSpec& m, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& p, double& H, Eigen::VectorXd& dHdp) {
  H = 0.0;
  dHdp = Eigen::VectorXd::Zero(m.d);
  for (const auto& pf : m.pairs) {
    const Eigen::VectorXd ell = pf.offset.cast<double>();
    const double t = p.dot(ell);
    const double v2 = 2.0 * m.J * eval_value(pf.field, x);
    H += v2 * (std::cosh(std::abs(t)) - 1.0);
    dHdp += v2 * std::sinh(t) * ell;
  }
  H -= eval_value(m.dpp, x);
}

PhaseDerivs phase_derivs(const ModelSpec& m, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& p) {
  PhaseDerivs out;
  out.dHdx = Eigen::VectorXd::Zero(m.d);
  out.dHdp = Eigen::VectorXd::Zero(m.d);
  out.Hpp = Eigen::MatrixXd::Zero(m.d, m.d);
  out.Hpx = Eigen::MatrixXd::Zero(m.d, m.d);
  out.Hxx = Eigen::MatrixXd::Zero(m.d, m.d);

  for (const auto& pf : m.pairs) {
    const Eigen::VectorXd ell = pf.offset.cast<double>();
    const double t = p.dot(ell);
    const double c = std::cosh(std::abs(t));
    const double s = std::sinh(t);
    FieldEval v = eval2(pf.field, x);
    v.value *= 2.0 * m.J;
    v.gradient *= 2.0 * m.J;
    v.hessian *= 2.0 * m.J;

    out.H += v.value * (c - 1.0);
    out.dHdp += v.value * s * ell;
    out.Hpp += v.value * c * (ell * ell.transpose());
    out.dHdx += (c - 1.0) * v.gradient;
    out.Hpx += s * (ell * v.gradient.transpose());
    out.Hxx += (c - 1.0) * v.hessian;
  }
  const FieldEval dpp = eval2(m.dpp, x);
  out.H -= dpp.value;
  out.dHdx -= dpp.gradient;
  out.Hxx -= dpp.hessian;
  return out;
}

double level_scale(const ModelSpec& m, const Eigen::VectorXd& x) {
  return std::max(1.0, onsite_u(m, x));
}

bool is_translation_invariant(const ModelSpec& m, int n_samples) {
  SampleBox box{Eigen::VectorXd::Constant(m.d, -4.0), Eigen::VectorXd::Constant(m.d, 4.0)};
  for (int i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd x = sample_in_box(box, static_cast<std::uint64_t>(i));
    const FieldEval dpp = eval2(m.dpp, x);
    if (dpp.gradient.lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + std::abs(dpp.value)))
      return false;
    for (const auto& pf : m.pairs) {
      const FieldEval w = eval2(pf.field, x);
      if (w.gradient.lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + std::abs(w.value)))
        return false;
    }
  }
  return true;
}

}  // namespace latgreen
