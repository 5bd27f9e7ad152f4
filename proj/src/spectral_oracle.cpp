#include "latgreen/spectral_oracle.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "latgreen/errors.hpp"
#include "latgreen/finsler.hpp"
#include "latgreen/hamiltonian.hpp"

namespace latgreen {
namespace {

using Cx = std::complex<double>;

Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> displacement_key(const Eigen::VectorXd& z,
                                                                double h) {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> zk(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double q = z(i) / h;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9)
      throw ConfigError("green_spectral: displacement is not on the h-grid");
    zk(i) = static_cast<std::int64_t>(r);
  }
  return zk;
}

}  // namespace

SpectralValue green_spectral(const ModelSpec& m, const Eigen::VectorXd& z, double h,
                             const Eigen::VectorXd& pbar, int n) {
  const int d = m.d;
  if (z.size() != d) throw ConfigError("green_spectral: displacement dimension mismatch");
  if (!(h > 0.0)) throw ConfigError("green_spectral: spacing must be positive");
  if (n < 2) throw ConfigError("green_spectral: need at least two nodes per dimension");
  if (!is_translation_invariant(m))
    throw ConfigError("green_spectral: model is not translation invariant");
  const Eigen::VectorXd pb =
      pbar.size() == d ? pbar : Eigen::VectorXd::Zero(d);

  const auto zk = displacement_key(z, h);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);
  const double U = onsite_u(m, x0);

  const int np = static_cast<int>(m.pairs.size());
  std::vector<double> v2(static_cast<std::size_t>(np)), ch(static_cast<std::size_t>(np)),
      sh(static_cast<std::size_t>(np));
  for (int j = 0; j < np; ++j) {
    v2[static_cast<std::size_t>(j)] = 2.0 * pair_v(m, x0, m.pairs[static_cast<std::size_t>(j)].offset);
    const double tp = m.pairs[static_cast<std::size_t>(j)].offset.cast<double>().dot(pb);
    ch[static_cast<std::size_t>(j)] = std::cosh(tp);
    sh[static_cast<std::size_t>(j)] = std::sinh(tp);
  }

  // Per-axis tables: pair_phase[j][a][i] = exp(i * ell_j[a] * xi_i) and
  // z_phase[a][i] = exp(i * zk[a] * xi_i); the grid loop is then pure
  // complex arithmetic.
  const double step = 2.0 * std::numbers::pi / n;
  std::vector<std::vector<std::vector<Cx>>> pair_phase(static_cast<std::size_t>(np));
  std::vector<std::vector<Cx>> z_phase(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    z_phase[static_cast<std::size_t>(a)].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      z_phase[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] =
          std::polar(1.0, static_cast<double>(zk(a)) * step * i);
  }
  for (int j = 0; j < np; ++j) {
    pair_phase[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      auto& tab = pair_phase[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)];
      tab.resize(static_cast<std::size_t>(n));
      const double la = m.pairs[static_cast<std::size_t>(j)].offset(a);
      for (int i = 0; i < n; ++i)
        tab[static_cast<std::size_t>(i)] = std::polar(1.0, la * step * i);
    }
  }

  Cx acc(0.0, 0.0);
  double margin = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  const std::int64_t total = [&] {
    std::int64_t t = 1;
    for (int a = 0; a < d; ++a) t *= n;
    return t;
  }();
  for (std::int64_t it = 0; it < total; ++it) {
    Cx vt(0.0, 0.0);
    for (int j = 0; j < np; ++j) {
      Cx e = pair_phase[static_cast<std::size_t>(j)][0][static_cast<std::size_t>(idx[0])];
      for (int a = 1; a < d; ++a)
        e *= pair_phase[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)]
                       [static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      vt += v2[static_cast<std::size_t>(j)] *
            Cx(e.real() * ch[static_cast<std::size_t>(j)],
               -e.imag() * sh[static_cast<std::size_t>(j)]);
    }
    const Cx denom = Cx(U, 0.0) - vt;
    margin = std::min(margin, denom.real());
    Cx phase = z_phase[0][static_cast<std::size_t>(idx[0])];
    for (int a = 1; a < d; ++a)
      phase *= z_phase[static_cast<std::size_t>(a)]
                      [static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
    acc += phase / denom;

    for (int a = d - 1; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < n) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }

  if (!(margin > 1e-10))
    throw NumericalError("green_spectral: denominator margin below tolerance");

  acc /= static_cast<double>(total);
  const double tilt = std::exp(-pb.dot(zk.cast<double>()));

  SpectralValue out;
  out.n = n;
  out.denom_margin = margin;
  out.value = tilt * acc.real();
  out.imag_residual =
      std::abs(acc.imag()) / std::max(std::abs(acc.real()), 1e-300);
  return out;
}

namespace {

struct Refined {
  int n{0};
  SpectralValue v;
};

Refined refine_impl(const ModelSpec& m, const Eigen::VectorXd& z, double h,
                    const Eigen::VectorXd& pbar, int n0) {
  const int cap = m.d == 2 ? 4096 : (m.d == 3 ? 512 : 128);
  int n = std::max(2, n0);
  SpectralValue prev = green_spectral(m, z, h, pbar, n);
  while (2 * n <= cap) {
    n *= 2;
    const SpectralValue cur = green_spectral(m, z, h, pbar, n);
    if (std::abs(cur.value - prev.value) <= 1e-12 * std::max(std::abs(cur.value), 1e-300))
      return {n, cur};
    prev = cur;
  }
  throw NumericalError(
      "quadrature_refine: node cap reached before convergence (shift the contour)");
}

}  // namespace

int quadrature_refine(const ModelSpec& m, const Eigen::VectorXd& z, double h,
                      const Eigen::VectorXd& pbar, int n0) {
  return refine_impl(m, z, h, pbar, n0).n;
}

Eigen::VectorXd spectral_tilt(const ModelSpec& m, const Eigen::VectorXd& z) {
  if (z.norm() == 0.0) return Eigen::VectorXd::Zero(m.d);
  return 0.9 * dual_point(m, Eigen::VectorXd::Zero(m.d), z).p;
}

double green_spectral_auto(const ModelSpec& m, const Eigen::VectorXd& z, double h) {
  return refine_impl(m, z, h, spectral_tilt(m, z), 16).v.value;
}

}  // namespace latgreen
