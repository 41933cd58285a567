#include "sketchreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sketchreg/error.hpp"

namespace sketchreg {

namespace {

constexpr int kMaxSweeps = 80;

/// Thin Householder QR: returns explicit Q (n×k) and R (k×k).
void householder_qr(const DenseMatrix& a, DenseMatrix& q, DenseMatrix& r) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  // Work column-major for cache-friendly reflector application.
  std::vector<std::vector<double>> cols(k, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) cols[j][i] = a(i, j);

  std::vector<std::vector<double>> reflectors(k);
  std::vector<double> betas(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    auto& x = cols[j];
    double sigma = 0.0;
    for (std::size_t i = j; i < n; ++i) sigma += x[i] * x[i];
    const double norm = std::sqrt(sigma);
    std::vector<double> v(x.begin() + static_cast<std::ptrdiff_t>(j), x.end());
    if (norm == 0.0) {
      reflectors[j] = std::move(v);
      betas[j] = 0.0;
      continue;
    }
    const double alpha = x[j] >= 0.0 ? -norm : norm;
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double vi : v) vnorm2 += vi * vi;
    const double beta = vnorm2 > 0.0 ? 2.0 / vnorm2 : 0.0;
    for (std::size_t c = j; c < k; ++c) {
      auto& col = cols[c];
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * col[j + i];
      s *= beta;
      for (std::size_t i = 0; i < v.size(); ++i) col[j + i] -= s * v[i];
    }
    reflectors[j] = std::move(v);
    betas[j] = beta;
  }

  r = DenseMatrix(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i <= j; ++i) r(i, j) = cols[j][i];

  // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of I.
  std::vector<std::vector<double>> qcols(k, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    auto& col = qcols[c];
    col[c] = 1.0;
    for (std::size_t jj = k; jj-- > 0;) {
      if (betas[jj] == 0.0) continue;
      const auto& v = reflectors[jj];
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * col[jj + i];
      s *= betas[jj];
      for (std::size_t i = 0; i < v.size(); ++i) col[jj + i] -= s * v[i];
    }
  }
  q = DenseMatrix(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) q(i, j) = qcols[j][i];
}

/// One-sided Jacobi on a square matrix B: B V = W with orthogonal columns.
/// Returns column-major W columns and V.
void one_sided_jacobi(const DenseMatrix& b, std::vector<std::vector<double>>& w, DenseMatrix& v) {
  const std::size_t k = b.cols();
  const std::size_t n = b.rows();
  w.assign(k, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) w[j][i] = b(i, j);
  v = DenseMatrix::identity(k);
  const double eps = 1e-15;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += w[p][i] * w[p][i];
          beta += w[q][i] * w[q][i];
          gamma += w[p][i] * w[q][i];
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double wp = w[p][i];
          const double wq = w[q][i];
          w[p][i] = c * wp - s * wq;
          w[q][i] = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < k; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return;
  }
  throw Error(ErrorKind::NonConvergence, "one-sided Jacobi did not converge in " +
                                             std::to_string(kMaxSweeps) + " sweeps");
}

}  // namespace

SvdFactors svd(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  if (n < k) throw Error(ErrorKind::InvalidDims, "svd requires rows >= cols");
  if (k == 0) return {DenseMatrix(n, 0), {}, DenseMatrix(0, 0)};

  DenseMatrix q, r;
  householder_qr(a, q, r);

  std::vector<std::vector<double>> w;
  DenseMatrix v;
  one_sided_jacobi(r, w, v);

  std::vector<double> sigma(k);
  for (std::size_t j = 0; j < k; ++j) sigma[j] = std::sqrt(std::inner_product(w[j].begin(), w[j].end(), w[j].begin(), 0.0));

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double smax = sigma[order[0]];
  const double tiny = smax * 1e-15 * static_cast<double>(k);

  // Left factor of R (k×k), columns normalised; null directions completed by Gram-Schmidt.
  std::vector<std::vector<double>> ur(k);
  std::vector<double> sorted_sigma(k);
  DenseMatrix vs(k, k);
  std::vector<std::size_t> missing;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t j = order[c];
    for (std::size_t i = 0; i < k; ++i) vs(i, c) = v(i, j);
    if (sigma[j] > tiny && sigma[j] > 0.0) {
      sorted_sigma[c] = sigma[j];
      ur[c] = w[j];
      for (double& x : ur[c]) x /= sigma[j];
    } else {
      sorted_sigma[c] = 0.0;
      missing.push_back(c);
    }
  }
  std::size_t probe = 0;
  for (std::size_t c : missing) {
    for (; probe < k; ++probe) {
      std::vector<double> e(k, 0.0);
      e[probe] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t o = 0; o < k; ++o) {
          if (ur[o].empty()) continue;
          const double proj = std::inner_product(e.begin(), e.end(), ur[o].begin(), 0.0);
          for (std::size_t i = 0; i < k; ++i) e[i] -= proj * ur[o][i];
        }
      }
      const double nrm = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
      if (nrm > 0.5) {
        for (double& x : e) x /= nrm;
        ur[c] = std::move(e);
        ++probe;
        break;
      }
    }
  }

  SvdFactors out;
  out.U = DenseMatrix(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    auto qi = q.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += qi[t] * ur[c][t];
      out.U(i, c) = s;
    }
  }
  out.singular_values = std::move(sorted_sigma);
  out.V = std::move(vs);
  return out;
}

std::vector<double> singular_values(const DenseMatrix& a) {
  if (a.rows() >= a.cols()) return svd(a).singular_values;
  return svd(transpose(a)).singular_values;
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double spectral_norm(const DenseMatrix& a) {
  if (a.empty()) return 0.0;
  const auto s = singular_values(a);
  return s.empty() ? 0.0 : s.front();
}

LeverageProfile leverage_scores(const DenseMatrix& a) {
  const SvdFactors f = svd(a);
  const double smax = f.singular_values.front();
  const double smin = f.singular_values.back();
  if (!(smin >= kDefaultRankTol * smax) || smax == 0.0) {
    throw Error(ErrorKind::RankDeficient, "leverage scores need full column rank (sigma_min/sigma_max = " +
                                              std::to_string(smax > 0 ? smin / smax : 0.0) + ")");
  }
  LeverageProfile lp;
  lp.scores.resize(a.rows());
  lp.probabilities.resize(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double u : f.U.row(i)) s += u * u;
    lp.scores[i] = s;
    lp.coherence = std::max(lp.coherence, s);
  }
  const double total = std::accumulate(lp.scores.begin(), lp.scores.end(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) lp.probabilities[i] = lp.scores[i] / total;
  return lp;
}

std::size_t numeric_rank(const DenseMatrix& a, double rel_tol) {
  if (a.empty()) return 0;
  const auto s = singular_values(a);
  if (s.empty() || s.front() == 0.0) return 0;
  const double cut = rel_tol * s.front();
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double x) { return x >= cut; }));
}

DenseMatrix spd_inverse(const DenseMatrix& s, double rel_tol) {
  const SvdFactors f = svd(s);
  const std::size_t k = s.cols();
  const double smax = f.singular_values.front();
  for (std::size_t j = 0; j < k; ++j) {
    if (!(f.singular_values[j] >= rel_tol * smax) || smax == 0.0) {
      throw Error(ErrorKind::RankDeficient, "matrix is numerically singular at singular value " + std::to_string(j + 1));
    }
  }
  // For symmetric PSD input the right factor carries the eigenvectors.
  DenseMatrix inv(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += f.V(i, t) * f.V(j, t) / f.singular_values[t];
      inv(i, j) = acc;
    }
  return inv;
}

}  // namespace sketchreg
