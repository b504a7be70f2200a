// Copyright 2026 The DICM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dicm/prob_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dicm/errors.hpp"

namespace dicm {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::kInvalidParameter,
                std::string(what) + " must be finite");
  }
}

void validate(const GaussianParams& p) {
  require_finite(p.mu, "mu");
  require_finite(p.sigma, "sigma");
  if (p.sigma < kSigmaMin) {
    throw Error(ErrorKind::kInvalidParameter,
                "sigma " + std::to_string(p.sigma) + " below floor " +
                    std::to_string(kSigmaMin));
  }
}

void validate(const DeltaParams& p) { require_finite(p.mu, "mu"); }

void validate(const MixtureParams& p) {
  require_finite(p.w, "w");
  if (p.w < 0.0 || p.w > 1.0) {
    throw Error(ErrorKind::kInvalidParameter, "mixture weight outside [0,1]");
  }
  validate(GaussianParams{p.mu, p.sigma});
}

void validate(const GmmParams& p) {
  if (p.components.empty()) {
    throw Error(ErrorKind::kInvalidParameter, "GMM needs at least 1 component");
  }
  double wsum = 0.0;
  for (const auto& c : p.components) {
    require_finite(c.w, "w");
    if (c.w < 0.0) {
      throw Error(ErrorKind::kInvalidParameter, "GMM weight negative");
    }
    validate(GaussianParams{c.mu, c.sigma});
    wsum += c.w;
  }
  if (std::fabs(wsum - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidParameter,
                "GMM weights sum to " + std::to_string(wsum) + ", not 1");
  }
}

// Mass of N(mu, sigma^2) below t.
double gaussian_mass_below(double t, double mu, double sigma) {
  return std_normal_cdf((t - mu) / sigma);
}

double delta_bin(double y, double mu) {
  // F(y + 1/2 - mu) - F(y - 1/2 - mu) with F the delta CDF, F(0) = 1.
  double hi = y + 0.5 - mu;
  double lo = y - 0.5 - mu;
  return (hi >= 0.0 && lo < 0.0) ? 1.0 : 0.0;
}

}  // namespace

double gaussian_bin(double y, double mu, double sigma) {
  double hi = (y + 0.5 - mu) / sigma;
  double lo = (y - 0.5 - mu) / sigma;
  double v;
  if (hi + lo >= 0.0) {
    // Cell at or right of the mean: difference of upper-tail erfc values.
    v = 0.5 * (erfc_cody(lo * kInvSqrt2) - erfc_cody(hi * kInvSqrt2));
  } else {
    v = 0.5 * (erfc_cody(-hi * kInvSqrt2) - erfc_cody(-lo * kInvSqrt2));
  }
  return v > 0.0 ? v : 0.0;
}

double gaussian_likelihood(std::int32_t y_hat, const GaussianParams& p) {
  validate(p);
  return gaussian_bin(static_cast<double>(y_hat), p.mu, p.sigma);
}

double delta_likelihood(std::int32_t y_hat, const DeltaParams& p) {
  validate(p);
  return delta_bin(static_cast<double>(y_hat), p.mu);
}

double mixture_likelihood(std::int32_t y_hat, const MixtureParams& p) {
  validate(p);
  double y = static_cast<double>(y_hat);
  return p.w * gaussian_bin(y, p.mu, p.sigma) +
         (1.0 - p.w) * delta_bin(y, p.mu);
}

double gmm_likelihood(std::int32_t y_hat, const GmmParams& p) {
  validate(p);
  double y = static_cast<double>(y_hat);
  double acc = 0.0;
  for (const auto& c : p.components) {
    acc += c.w * gaussian_bin(y, c.mu, c.sigma);
  }
  return acc;
}

double likelihood(std::int32_t y_hat, const ModelParams& model) {
  return std::visit(
      [y_hat](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianParams>) {
          return gaussian_likelihood(y_hat, p);
        } else if constexpr (std::is_same_v<T, DeltaParams>) {
          return delta_likelihood(y_hat, p);
        } else if constexpr (std::is_same_v<T, MixtureParams>) {
          return mixture_likelihood(y_hat, p);
        } else {
          return gmm_likelihood(y_hat, p);
        }
      },
      model);
}

double PmfTable::ideal_bits(std::int32_t symbol) const {
  std::size_t idx = static_cast<std::size_t>(symbol - support_min);
  return -std::log2(static_cast<double>(freqs[idx]) /
                    static_cast<double>(total()));
}

namespace {

// Tail mass outside [s_min - 1/2, s_max + 1/2] folded onto the two edge
// symbols, per model.
void fold_tails(const ModelParams& model, std::int32_t s_min,
                std::int32_t s_max, std::vector<double>& p) {
  auto fold_gaussian = [&](double w, double mu, double sigma) {
    p.front() += w * gaussian_mass_below(s_min - 0.5, mu, sigma);
    p.back() += w * (1.0 - gaussian_mass_below(s_max + 0.5, mu, sigma));
  };
  auto fold_delta = [&](double w, double mu) {
    std::int32_t cell = delta_cell(mu);
    if (cell < s_min) {
      p.front() += w;
    } else if (cell > s_max) {
      p.back() += w;
    }
  };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianParams>) {
          fold_gaussian(1.0, m.mu, m.sigma);
        } else if constexpr (std::is_same_v<T, DeltaParams>) {
          fold_delta(1.0, m.mu);
        } else if constexpr (std::is_same_v<T, MixtureParams>) {
          fold_gaussian(m.w, m.mu, m.sigma);
          fold_delta(1.0 - m.w, m.mu);
        } else {
          for (const auto& c : m.components) {
            fold_gaussian(c.w, c.mu, c.sigma);
          }
        }
      },
      model);
}

}  // namespace

PmfTable build_pmf(const ModelParams& model, std::int32_t s_min,
                   std::int32_t s_max, int precision_bits) {
  if (s_min > s_max) {
    throw Error(ErrorKind::kInvalidParameter, "support_min > support_max");
  }
  if (precision_bits < 8 || precision_bits > 24) {
    throw Error(ErrorKind::kInvalidParameter,
                "precision_bits must lie in [8, 24]");
  }
  std::uint64_t width =
      static_cast<std::uint64_t>(s_max) - static_cast<std::uint64_t>(s_min) + 1;
  std::uint64_t total = 1ull << precision_bits;
  if (width >= total) {
    throw Error(ErrorKind::kCapacity,
                "support width " + std::to_string(width) +
                    " does not fit precision 2^" +
                    std::to_string(precision_bits));
  }

  std::vector<double> p(width);
  for (std::uint64_t i = 0; i < width; ++i) {
    p[i] = likelihood(s_min + static_cast<std::int32_t>(i), model);
  }
  fold_tails(model, s_min, s_max, p);

  // Largest-remainder apportionment of `total` units.
  std::vector<std::uint32_t> freqs(width);
  std::vector<double> frac(width);
  std::int64_t assigned = 0;
  for (std::uint64_t i = 0; i < width; ++i) {
    double ideal = std::max(p[i], 0.0) * static_cast<double>(total);
    double fl = std::floor(ideal);
    if (fl > static_cast<double>(total)) fl = static_cast<double>(total);
    freqs[i] = static_cast<std::uint32_t>(fl);
    frac[i] = ideal - fl;
    assigned += freqs[i];
  }
  std::int64_t rem = static_cast<std::int64_t>(total) - assigned;
  if (rem > 0) {
    std::vector<std::uint32_t> order(width);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       if (frac[a] != frac[b]) return frac[a] > frac[b];
                       return a < b;
                     });
    for (std::int64_t k = 0; k < rem && k < static_cast<std::int64_t>(width);
         ++k) {
      ++freqs[order[static_cast<std::size_t>(k)]];
    }
    if (rem > static_cast<std::int64_t>(width)) {
      // All remainders consumed; park the rest on the largest symbol.
      std::size_t imax = static_cast<std::size_t>(std::distance(
          freqs.begin(), std::max_element(freqs.begin(), freqs.end())));
      freqs[imax] += static_cast<std::uint32_t>(
          rem - static_cast<std::int64_t>(width));
    }
    rem = 0;
  }

  // Enforce the >= 1 floor, then drain any surplus (raised zeros or a
  // negative remainder) from the largest-frequency symbol.
  std::int64_t excess = -rem;
  for (auto& f : freqs) {
    if (f == 0) {
      f = 1;
      ++excess;
    }
  }
  while (excess > 0) {
    std::size_t imax = static_cast<std::size_t>(std::distance(
        freqs.begin(), std::max_element(freqs.begin(), freqs.end())));
    if (freqs[imax] <= 1) {
      throw Error(ErrorKind::kInternal, "pmf apportionment cannot drain");
    }
    std::uint32_t take = static_cast<std::uint32_t>(std::min<std::int64_t>(
        excess, static_cast<std::int64_t>(freqs[imax]) - 1));
    freqs[imax] -= take;
    excess -= take;
  }

  PmfTable t;
  t.support_min = s_min;
  t.precision_bits = precision_bits;
  t.freqs = std::move(freqs);
  t.cum.resize(width + 1);
  t.cum[0] = 0;
  for (std::uint64_t i = 0; i < width; ++i) {
    t.cum[i + 1] = t.cum[i] + t.freqs[i];
  }
  if (t.cum.back() != total) {
    throw Error(ErrorKind::kInternal, "pmf does not sum to 2^precision");
  }
  return t;
}

}  // namespace dicm
