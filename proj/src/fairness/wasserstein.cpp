#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "draf/fairness.hpp"

namespace draf::fairness {

// Integral of |F_a - F_b| over the merged support; both CDFs are step
// functions, so the integral is exact on each gap between sorted values.
double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein_1d needs nonempty samples");
  std::vector<double> xa(a.begin(), a.end());
  std::vector<double> xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());

  std::size_t ia = 0;
  std::size_t ib = 0;
  double total = 0.0;
  double prev = std::min(xa.front(), xb.front());
  while (ia < xa.size() || ib < xb.size()) {
    const double next = ib >= xb.size() || (ia < xa.size() && xa[ia] <= xb[ib]) ? xa[ia] : xb[ib];
    const double fa = static_cast<double>(ia) / na;
    const double fb = static_cast<double>(ib) / nb;
    total += std::abs(fa - fb) * (next - prev);
    while (ia < xa.size() && xa[ia] == next) ++ia;
    while (ib < xb.size() && xb[ib] == next) ++ib;
    prev = next;
  }
  return total;
}

}  // namespace draf::fairness
