#include "magstep/minimize.hpp"

#include <boost/math/tools/minima.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "magstep/errors.hpp"

namespace magstep {

ScanMinimum refine_scan(const std::function<double(double)>& f, std::vector<double> xs, std::vector<double> fs,
                        double x_tol) {
  if (xs.size() != fs.size() || xs.size() < 3) throw RangeError("scan needs at least 3 points");
  ScanMinimum out;
  std::size_t k = 0;
  for (std::size_t i = 1; i < fs.size(); ++i)
    if (fs[i] < fs[k]) k = i;
  out.x = xs[k];
  out.f = fs[k];
  out.interior = k > 0 && k + 1 < xs.size();
  if (out.interior) {
    double lo = xs[k - 1], hi = xs[k + 1];
    double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
    int bits = static_cast<int>(std::ceil(std::log2(scale / x_tol))) + 2;
    bits = std::clamp(bits, 8, std::numeric_limits<double>::digits / 2);
    std::uintmax_t iters = 200;
    int count = 0;
    auto g = [&](double x) {
      ++count;
      return f(x);
    };
    auto r = boost::math::tools::brent_find_minima(g, lo, hi, bits, iters);
    out.evaluations = count;
    if (r.second < out.f) {
      out.x = r.first;
      out.f = r.second;
    }
  }
  out.xs = std::move(xs);
  out.fs = std::move(fs);
  return out;
}

ScanMinimum scan_and_refine(const std::function<double(double)>& f, double lo, double hi, int n, double x_tol) {
  if (!(lo < hi) || n < 3) throw RangeError("invalid scan interval");
  std::vector<double> xs(n), fs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * i / (n - 1);
    fs[i] = f(xs[i]);
  }
  auto out = refine_scan(f, std::move(xs), std::move(fs), x_tol);
  out.evaluations += n;
  return out;
}

}  // namespace magstep
