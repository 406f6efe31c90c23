#include <algorithm>
#include <cmath>
#include <future>
#include <vector>

#include "distlqr/chisq.hpp"
#include "distlqr/errors.hpp"

namespace distlqr {

std::vector<double> sample_return(const SystemSpec& spec, const ClosedLoopAnalysis& cl,
                                  const NoiseModel& noise, int N, std::size_t M,
                                  std::uint64_t seed, const SampleOptions& opts) {
  if (M < 1) throw Error(ErrorCode::ConfigError, "sample count must be >= 1");
  if (noise.dim() != cl.n())
    throw Error(ErrorCode::DimensionMismatch, "noise dimension differs from the state's");
  const QuadraticForm qf = build_qform(cl, spec.x0, N);
  const Eigen::Index n = cl.n();

  std::vector<double> out(M);
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
  const std::size_t chunks = (M + chunk - 1) / chunk;

  auto run_chunk = [&](std::size_t ci) {
    Rng rng(seed, ci);
    const std::size_t begin = ci * chunk;
    const std::size_t end = std::min(M, begin + chunk);
    std::vector<Vector> draw(N, Vector(n));
    Vector z(qf.dim());
    for (std::size_t m = begin; m < end; ++m) {
      for (int k = 0; k < N; ++k) {
        noise.draw(rng, draw[k]);
        z.segment(k * n, n) = draw[k];
      }
      out[m] = opts.path == SamplePath::Fast ? evaluate(qf, z) : simulate_return(spec, cl, draw);
    }
  };

  const int threads = std::max(1, opts.threads);
  if (threads == 1 || chunks == 1) {
    for (std::size_t ci = 0; ci < chunks; ++ci) run_chunk(ci);
  } else {
    std::vector<std::future<void>> pending;
    std::size_t next = 0;
    while (next < chunks) {
      pending.clear();
      const std::size_t batch = std::min<std::size_t>(threads, chunks - next);
      for (std::size_t t = 0; t < batch; ++t)
        pending.push_back(std::async(std::launch::async, run_chunk, next + t));
      for (auto& f : pending) f.get();
      next += batch;
    }
  }
  return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw Error(ErrorCode::InsufficientSamples, "no samples");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double g) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), g);
  return double(it - sorted_.begin()) / double(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const {
  if (p <= 0.0) return sorted_.front();
  if (p >= 1.0) return sorted_.back();
  const std::size_t idx = std::min(sorted_.size() - 1, std::size_t(p * double(sorted_.size())));
  return sorted_[idx];
}

double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf,
                   std::size_t stride) {
  const auto& xs = ecdf.sorted();
  const double m = double(xs.size());
  if (stride < 1) stride = 1;
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    const double f = cdf(xs[i]);
    sup = std::max(sup, std::abs(f - double(i + 1) / m));
    sup = std::max(sup, std::abs(f - double(i) / m));
  }
  if (stride > 1) {
    const double f = cdf(xs.back());
    sup = std::max(sup, std::abs(f - 1.0));
    sup += double(stride) / m;  // scan resolution, added conservatively
  }
  return sup;
}

double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  const auto& xa = a.sorted();
  const auto& xb = b.sorted();
  const double na = double(xa.size()), nb = double(xb.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < xa.size() || j < xb.size()) {
    const double x = (j >= xb.size() || (i < xa.size() && xa[i] <= xb[j])) ? xa[i] : xb[j];
    while (i < xa.size() && xa[i] <= x) ++i;
    while (j < xb.size() && xb[j] <= x) ++j;
    sup = std::max(sup, std::abs(double(i) / na - double(j) / nb));
  }
  return sup;
}

}  // namespace distlqr
