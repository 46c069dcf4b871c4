#include "intop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "intop/errors.hpp"

namespace intop {

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(n));
  gl.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    gl.nodes[lo] = -x;
    gl.nodes[hi] = x;
    gl.weights[lo] = gl.weights[hi] = w;
  }
  if (n % 2 == 1) gl.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return gl;
}

struct RadialNode {
  double r;
  double weight;  // includes r^2
};

std::vector<RadialNode> radial_rule(std::vector<double> breaks,
                                    const QuadratureSpec& spec) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const auto& gl = gauss_legendre(spec.radial_nodes);
  std::vector<RadialNode> out;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b];
    const double hi = breaks[b + 1];
    const int panels =
        std::max(1, static_cast<int>(std::ceil((hi - lo) / spec.panel_length - 1e-12)));
    const double len = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * len;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double r = a + 0.5 * len * (gl.nodes[k] + 1.0);
        out.push_back({r, 0.5 * len * gl.weights[k] * r * r});
      }
    }
  }
  return out;
}

struct Frame {
  Vec3 e1, e2, e3;
};

Frame pole_frame(const Vec3& center, const std::vector<Vec3>& others) {
  Vec3 pole(0.0, 0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : others) {
    const double d = (o - center).norm();
    if (d > 0.0 && d < best) {
      best = d;
      pole = (o - center) / d;
    }
  }
  Vec3 helper = std::abs(pole.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  Vec3 e1 = (helper - helper.dot(pole) * pole).normalized();
  return {e1, pole.cross(e1), pole};
}

// Sum over the radial nodes of one center, in node order.
Complex center_sum(const std::vector<Vec3>& centers, std::size_t c,
                   const std::vector<Vec3>& others,
                   const std::vector<RadialNode>& radial, const Integrand& f,
                   const QuadratureSpec& spec) {
  const Frame fr = pole_frame(centers[c], others);
  const auto& gl = gauss_legendre(spec.theta_nodes);
  const double dphi = 2.0 * kPi / spec.phi_nodes;
  std::vector<Vec3> dirs;
  std::vector<double> dir_w;
  for (std::size_t t = 0; t < gl.nodes.size(); ++t) {
    const double ct = gl.nodes[t];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int p = 0; p < spec.phi_nodes; ++p) {
      const double ph = (p + 0.5) * dphi;
      dirs.push_back(st * std::cos(ph) * fr.e1 + st * std::sin(ph) * fr.e2 + ct * fr.e3);
      dir_w.push_back(gl.weights[t] * dphi);
    }
  }
  std::vector<Complex> partial(radial.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Complex acc = 0.0;
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Vec3 x = centers[c] + radial[i].r * dirs[d];
        const double w = centers.size() == 1 ? 1.0 : becke_weight(centers, c, x);
        if (w == 0.0) continue;
        acc += (dir_w[d] * w) * f(x);
      }
      partial[i] = radial[i].weight * acc;
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, spec.threads));
  if (n_threads == 1 || radial.size() < 2 * n_threads) {
    work(0, radial.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (radial.size() + n_threads - 1) / n_threads;
    for (std::size_t b = 0; b < radial.size(); b += chunk) {
      pool.emplace_back(work, b, std::min(radial.size(), b + chunk));
    }
    for (auto& t : pool) t.join();
  }
  Complex total = 0.0;
  for (const auto& v : partial) total += v;
  return total;
}

Complex integrate_shells(const std::vector<Vec3>& centers,
                         const std::vector<Vec3>& landmarks, const Integrand& f,
                         const QuadratureSpec& spec, double lo, double hi,
                         bool full) {
  Complex total = 0.0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    std::vector<Vec3> others;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (j != c) others.push_back(centers[j]);
    }
    others.insert(others.end(), landmarks.begin(), landmarks.end());
    std::vector<double> breaks = {lo, hi};
    if (full) {
      breaks.push_back(spec.r_split);
      breaks.push_back(spec.r_outer);
      for (const auto& o : others) {
        const double d = (o - centers[c]).norm();
        if (d > spec.r_split && d < spec.r_outer) breaks.push_back(d);
      }
    }
    total += center_sum(centers, c, others, radial_rule(breaks, spec), f, spec);
  }
  return total;
}

std::vector<Vec3> joined(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  if (n < 1) throw ParameterError("gauss_legendre: need at least one node");
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

void QuadratureSpec::validate(const std::vector<Vec3>& centers) const {
  if (centers.empty()) throw ParameterError("quadrature: no centers");
  if (!(r_split > 0.0)) throw ParameterError("quadrature: r_split must be positive");
  if (radial_nodes < 2 || theta_nodes < 2 || phi_nodes < 3) {
    throw ParameterError("quadrature: node counts too small");
  }
  if (!(panel_length > 0.0) || !(r_split > 0.0) || !(r_outer > r_split)) {
    throw ParameterError("quadrature: need 0 < r_split < r_outer and panel_length > 0");
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      if (!(r_split < 0.5 * (centers[i] - centers[j]).norm())) {
        throw ParameterError("quadrature: r_split must stay below half the center separation");
      }
    }
  }
  for (double e : excision_ladder) {
    if (!(e > 0.0) || !(e < r_split)) {
      throw ParameterError("quadrature: excision radii must lie in (0, r_split)");
    }
  }
  if (!std::is_sorted(excision_ladder.rbegin(), excision_ladder.rend()) ||
      std::adjacent_find(excision_ladder.begin(), excision_ladder.end()) !=
          excision_ladder.end()) {
    throw ParameterError("quadrature: excision ladder must be strictly decreasing");
  }
}

double becke_weight(const std::vector<Vec3>& centers, std::size_t c,
                    const Vec3& x) {
  auto cell = [&](std::size_t i) {
    double prod = 1.0;
    const double ri = (x - centers[i]).norm();
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (j == i) continue;
      const double mu =
          (ri - (x - centers[j]).norm()) / (centers[i] - centers[j]).norm();
      double p = mu;
      for (int k = 0; k < 3; ++k) p = 1.5 * p - 0.5 * p * p * p;
      prod *= 0.5 * (1.0 - p);
    }
    return prod;
  };
  double total = 0.0;
  double own = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double v = cell(i);
    total += v;
    if (i == c) own = v;
  }
  return total > 0.0 ? own / total : 0.0;
}

Complex integrate(const std::vector<Vec3>& centers, const Integrand& f,
                  const QuadratureSpec& spec, double eps,
                  const std::vector<Vec3>& landmarks) {
  spec.validate(joined(centers, landmarks));
  if (eps < 0.0 || eps >= spec.r_split) {
    throw ParameterError("quadrature: excision radius must lie in [0, r_split)");
  }
  return integrate_shells(centers, landmarks, f, spec, eps, spec.r_split, true);
}

ExtrapolationResult excised_integral(const std::vector<Vec3>& centers,
                                     const Integrand& f,
                                     const QuadratureSpec& spec,
                                     const std::vector<Vec3>& landmarks) {
  spec.validate(joined(centers, landmarks));
  if (spec.excision_ladder.size() < 2) {
    throw ParameterError("quadrature: excision ladder needs two radii");
  }
  const double top = spec.excision_ladder.front();
  const Complex base =
      integrate_shells(centers, landmarks, f, spec, top, spec.r_split, true);
  std::vector<double> radii;
  std::vector<Complex> values;
  double scale = std::abs(base);
  for (double eps : spec.excision_ladder) {
    const Complex v =
        eps == top ? base
                    : base + integrate_shells(centers, landmarks, f, spec, eps, top, false);
    radii.push_back(eps);
    values.push_back(v);
    scale = std::max(scale, std::abs(v));
  }
  return richardson_to_zero(std::move(radii), std::move(values), 1.5,
                            1e-12 * std::max(scale, 1.0));
}

}  // namespace intop
